#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cipher {

/// Largest cardinality the breakpoint tables support.
inline constexpr std::uint32_t kMaxSupportedCardinality = 1u << 16;

bool is_power_of_two(std::uint32_t v) noexcept;

/// Inverse standard normal CDF, accurate to a few ulps on (0, 1).
double normal_quantile(double p);

/// Equiprobable N(0,1) cut points for an alphabet of `cardinality` symbols.
struct Breakpoints {
  std::uint32_t cardinality = 0;
  std::vector<double> thresholds;  // cardinality - 1 values, ascending
};

/// Thresholds are the N(0,1) quantiles at i / cardinality. Exactly symmetric
/// about zero. Any alphabet size in [2, kMaxSupportedCardinality] is accepted
/// (iSAX words only use powers of two); otherwise throws ConfigError.
const Breakpoints& breakpoints(std::uint32_t cardinality);

struct PaaVector {
  std::vector<double> coefficients;
  std::size_t source_length = 0;

  std::size_t size() const noexcept { return coefficients.size(); }
};

/// Mean of each of `word_size` equal-length segments. When the length is not
/// a multiple of word_size, a sample straddling a segment boundary is split
/// between the two segments in proportion to its overlap.
/// Throws InvalidArgument for empty input, word_size 0 or word_size > length.
PaaVector paa(std::span<const double> values, std::size_t word_size);

struct Symbol {
  std::uint32_t value = 0;
  std::uint32_t cardinality = 1;

  friend bool operator==(const Symbol&, const Symbol&) = default;
  friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

/// iSAX word: each position carries its own cardinality. Cardinality 1 is the
/// unconstrained symbol (value 0) used for the index root.
struct IsaxWord {
  std::vector<Symbol> symbols;

  std::size_t size() const noexcept { return symbols.size(); }
  const Symbol& operator[](std::size_t i) const { return symbols[i]; }
  Symbol& operator[](std::size_t i) { return symbols[i]; }

  friend bool operator==(const IsaxWord&, const IsaxWord&) = default;
  friend auto operator<=>(const IsaxWord&, const IsaxWord&) = default;
};

/// Word where every position has cardinality 1.
IsaxWord universal_word(std::size_t word_size);

/// Symbol index of a coefficient: number of thresholds at or below it, so a
/// value lying exactly on a threshold maps to the upper cell.
std::uint32_t discretize(double coefficient, std::uint32_t cardinality);

IsaxWord sax(const PaaVector& paa, std::uint32_t cardinality);

/// Re-discretizes `position` at twice its cardinality using the original
/// coefficient; the result is always contained in `word`.
/// Throws InvalidArgument when the position is already at `max_cardinality`.
IsaxWord promote(const IsaxWord& word, std::size_t position, double coefficient,
                 std::uint32_t max_cardinality);

/// The two refinements of `word` at `position` (lower cell first).
std::pair<IsaxWord, IsaxWord> split_children(const IsaxWord& word,
                                             std::size_t position,
                                             std::uint32_t max_cardinality);

/// True iff every fine symbol, reduced to the coarse cardinality by dropping
/// low-order bits, equals the coarse symbol. Positions where `fine` is coarser
/// than `coarse` never match. Throws InvalidArgument on differing word sizes.
bool contains(const IsaxWord& coarse, const IsaxWord& fine);

/// Lower bound on the Euclidean distance between the original series of two
/// words, each position compared at the coarser of its two cardinalities.
/// Throws InvalidArgument on differing word sizes or zero length.
double mindist(const IsaxWord& a, const IsaxWord& b, std::size_t original_length);

/// Centre of each symbol's cell. Unbounded edge cells use the inner
/// breakpoint moved outward by `edge_margin`.
std::vector<double> word_midpoints(const IsaxWord& word, double edge_margin = 0.5);

/// "v/c,v/c,..." e.g. "1/4,3/4,0/8".
std::string to_string(const IsaxWord& word);
/// Inverse of to_string. Throws InvalidArgument on malformed text.
IsaxWord parse_word(std::string_view text);

}  // namespace cipher
