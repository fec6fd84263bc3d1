#include "cipher/symbolic.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "cipher/error.hpp"

namespace cipher {

bool is_power_of_two(std::uint32_t v) noexcept { return std::has_single_bit(v); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw InvalidArgument("normal_quantile: p outside [0, 1]");
  }
  // Acklam's rational approximation (rel. error ~1e-9) followed by Halley
  // steps against erfc.
  static constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02,
                                           -2.759285104469687e+02, 1.383577518672690e+02,
                                           -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02,
                                           -1.556989798598866e+02, 6.680131188771972e+01,
                                           -1.328068155288572e+01};
  static constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01,
                                           -2.400758277161838e+00, -2.549732539343734e+00,
                                           4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01,
                                           2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x = 0.0;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double sqrt_2pi = std::sqrt(2.0 * std::numbers::pi);
  for (int step = 0; step < 2; ++step) {
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = e * sqrt_2pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

namespace {

constexpr int kMaxLog2 = std::countr_zero(kMaxSupportedCardinality);

Breakpoints build_breakpoints(std::uint32_t cardinality) {
  Breakpoints bp;
  bp.cardinality = cardinality;
  bp.thresholds.assign(cardinality - 1, 0.0);
  // Lower half from the quantile function, upper half mirrored; for an even
  // alphabet the middle threshold stays exactly 0.
  for (std::uint32_t i = 1; 2 * i < cardinality; ++i) {
    const double q = normal_quantile(static_cast<double>(i) /
                                     static_cast<double>(cardinality));
    bp.thresholds[i - 1] = q;
    bp.thresholds[cardinality - 1 - i] = -q;
  }
  return bp;
}

void check_cardinality(std::uint32_t cardinality) {
  if (cardinality < 2 || cardinality > kMaxSupportedCardinality ||
      !is_power_of_two(cardinality)) {
    throw ConfigError("cardinality must be a power of two in [2, " +
                      std::to_string(kMaxSupportedCardinality) + "], got " +
                      std::to_string(cardinality));
  }
}

// Cell [lower, upper) of a symbol; cardinality 1 spans the real line.
std::pair<double, double> cell_edges(const Symbol& s) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (s.cardinality == 1) return {-inf, inf};
  const auto& t = breakpoints(s.cardinality).thresholds;
  const double lower = s.value == 0 ? -inf : t[s.value - 1];
  const double upper = s.value + 1 == s.cardinality ? inf : t[s.value];
  return {lower, upper};
}

void check_symbol(const Symbol& s) {
  if (s.cardinality == 0 || !is_power_of_two(s.cardinality) ||
      s.cardinality > kMaxSupportedCardinality || s.value >= s.cardinality) {
    throw InvalidArgument("invalid symbol " + std::to_string(s.value) + "/" +
                          std::to_string(s.cardinality));
  }
}

}  // namespace

const Breakpoints& breakpoints(std::uint32_t cardinality) {
  if (cardinality < 2 || cardinality > kMaxSupportedCardinality) {
    throw ConfigError("cardinality must be in [2, " +
                      std::to_string(kMaxSupportedCardinality) + "], got " +
                      std::to_string(cardinality));
  }
  if (!is_power_of_two(cardinality)) {
    // Plain-SAX alphabets; iSAX symbols never use these.
    static std::mutex mutex;
    static std::map<std::uint32_t, Breakpoints> other;
    const std::lock_guard lock(mutex);
    auto it = other.find(cardinality);
    if (it == other.end()) it = other.emplace(cardinality, build_breakpoints(cardinality)).first;
    return it->second;
  }
  static std::array<Breakpoints, kMaxLog2 + 1> table;
  static std::array<std::once_flag, kMaxLog2 + 1> once;
  const int slot = std::countr_zero(cardinality);
  std::call_once(once[slot], [&] { table[slot] = build_breakpoints(cardinality); });
  return table[slot];
}

PaaVector paa(std::span<const double> values, std::size_t word_size) {
  const std::size_t n = values.size();
  if (n == 0) throw InvalidArgument("paa of an empty vector");
  if (word_size == 0) throw InvalidArgument("paa word_size must be >= 1");
  if (word_size > n) {
    throw InvalidArgument("paa word_size " + std::to_string(word_size) +
                          " exceeds length " + std::to_string(n));
  }
  PaaVector out;
  out.source_length = n;
  out.coefficients.assign(word_size, 0.0);
  if (n % word_size == 0) {
    const std::size_t seg = n / word_size;
    for (std::size_t j = 0; j < word_size; ++j) {
      double sum = 0.0;
      for (std::size_t i = j * seg; i < (j + 1) * seg; ++i) sum += values[i];
      out.coefficients[j] = sum / static_cast<double>(seg);
    }
    return out;
  }
  // Integer coordinates scaled by n * word_size: sample i covers
  // [i*w, (i+1)*w), segment j covers [j*n, (j+1)*n).
  const std::size_t w = word_size;
  for (std::size_t j = 0; j < w; ++j) {
    const std::size_t seg_lo = j * n;
    const std::size_t seg_hi = (j + 1) * n;
    double sum = 0.0;
    for (std::size_t i = seg_lo / w; i * w < seg_hi; ++i) {
      const std::size_t lo = std::max(i * w, seg_lo);
      const std::size_t hi = std::min((i + 1) * w, seg_hi);
      sum += static_cast<double>(hi - lo) * values[i];
    }
    out.coefficients[j] = sum / static_cast<double>(n);
  }
  return out;
}

IsaxWord universal_word(std::size_t word_size) {
  return IsaxWord{std::vector<Symbol>(word_size, Symbol{0, 1})};
}

std::uint32_t discretize(double coefficient, std::uint32_t cardinality) {
  const auto& t = breakpoints(cardinality).thresholds;
  // Count of thresholds at or below the coefficient.
  return static_cast<std::uint32_t>(
      std::upper_bound(t.begin(), t.end(), coefficient) - t.begin());
}

IsaxWord sax(const PaaVector& paa, std::uint32_t cardinality) {
  check_cardinality(cardinality);
  IsaxWord word;
  word.symbols.reserve(paa.size());
  for (double c : paa.coefficients) {
    word.symbols.push_back(Symbol{discretize(c, cardinality), cardinality});
  }
  return word;
}

IsaxWord promote(const IsaxWord& word, std::size_t position, double coefficient,
                 std::uint32_t max_cardinality) {
  if (position >= word.size()) {
    throw InvalidArgument("promote position out of range");
  }
  const Symbol& s = word[position];
  if (s.cardinality >= max_cardinality) {
    throw InvalidArgument("position " + std::to_string(position) +
                          " already at maximum cardinality " +
                          std::to_string(max_cardinality));
  }
  IsaxWord out = word;
  const std::uint32_t finer = s.cardinality * 2;
  out[position] = Symbol{discretize(coefficient, finer), finer};
  // Breakpoints nest, so the refined symbol always lies inside the old cell
  // unless the coefficient disagrees with it (caller passed a foreign value).
  if ((out[position].value >> 1) != s.value) {
    throw InvalidArgument("coefficient does not lie in the symbol's cell");
  }
  return out;
}

std::pair<IsaxWord, IsaxWord> split_children(const IsaxWord& word,
                                             std::size_t position,
                                             std::uint32_t max_cardinality) {
  if (position >= word.size()) {
    throw InvalidArgument("split position out of range");
  }
  const Symbol& s = word[position];
  if (s.cardinality >= max_cardinality) {
    throw InvalidArgument("position already at maximum cardinality");
  }
  IsaxWord lower = word;
  IsaxWord upper = word;
  lower[position] = Symbol{s.value << 1, s.cardinality * 2};
  upper[position] = Symbol{(s.value << 1) | 1u, s.cardinality * 2};
  return {std::move(lower), std::move(upper)};
}

bool contains(const IsaxWord& coarse, const IsaxWord& fine) {
  if (coarse.size() != fine.size()) {
    throw InvalidArgument("contains: word sizes differ");
  }
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const Symbol& c = coarse[i];
    const Symbol& f = fine[i];
    if (f.cardinality < c.cardinality) return false;
    const int shift = std::countr_zero(f.cardinality) - std::countr_zero(c.cardinality);
    if ((f.value >> shift) != c.value) return false;
  }
  return true;
}

double mindist(const IsaxWord& a, const IsaxWord& b, std::size_t original_length) {
  if (a.size() != b.size()) {
    throw InvalidArgument("mindist: word sizes differ");
  }
  if (original_length == 0 || a.size() == 0) {
    throw InvalidArgument("mindist: original_length and word size must be > 0");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    check_symbol(a[i]);
    check_symbol(b[i]);
    const std::uint32_t card = std::min(a[i].cardinality, b[i].cardinality);
    const auto reduce = [card](const Symbol& s) {
      const int shift = std::countr_zero(s.cardinality) - std::countr_zero(card);
      return Symbol{s.value >> shift, card};
    };
    Symbol lo = reduce(a[i]);
    Symbol hi = reduce(b[i]);
    if (lo.value > hi.value) std::swap(lo, hi);
    if (hi.value - lo.value <= 1) continue;
    const double gap = cell_edges(hi).first - cell_edges(lo).second;
    sum += gap * gap;
  }
  return std::sqrt(static_cast<double>(original_length) /
                   static_cast<double>(a.size())) *
         std::sqrt(sum);
}

std::vector<double> word_midpoints(const IsaxWord& word, double edge_margin) {
  std::vector<double> out;
  out.reserve(word.size());
  for (const Symbol& s : word.symbols) {
    check_symbol(s);
    if (s.cardinality == 1) {
      out.push_back(0.0);
      continue;
    }
    const auto [lower, upper] = cell_edges(s);
    if (std::isinf(lower)) {
      out.push_back(upper - edge_margin);
    } else if (std::isinf(upper)) {
      out.push_back(lower + edge_margin);
    } else {
      out.push_back(0.5 * (lower + upper));
    }
  }
  return out;
}

std::string to_string(const IsaxWord& word) {
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(word[i].value);
    out += '/';
    out += std::to_string(word[i].cardinality);
  }
  return out;
}

IsaxWord parse_word(std::string_view text) {
  IsaxWord word;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto token = text.substr(0, comma);
    const auto slash = token.find('/');
    if (slash == std::string_view::npos) {
      throw InvalidArgument("malformed iSAX symbol '" + std::string(token) + "'");
    }
    Symbol s;
    const auto v = token.substr(0, slash);
    const auto c = token.substr(slash + 1);
    auto r1 = std::from_chars(v.data(), v.data() + v.size(), s.value);
    auto r2 = std::from_chars(c.data(), c.data() + c.size(), s.cardinality);
    if (r1.ec != std::errc{} || r1.ptr != v.data() + v.size() ||
        r2.ec != std::errc{} || r2.ptr != c.data() + c.size()) {
      throw InvalidArgument("malformed iSAX symbol '" + std::string(token) + "'");
    }
    check_symbol(s);
    word.symbols.push_back(s);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return word;
}

}  // namespace cipher
