#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cipher/ingest.hpp"
#include "cipher/symbolic.hpp"

namespace cipher {

struct IsaxIndexParams {
  std::size_t word_size = 8;
  std::uint32_t base_cardinality = 4;
  std::uint32_t max_cardinality = 64;
  std::size_t leaf_capacity = 128;

  void validate() const;
};

/// Multi-resolution iSAX tree.
///
/// The root covers every word. When it overflows it fans out into one child
/// per distinct base-cardinality word. Below that, an overflowing leaf picks
/// the position with the lowest cardinality (lowest index on ties), doubles
/// it, and redistributes its entries between the two refined cells. A leaf
/// whose positions are all at max_cardinality cannot split and may exceed
/// leaf_capacity.
///
/// Not internally synchronized: one writer or any number of readers.
class IsaxIndex {
 public:
  struct Entry {
    WindowId id;
    PaaVector paa;
  };

  struct Node {
    IsaxWord prefix;
    std::optional<std::size_t> split_position;  // set on internal non-root nodes
    std::map<IsaxWord, std::unique_ptr<Node>> children;
    std::vector<Entry> entries;

    bool is_leaf() const noexcept { return children.empty(); }
  };

  explicit IsaxIndex(IsaxIndexParams params);

  const IsaxIndexParams& params() const noexcept { return params_; }
  std::size_t size() const noexcept { return ids_.size(); }
  const Node& root() const noexcept { return *root_; }
  bool contains_id(WindowId id) const { return ids_.count(id) != 0; }

  /// Throws InvalidArgument on a word-size mismatch and StructuralError on a
  /// duplicate id.
  void insert(WindowId id, PaaVector paa);

  /// Word of every entry as seen at `level`. Level 0 is the base-cardinality
  /// word; level k uses the node k steps below the root fan-out, or the
  /// entry's leaf when the path is shorter. Sorted by window id.
  std::vector<std::pair<WindowId, IsaxWord>> level_words(std::size_t level) const;

  /// Depth of the deepest leaf below the root fan-out (0 for an unsplit
  /// index).
  std::size_t max_level() const;

  /// Flat text format, nodes in pre-order. See docs/formats.md.
  void save(std::ostream& out) const;
  /// Throws ParseError or StructuralError on malformed input.
  static IsaxIndex load(std::istream& in);

 private:
  IsaxWord child_key(const Node& node, bool is_root, const Entry& e) const;
  void split(Node& node, bool is_root);

  IsaxIndexParams params_;
  std::unique_ptr<Node> root_;
  std::unordered_set<WindowId> ids_;
};

}  // namespace cipher
