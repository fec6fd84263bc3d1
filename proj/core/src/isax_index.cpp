#include "cipher/isax_index.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "cipher/error.hpp"

namespace cipher {

void IsaxIndexParams::validate() const {
  if (word_size == 0) throw ConfigError("symbolic.word_size must be >= 1");
  if (base_cardinality < 2 || !is_power_of_two(base_cardinality)) {
    throw ConfigError("symbolic.base_cardinality must be a power of two >= 2");
  }
  if (max_cardinality < base_cardinality || !is_power_of_two(max_cardinality) ||
      max_cardinality > kMaxSupportedCardinality) {
    throw ConfigError(
        "symbolic.max_cardinality must be a power of two in [base_cardinality, " +
        std::to_string(kMaxSupportedCardinality) + "]");
  }
  if (leaf_capacity == 0) throw ConfigError("symbolic.leaf_capacity must be >= 1");
}

IsaxIndex::IsaxIndex(IsaxIndexParams params)
    : params_(params), root_(std::make_unique<Node>()) {
  params_.validate();
  root_->prefix = universal_word(params_.word_size);
}

IsaxWord IsaxIndex::child_key(const Node& node, bool is_root, const Entry& e) const {
  if (is_root) return sax(e.paa, params_.base_cardinality);
  const std::size_t pos = *node.split_position;
  return promote(node.prefix, pos, e.paa.coefficients[pos], params_.max_cardinality);
}

void IsaxIndex::split(Node& node, bool is_root) {
  if (!is_root) {
    std::optional<std::size_t> pos;
    for (std::size_t i = 0; i < node.prefix.size(); ++i) {
      const auto card = node.prefix[i].cardinality;
      if (card >= params_.max_cardinality) continue;
      if (!pos || card < node.prefix[*pos].cardinality) pos = i;
    }
    if (!pos) return;  // every position at max cardinality
    node.split_position = pos;
  }
  auto entries = std::move(node.entries);
  node.entries.clear();
  for (auto& e : entries) {
    auto key = child_key(node, is_root, e);
    auto& child = node.children[key];
    if (!child) {
      child = std::make_unique<Node>();
      child->prefix = std::move(key);
    }
    child->entries.push_back(std::move(e));
  }
  for (auto& [key, child] : node.children) {
    if (child->entries.size() > params_.leaf_capacity) split(*child, false);
  }
}

void IsaxIndex::insert(WindowId id, PaaVector paa) {
  if (paa.size() != params_.word_size) {
    throw InvalidArgument("PAA length " + std::to_string(paa.size()) +
                          " does not match index word size " +
                          std::to_string(params_.word_size));
  }
  if (ids_.count(id)) {
    throw StructuralError("duplicate window id " + std::to_string(id));
  }
  Entry entry{id, std::move(paa)};
  Node* node = root_.get();
  bool is_root = true;
  while (!node->is_leaf()) {
    auto key = child_key(*node, is_root, entry);
    auto& child = node->children[key];
    if (!child) {
      child = std::make_unique<Node>();
      child->prefix = std::move(key);
    }
    node = child.get();
    is_root = false;
  }
  ids_.insert(id);
  node->entries.push_back(std::move(entry));
  if (node->entries.size() > params_.leaf_capacity) split(*node, is_root);
}

std::vector<std::pair<WindowId, IsaxWord>> IsaxIndex::level_words(
    std::size_t level) const {
  std::vector<std::pair<WindowId, IsaxWord>> out;
  out.reserve(size());
  if (root_->is_leaf()) {
    for (const auto& e : root_->entries) {
      out.emplace_back(e.id, sax(e.paa, params_.base_cardinality));
    }
  } else {
    // Root children sit at depth 1 and carry the level-0 word.
    const std::size_t target = level + 1;
    auto walk = [&](auto&& self, const Node& node, std::size_t depth,
                    const IsaxWord* chosen) -> void {
      if (depth == target) chosen = &node.prefix;
      if (node.is_leaf()) {
        const IsaxWord& word = chosen ? *chosen : node.prefix;
        for (const auto& e : node.entries) out.emplace_back(e.id, word);
        return;
      }
      for (const auto& [key, child] : node.children) {
        self(self, *child, depth + 1, chosen);
      }
    };
    for (const auto& [key, child] : root_->children) walk(walk, *child, 1, nullptr);
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

std::size_t IsaxIndex::max_level() const {
  auto depth = [](auto&& self, const Node& node) -> std::size_t {
    std::size_t best = 0;
    for (const auto& [key, child] : node.children) {
      best = std::max(best, 1 + self(self, *child));
    }
    return best;
  };
  const std::size_t d = depth(depth, *root_);
  return d == 0 ? 0 : d - 1;
}

namespace {

constexpr const char* kMagic = "CIPHER-ISAX";
constexpr int kFormatVersion = 1;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void IsaxIndex::save(std::ostream& out) const {
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "word_size " << params_.word_size << '\n';
  out << "base_cardinality " << params_.base_cardinality << '\n';
  out << "max_cardinality " << params_.max_cardinality << '\n';
  out << "leaf_capacity " << params_.leaf_capacity << '\n';
  out << "entries " << size() << '\n';
  auto write = [&](auto&& self, const Node& node) -> void {
    if (node.is_leaf()) {
      out << "L - " << to_string(node.prefix) << ' ' << node.entries.size() << '\n';
      for (const auto& e : node.entries) {
        out << "E " << e.id << ' ' << e.paa.source_length;
        for (double c : e.paa.coefficients) out << ' ' << format_double(c);
        out << '\n';
      }
      return;
    }
    out << "I "
        << (node.split_position ? std::to_string(*node.split_position) : "-")
        << ' ' << to_string(node.prefix) << ' ' << node.children.size() << '\n';
    for (const auto& [key, child] : node.children) self(self, *child);
  };
  write(write, *root_);
}

IsaxIndex IsaxIndex::load(std::istream& in) {
  std::size_t line_no = 0;
  std::string line;
  auto next_line = [&]() -> std::istringstream {
    if (!std::getline(in, line)) {
      throw ParseError(line_no + 1, "unexpected end of index file");
    }
    ++line_no;
    return std::istringstream(line);
  };
  auto expect_key = [&](const char* key) {
    auto ss = next_line();
    std::string k;
    std::uint64_t v = 0;
    if (!(ss >> k >> v) || k != key) {
      throw ParseError(line_no, std::string("expected '") + key + "'");
    }
    return v;
  };

  {
    auto ss = next_line();
    std::string magic;
    int version = 0;
    if (!(ss >> magic >> version) || magic != kMagic) {
      throw ParseError(line_no, "not a CIPHER iSAX index file");
    }
    if (version != kFormatVersion) {
      throw ParseError(line_no, "unsupported index format version " +
                                    std::to_string(version));
    }
  }
  IsaxIndexParams params;
  params.word_size = expect_key("word_size");
  params.base_cardinality = static_cast<std::uint32_t>(expect_key("base_cardinality"));
  params.max_cardinality = static_cast<std::uint32_t>(expect_key("max_cardinality"));
  params.leaf_capacity = expect_key("leaf_capacity");
  const auto expected_entries = expect_key("entries");

  IsaxIndex index(params);
  auto read = [&](auto&& self, Node& node) -> void {
    auto ss = next_line();
    std::string kind, split, word;
    std::size_t count = 0;
    if (!(ss >> kind >> split >> word >> count) || (kind != "L" && kind != "I")) {
      throw ParseError(line_no, "malformed node record");
    }
    try {
      node.prefix = parse_word(word);
    } catch (const InvalidArgument& e) {
      throw ParseError(line_no, e.what());
    }
    if (node.prefix.size() != params.word_size) {
      throw ParseError(line_no, "node word has the wrong size");
    }
    if (kind == "L") {
      for (std::size_t i = 0; i < count; ++i) {
        auto es = next_line();
        std::string tag;
        Entry e;
        if (!(es >> tag >> e.id >> e.paa.source_length) || tag != "E") {
          throw ParseError(line_no, "malformed entry record");
        }
        e.paa.coefficients.resize(params.word_size);
        for (auto& c : e.paa.coefficients) {
          std::string tok;
          if (!(es >> tok)) throw ParseError(line_no, "truncated entry record");
          c = std::stod(tok);
        }
        if (!index.ids_.insert(e.id).second) {
          throw StructuralError("duplicate window id " + std::to_string(e.id) +
                                " in index file");
        }
        node.entries.push_back(std::move(e));
      }
      return;
    }
    if (split != "-") node.split_position = std::stoul(split);
    for (std::size_t i = 0; i < count; ++i) {
      auto child = std::make_unique<Node>();
      self(self, *child);
      auto key = child->prefix;
      node.children.emplace(std::move(key), std::move(child));
    }
  };
  read(read, *index.root_);
  if (index.size() != expected_entries) {
    throw StructuralError("index file declares " + std::to_string(expected_entries) +
                          " entries but holds " + std::to_string(index.size()));
  }
  return index;
}

}  // namespace cipher
