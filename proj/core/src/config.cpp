#include "cipher/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "cipher/error.hpp"
#include "cipher/timeutil.hpp"

namespace cipher {

namespace {

class Diagnostics {
 public:
  void add(const std::string& field, const std::string& problem) {
    lines_.push_back(field + ": " + problem);
  }
  bool empty() const { return lines_.empty(); }
  [[noreturn]] void raise() const {
    std::string msg = "invalid configuration";
    for (const auto& l : lines_) msg += "\n  " + l;
    throw ConfigError(msg);
  }

 private:
  std::vector<std::string> lines_;
};

void check_keys(const YAML::Node& node, const std::string& prefix,
                std::initializer_list<const char*> allowed, Diagnostics& diag) {
  if (!node) return;
  if (!node.IsMap()) {
    diag.add(prefix.empty() ? "<root>" : prefix, "expected a mapping");
    return;
  }
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; })) {
      diag.add(prefix.empty() ? key : prefix + "." + key, "unknown key");
    }
  }
}

template <class T>
void read(const YAML::Node& node, const char* key, const std::string& field, T& out,
          Diagnostics& diag) {
  if (!node || !node[key]) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception&) {
    diag.add(field, "wrong type");
  }
}

void read_duration(const YAML::Node& node, const char* key, const std::string& field,
                   std::int64_t& out, Diagnostics& diag) {
  if (!node || !node[key]) return;
  try {
    out = parse_duration_seconds(node[key].as<std::string>());
  } catch (const std::exception& e) {
    diag.add(field, e.what());
  }
}

std::string duration_text(std::int64_t seconds) {
  if (seconds % 3600 == 0) return std::to_string(seconds / 3600) + "h";
  if (seconds % 60 == 0) return std::to_string(seconds / 60) + "m";
  return std::to_string(seconds) + "s";
}

}  // namespace

const ChannelSpec& PipelineConfig::primary_channel() const {
  for (const auto& c : dataset.channels) {
    if (c.name == window.channel) return c;
  }
  throw ConfigError("window.channel: '" + window.channel + "' is not a dataset channel");
}

void PipelineConfig::validate() const {
  Diagnostics diag;
  if (dataset.channels.empty()) diag.add("dataset.channels", "at least one channel required");
  std::set<std::string> names;
  for (std::size_t i = 0; i < dataset.channels.size(); ++i) {
    const auto& c = dataset.channels[i];
    const std::string field = "dataset.channels[" + std::to_string(i) + "]";
    if (c.name.empty()) diag.add(field + ".name", "must not be empty");
    if (!names.insert(c.name).second) diag.add(field + ".name", "duplicate channel '" + c.name + "'");
  }
  if (dataset.cadence_seconds <= 0) diag.add("dataset.cadence", "must be positive");
  if (window.channel.empty()) {
    diag.add("window.channel", "required");
  } else if (!names.count(window.channel)) {
    diag.add("window.channel", "'" + window.channel + "' is not a dataset channel");
  }
  if (dataset.cadence_seconds > 0) {
    if (window.chunk_seconds <= 0 || window.chunk_seconds % dataset.cadence_seconds != 0) {
      diag.add("window.chunk", "must be a positive multiple of the cadence");
    }
    if (window.stride_seconds <= 0 || window.stride_seconds % dataset.cadence_seconds != 0) {
      diag.add("window.stride", "must be a positive multiple of the cadence");
    }
  }
  if (!(window.max_missing >= 0.0 && window.max_missing <= 1.0)) {
    diag.add("window.max_missing", "must be in [0, 1]");
  }
  const auto guard = [&](const char* field, auto&& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      diag.add(field, e.what());
    }
  };
  guard("preprocess", [&] { preprocess.validate(); });
  if (preprocess.smooth && dataset.cadence_seconds > 0 && window.chunk_seconds > 0 &&
      preprocess.smooth_width > chunk_samples()) {
    diag.add("preprocess.smooth_width", "exceeds the window length");
  }
  guard("symbolic", [&] { symbolic.index.validate(); });
  if (dataset.cadence_seconds > 0 && symbolic.index.word_size > chunk_samples()) {
    diag.add("symbolic.word_size", "exceeds the window length");
  }
  if (!(symbolic.edge_margin > 0.0)) diag.add("symbolic.edge_margin", "must be > 0");
  guard("cluster", [&] { cluster.params.validate(); });
  if (annotate.representatives < 1) diag.add("annotate.representatives", "must be >= 1");
  if (!diag.empty()) diag.raise();
}

PipelineConfig parse_config(const std::string& yaml_text,
                            const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  Diagnostics diag;
  PipelineConfig cfg;
  if (!root || root.IsNull()) {
    diag.add("<root>", "empty configuration");
    diag.raise();
  }
  check_keys(root, "",
             {"dataset", "window", "preprocess", "symbolic", "cluster", "annotate"}, diag);

  const auto ds = root["dataset"];
  check_keys(ds, "dataset", {"paths", "cadence", "channels"}, diag);
  if (ds) {
    if (ds["paths"]) {
      std::vector<std::string> paths;
      read(ds, "paths", "dataset.paths", paths, diag);
      for (const auto& p : paths) {
        std::filesystem::path path(p);
        if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
        cfg.dataset.paths.push_back(path.lexically_normal());
      }
    }
    read_duration(ds, "cadence", "dataset.cadence", cfg.dataset.cadence_seconds, diag);
    const auto chans = ds["channels"];
    if (chans && !chans.IsSequence()) diag.add("dataset.channels", "expected a list");
    if (chans && chans.IsSequence()) {
      for (std::size_t i = 0; i < chans.size(); ++i) {
        const std::string field = "dataset.channels[" + std::to_string(i) + "]";
        const auto c = chans[i];
        check_keys(c, field, {"name", "unit", "column", "fill_values"}, diag);
        ChannelSpec spec;
        read(c, "name", field + ".name", spec.name, diag);
        read(c, "unit", field + ".unit", spec.unit, diag);
        if (!c["column"]) diag.add(field + ".column", "required");
        read(c, "column", field + ".column", spec.column, diag);
        read(c, "fill_values", field + ".fill_values", spec.fill_values, diag);
        cfg.dataset.channels.push_back(std::move(spec));
      }
    }
  }

  const auto win = root["window"];
  check_keys(win, "window", {"channel", "chunk", "stride", "max_missing"}, diag);
  read(win, "channel", "window.channel", cfg.window.channel, diag);
  read_duration(win, "chunk", "window.chunk", cfg.window.chunk_seconds, diag);
  cfg.window.stride_seconds = cfg.window.chunk_seconds;
  read_duration(win, "stride", "window.stride", cfg.window.stride_seconds, diag);
  read(win, "max_missing", "window.max_missing", cfg.window.max_missing, diag);

  const auto pre = root["preprocess"];
  check_keys(pre, "preprocess", {"detrend", "smooth", "smooth_width", "normalize", "std_floor"},
             diag);
  read(pre, "detrend", "preprocess.detrend", cfg.preprocess.detrend, diag);
  read(pre, "smooth", "preprocess.smooth", cfg.preprocess.smooth, diag);
  read(pre, "smooth_width", "preprocess.smooth_width", cfg.preprocess.smooth_width, diag);
  read(pre, "normalize", "preprocess.normalize", cfg.preprocess.normalize, diag);
  read(pre, "std_floor", "preprocess.std_floor", cfg.preprocess.std_floor, diag);

  const auto sym = root["symbolic"];
  check_keys(sym, "symbolic",
             {"word_size", "base_cardinality", "max_cardinality", "leaf_capacity", "edge_margin"},
             diag);
  read(sym, "word_size", "symbolic.word_size", cfg.symbolic.index.word_size, diag);
  read(sym, "base_cardinality", "symbolic.base_cardinality",
       cfg.symbolic.index.base_cardinality, diag);
  read(sym, "max_cardinality", "symbolic.max_cardinality", cfg.symbolic.index.max_cardinality,
       diag);
  read(sym, "leaf_capacity", "symbolic.leaf_capacity", cfg.symbolic.index.leaf_capacity, diag);
  read(sym, "edge_margin", "symbolic.edge_margin", cfg.symbolic.edge_margin, diag);

  const auto cl = root["cluster"];
  check_keys(cl, "cluster",
             {"level", "min_cluster_size", "min_samples", "metric", "recluster_noise",
              "relax_factor", "allow_single_cluster"},
             diag);
  auto& cp = cfg.cluster.params;
  read(cl, "level", "cluster.level", cfg.cluster.level, diag);
  read(cl, "min_cluster_size", "cluster.min_cluster_size", cp.min_cluster_size, diag);
  read(cl, "min_samples", "cluster.min_samples", cp.min_samples, diag);
  if (cl && cl["metric"]) {
    try {
      cp.metric = parse_metric(cl["metric"].as<std::string>());
    } catch (const std::exception& e) {
      diag.add("cluster.metric", e.what());
    }
  }
  read(cl, "recluster_noise", "cluster.recluster_noise", cp.recluster_noise, diag);
  read(cl, "relax_factor", "cluster.relax_factor", cp.relax_factor, diag);
  read(cl, "allow_single_cluster", "cluster.allow_single_cluster", cp.allow_single_cluster,
       diag);

  const auto an = root["annotate"];
  check_keys(an, "annotate", {"representatives", "seed", "taxonomy"}, diag);
  read(an, "representatives", "annotate.representatives", cfg.annotate.representatives, diag);
  if (!an || !an["seed"]) {
    diag.add("annotate.seed", "required (runs must be reproducible)");
  } else {
    read(an, "seed", "annotate.seed", cfg.annotate.seed, diag);
  }
  read(an, "taxonomy", "annotate.taxonomy", cfg.annotate.taxonomy, diag);

  if (!diag.empty()) diag.raise();
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_config(ss.str(), std::filesystem::absolute(base));
}

namespace {

// Shortest text that parses back to the same double.
std::string number(double v) {
  char buf[32];
  return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
}

std::vector<std::string> numbers(const std::vector<double>& values) {
  std::vector<std::string> out;
  for (double v : values) out.push_back(number(v));
  return out;
}

}  // namespace

std::string to_yaml(const PipelineConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;

  out << YAML::Key << "dataset" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "paths" << YAML::Value << YAML::BeginSeq;
  for (const auto& p : c.dataset.paths) {
    out << std::filesystem::absolute(p).lexically_normal().string();
  }
  out << YAML::EndSeq;
  out << YAML::Key << "cadence" << YAML::Value << duration_text(c.dataset.cadence_seconds);
  out << YAML::Key << "channels" << YAML::Value << YAML::BeginSeq;
  for (const auto& ch : c.dataset.channels) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << ch.name;
    out << YAML::Key << "unit" << YAML::Value << ch.unit;
    out << YAML::Key << "column" << YAML::Value << ch.column;
    out << YAML::Key << "fill_values" << YAML::Value << YAML::Flow << numbers(ch.fill_values);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;

  out << YAML::Key << "window" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "channel" << YAML::Value << c.window.channel;
  out << YAML::Key << "chunk" << YAML::Value << duration_text(c.window.chunk_seconds);
  out << YAML::Key << "stride" << YAML::Value << duration_text(c.window.stride_seconds);
  out << YAML::Key << "max_missing" << YAML::Value << number(c.window.max_missing);
  out << YAML::EndMap;

  out << YAML::Key << "preprocess" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "detrend" << YAML::Value << c.preprocess.detrend;
  out << YAML::Key << "smooth" << YAML::Value << c.preprocess.smooth;
  out << YAML::Key << "smooth_width" << YAML::Value << c.preprocess.smooth_width;
  out << YAML::Key << "normalize" << YAML::Value << c.preprocess.normalize;
  out << YAML::Key << "std_floor" << YAML::Value << number(c.preprocess.std_floor);
  out << YAML::EndMap;

  out << YAML::Key << "symbolic" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "word_size" << YAML::Value << c.symbolic.index.word_size;
  out << YAML::Key << "base_cardinality" << YAML::Value << c.symbolic.index.base_cardinality;
  out << YAML::Key << "max_cardinality" << YAML::Value << c.symbolic.index.max_cardinality;
  out << YAML::Key << "leaf_capacity" << YAML::Value << c.symbolic.index.leaf_capacity;
  out << YAML::Key << "edge_margin" << YAML::Value << number(c.symbolic.edge_margin);
  out << YAML::EndMap;

  const auto& cp = c.cluster.params;
  out << YAML::Key << "cluster" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "level" << YAML::Value << c.cluster.level;
  out << YAML::Key << "min_cluster_size" << YAML::Value << cp.min_cluster_size;
  out << YAML::Key << "min_samples" << YAML::Value << cp.min_samples;
  out << YAML::Key << "metric" << YAML::Value << std::string(to_string(cp.metric));
  out << YAML::Key << "recluster_noise" << YAML::Value << cp.recluster_noise;
  out << YAML::Key << "relax_factor" << YAML::Value << number(cp.relax_factor);
  out << YAML::Key << "allow_single_cluster" << YAML::Value << cp.allow_single_cluster;
  out << YAML::EndMap;

  out << YAML::Key << "annotate" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "representatives" << YAML::Value << c.annotate.representatives;
  out << YAML::Key << "seed" << YAML::Value << c.annotate.seed;
  out << YAML::Key << "taxonomy" << YAML::Value << YAML::Flow << c.annotate.taxonomy;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace cipher
