#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cipher/cluster.hpp"
#include "cipher/ingest.hpp"
#include "cipher/isax_index.hpp"
#include "cipher/preprocess.hpp"

namespace cipher {

struct DatasetConfig {
  /// Source tables, oldest first. Relative paths resolve against the config
  /// file's directory.
  std::vector<std::filesystem::path> paths;
  std::vector<ChannelSpec> channels;
  std::int64_t cadence_seconds = 60;
};

struct WindowConfig {
  /// Channel that is windowed, compressed and clustered. The other channels
  /// ride along for expert review.
  std::string channel;
  std::int64_t chunk_seconds = 35 * 3600;
  std::int64_t stride_seconds = 35 * 3600;
  double max_missing = 0.1;
};

struct SymbolicConfig {
  IsaxIndexParams index;
  double edge_margin = 0.5;
};

struct ClusterConfig {
  std::size_t level = 0;
  ClusterParams params;
};

struct AnnotateConfig {
  std::size_t representatives = 5;
  std::uint64_t seed = 0;
  std::vector<std::string> taxonomy{"CME", "SIR", "quiet", "ambiguous", "other"};
};

struct PipelineConfig {
  DatasetConfig dataset;
  WindowConfig window;
  PreprocessConfig preprocess;
  SymbolicConfig symbolic;
  ClusterConfig cluster;
  AnnotateConfig annotate;

  std::size_t chunk_samples() const {
    return static_cast<std::size_t>(window.chunk_seconds / dataset.cadence_seconds);
  }
  const ChannelSpec& primary_channel() const;

  /// Throws ConfigError listing every violated bound.
  void validate() const;
};

/// Parses YAML config text. Unknown keys, missing required keys
/// (dataset.channels, window.channel, annotate.seed) and out-of-range values
/// throw ConfigError with one "field: problem" line per diagnostic.
PipelineConfig parse_config(const std::string& yaml_text,
                            const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// Effective configuration with every default filled in. Paths are written
/// as absolute paths so the snapshot is usable from any directory.
std::string to_yaml(const PipelineConfig& config);

}  // namespace cipher
