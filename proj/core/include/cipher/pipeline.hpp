#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "cipher/config.hpp"
#include "cipher/ingest.hpp"

namespace cipher {

/// Pipeline stages in execution order. Each reads the artifacts of earlier
/// stages from the project directory and (over)writes its own.
enum class Stage { kIngest, kWindow, kPreprocess, kIndex, kCluster, kSummarize, kExport };

std::string_view to_string(Stage s);
/// Throws ConfigError for an unknown name.
Stage parse_stage(std::string_view name);

struct StageOptions {
  /// Progress lines go here when set.
  std::ostream* log = nullptr;
};

/// Runs one stage. Also writes the effective config snapshot (config.yaml)
/// into the project. Throws MissingArtifactError when an input artifact is
/// absent.
void run_stage(Stage stage, const PipelineConfig& config,
               const std::filesystem::path& project, const StageOptions& options = {});

/// ingest -> window -> preprocess -> index -> cluster -> summarize.
void run_pipeline(const PipelineConfig& config, const std::filesystem::path& project,
                  const StageOptions& options = {});

/// `config_path` when given, otherwise the project's config.yaml snapshot.
PipelineConfig resolve_config(const std::optional<std::filesystem::path>& config_path,
                              const std::filesystem::path& project);

/// Parses every dataset file and merges them onto one grid per channel.
/// Files may leave gaps between them but must not overlap.
std::vector<TimeSeries> load_dataset(const DatasetConfig& dataset);

/// Joins per-file series (same channels, same cadence) onto one grid.
std::vector<TimeSeries> merge_series(const std::vector<std::vector<TimeSeries>>& parts);

}  // namespace cipher
