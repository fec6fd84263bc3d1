#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cipher/annotate.hpp"
#include "cipher/cluster.hpp"
#include "cipher/error.hpp"
#include "cipher/ingest.hpp"
#include "cipher/preprocess.hpp"
#include "cipher/symbolic.hpp"

namespace cipher {

/// File names inside a project directory. Formats are described in
/// docs/formats.md.
namespace store {
inline constexpr const char* kConfig = "config.yaml";
inline constexpr const char* kSeries = "series.bin";
inline constexpr const char* kWindows = "windows.csv";
inline constexpr const char* kPreprocessed = "preprocessed.bin";
inline constexpr const char* kIndex = "index.isax";
inline constexpr const char* kWords = "words.csv";
inline constexpr const char* kAssignments = "assignments.csv";
inline constexpr const char* kCondensedTree = "condensed_tree.json";
inline constexpr const char* kSummaries = "summaries.json";
inline constexpr const char* kLabels = "labels.jsonl";
inline constexpr const char* kCatalog = "catalog.csv";
}  // namespace store

/// A required store file is absent. `stage()` names the CLI stage that
/// produces it.
class MissingArtifactError : public Error {
 public:
  MissingArtifactError(std::string artifact, std::string stage)
      : Error("missing " + artifact + ": run stage '" + stage + "' first"),
        artifact_(std::move(artifact)),
        stage_(std::move(stage)) {}
  const std::string& artifact() const noexcept { return artifact_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string artifact_;
  std::string stage_;
};

/// Throws MissingArtifactError when `project / name` does not exist.
std::filesystem::path require_artifact(const std::filesystem::path& project,
                                       const char* name, const char* stage);

/// Writes via a temporary file and rename, so readers never see a partial
/// store.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// series.bin ---------------------------------------------------------------
std::string encode_series(const std::vector<TimeSeries>& series);
std::vector<TimeSeries> decode_series(const std::string& bytes);

// windows.csv --------------------------------------------------------------
void write_windows(std::ostream& out, const std::vector<Window>& windows);
std::vector<Window> read_windows(std::istream& in);

// preprocessed.bin ---------------------------------------------------------
struct PreprocessedRecord {
  WindowId id = 0;
  PreprocessSteps steps;
  std::vector<double> values;
};
std::string encode_preprocessed(const std::vector<PreprocessedRecord>& records);
std::vector<PreprocessedRecord> decode_preprocessed(const std::string& bytes);

// words.csv ----------------------------------------------------------------
void write_words(std::ostream& out, const std::vector<std::pair<WindowId, IsaxWord>>& words);
std::vector<std::pair<WindowId, IsaxWord>> read_words(std::istream& in);

// assignments.csv ----------------------------------------------------------
void write_assignments(std::ostream& out, const std::vector<ClusterAssignment>& rows);
std::vector<ClusterAssignment> read_assignments(std::istream& in);

// summaries.json -----------------------------------------------------------
std::string summaries_to_json(const std::vector<ClusterSummary>& summaries);
std::vector<ClusterSummary> summaries_from_json(const std::string& text);
/// One summary as the JSON object used inside summaries.json and by the API.
std::string summary_to_json(const ClusterSummary& summary);

}  // namespace cipher
