#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cipher/error.hpp"
#include "cipher/pipeline.hpp"
#include "cipher/stores.hpp"
#include "project_fixture.hpp"

namespace cipher {
namespace {

TEST(Stage, NamesRoundTrip) {
  for (Stage s : {Stage::kIngest, Stage::kWindow, Stage::kPreprocess, Stage::kIndex,
                  Stage::kCluster, Stage::kSummarize, Stage::kExport}) {
    EXPECT_EQ(parse_stage(to_string(s)), s);
  }
  EXPECT_THROW(parse_stage("everything"), ConfigError);
}

TEST(Pipeline, ClusterBeforeIndexNamesIndexStage) {
  testing::TempProject p;
  const auto config = testing::synthetic_config();
  run_stage(Stage::kIngest, config, p.path());
  run_stage(Stage::kWindow, config, p.path());
  run_stage(Stage::kPreprocess, config, p.path());
  try {
    run_stage(Stage::kCluster, config, p.path());
    FAIL() << "cluster ran without an index";
  } catch (const MissingArtifactError& e) {
    EXPECT_EQ(e.stage(), "index");
    EXPECT_EQ(e.artifact(), store::kIndex);
  }
}

TEST(Pipeline, SyntheticRunProducesStoresAndClusters) {
  testing::TempProject p;
  std::ostringstream log;
  run_pipeline(testing::synthetic_config(), p.path(), {&log});
  for (const char* name : {store::kConfig, store::kSeries, store::kWindows, store::kPreprocessed,
                           store::kIndex, store::kWords, store::kAssignments,
                           store::kCondensedTree, store::kSummaries}) {
    EXPECT_TRUE(std::filesystem::exists(p.path() / name)) << name;
  }
  std::ifstream in(p.path() / store::kAssignments);
  const auto rows = read_assignments(in);
  std::set<int> clusters;
  for (const auto& r : rows) {
    if (r.cluster != kNoise) clusters.insert(r.cluster);
  }
  EXPECT_GE(clusters.size(), 2u);
  EXPECT_FALSE(log.str().empty());
  EXPECT_EQ(summaries_from_json(read_file(p.path() / store::kSummaries)).size(),
            clusters.size());
  const auto tree = nlohmann::json::parse(read_file(p.path() / store::kCondensedTree));
  EXPECT_TRUE(tree.is_object());
}

TEST(Pipeline, ResolveConfigFallsBackToSnapshot) {
  testing::TempProject p;
  EXPECT_THROW(resolve_config(std::nullopt, p.path()), ConfigError);
  const auto config = testing::synthetic_config();
  run_stage(Stage::kIngest, config, p.path());
  EXPECT_EQ(to_yaml(resolve_config(std::nullopt, p.path())), to_yaml(config));
}

TEST(Pipeline, ExportWithoutLabelsWritesHeaderOnlyCatalog) {
  testing::TempProject p;
  const auto config = testing::synthetic_config();
  run_pipeline(config, p.path());
  run_stage(Stage::kExport, config, p.path());
  const auto text = read_file(p.path() / store::kCatalog);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
}

TimeSeries series(UtcSeconds start, std::size_t n, std::int64_t cadence = 60) {
  return TimeSeries{ChannelSpec{"Np", "n/cc", 5, {}}, start, cadence,
                    std::vector<double>(n, 1.0), std::vector<std::uint8_t>(n, 0)};
}

TEST(MergeSeries, GapBetweenFilesIsMissing) {
  const auto merged = merge_series({{series(0, 3)}, {series(600, 2)}});
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_EQ(merged[0].size(), 12u);
  EXPECT_EQ(merged[0].missing[3], 1);
  EXPECT_EQ(merged[0].missing[10], 0);
}

TEST(MergeSeries, OverlapAndMisalignmentRejected) {
  EXPECT_THROW(merge_series({{series(0, 10)}, {series(300, 10)}}), StructuralError);
  EXPECT_THROW(merge_series({{series(0, 3)}, {series(1000, 3)}}), StructuralError);
  EXPECT_THROW(merge_series({{series(0, 3)}, {series(600, 3, 120)}}), StructuralError);
}

#ifdef CIPHER_CLI
struct CliResult {
  int status;
  std::string err;
};

CliResult run_cli(const std::string& args, const std::filesystem::path& scratch) {
  const auto err_path = scratch / "stderr.txt";
  const std::string cmd = std::string(CIPHER_CLI) + " " + args + " 2>" + err_path.string() +
                          " >/dev/null";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, read_file(err_path)};
}

TEST(Cli, MissingArtifactErrorLine) {
  testing::TempProject p;
  const auto project = p.path() / "proj";
  const auto config = testing::source_dir() / "config" / "synthetic.yaml";
  const auto r = run_cli("cluster --config " + config.string() + " --project " +
                             project.string(),
                         p.path());
  EXPECT_EQ(r.status, 4);
  const auto line = nlohmann::json::parse(r.err.substr(0, r.err.find('\n')));
  EXPECT_EQ(line.at("error"), "missing_artifact");
  // The nearest missing prerequisite is reported.
  EXPECT_EQ(line.at("stage"), "index");
}

TEST(Cli, ConfigErrorLine) {
  testing::TempProject p;
  const auto r = run_cli("run --project " + (p.path() / "proj").string(), p.path());
  EXPECT_EQ(r.status, 3);
  EXPECT_EQ(nlohmann::json::parse(r.err.substr(0, r.err.find('\n'))).at("error"), "config");
}
#endif

}  // namespace
}  // namespace cipher
