#include <gtest/gtest.h>

#include "cipher/config.hpp"
#include "cipher/error.hpp"
#include "project_fixture.hpp"

namespace cipher {
namespace {

const char* kMinimal = R"(dataset:
  cadence: 1m
  channels:
    - {name: Np, unit: n/cc, column: 5, fill_values: [999.99]}
window:
  channel: Np
  chunk: 2h
  stride: 1h
annotate:
  seed: 3
)";

TEST(Config, DefaultFileMatchesDocumentedDefaults) {
  const auto c = load_config(testing::source_dir() / "config" / "default.yaml");
  EXPECT_EQ(c.window.chunk_seconds, 35 * 3600);
  EXPECT_EQ(c.chunk_samples(), 2100u);
  EXPECT_EQ(c.symbolic.index.word_size, 8u);
  EXPECT_EQ(c.cluster.params.min_cluster_size, 5u);
  EXPECT_EQ(c.cluster.params.min_samples, 5u);
  EXPECT_EQ(c.primary_channel().name, "Np");
  EXPECT_EQ(c.annotate.seed, 20210311u);
}

TEST(Config, MinimalDocumentUsesDefaults) {
  const auto c = parse_config(kMinimal);
  EXPECT_EQ(c.window.chunk_seconds, 7200);
  EXPECT_EQ(c.window.stride_seconds, 3600);
  EXPECT_EQ(c.chunk_samples(), 120u);
  EXPECT_EQ(c.annotate.seed, 3u);
  EXPECT_EQ(c.cluster.params.min_cluster_size, ClusterParams{}.min_cluster_size);
}

TEST(Config, RoundTripIsStable) {
  for (const char* name : {"default.yaml", "synthetic.yaml"}) {
    const auto c = load_config(testing::source_dir() / "config" / name);
    const auto once = to_yaml(c);
    EXPECT_EQ(to_yaml(parse_config(once)), once) << name;
  }
}

TEST(Config, RelativePathsResolveAgainstBaseDir) {
  const auto c = testing::synthetic_config();
  ASSERT_EQ(c.dataset.paths.size(), 1u);
  EXPECT_TRUE(std::filesystem::exists(c.dataset.paths[0]));
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_THROW(parse_config(std::string(kMinimal) + "bogus: 1\n"), ConfigError);
  EXPECT_THROW(parse_config(std::string(kMinimal) + "cluster:\n  min_cluster_sise: 5\n"),
               ConfigError);
}

TEST(Config, MissingSeedRejected) {
  std::string text = kMinimal;
  text.erase(text.find("annotate:"));
  EXPECT_THROW(parse_config(text), ConfigError);
}

TEST(Config, InvalidValuesRejected) {
  auto with = [](std::string from, std::string to) {
    std::string text = kMinimal;
    text.replace(text.find(from), from.size(), to);
    return text;
  };
  EXPECT_THROW(parse_config(with("channel: Np", "channel: V")), ConfigError);
  EXPECT_THROW(parse_config(with("chunk: 2h", "chunk: 90s")), ConfigError);
  EXPECT_THROW(parse_config(with("chunk: 2h", "chunk: soon")), ConfigError);
  EXPECT_THROW(parse_config(std::string(kMinimal) + "cluster:\n  min_cluster_size: 1\n"),
               ConfigError);
  EXPECT_THROW(parse_config("dataset: [\n"), ConfigError);
}

}  // namespace
}  // namespace cipher
