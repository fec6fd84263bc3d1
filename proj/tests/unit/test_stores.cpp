#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "cipher/error.hpp"
#include "cipher/stores.hpp"
#include "project_fixture.hpp"

namespace cipher {
namespace {

TEST(Stores, SeriesRoundTrip) {
  TimeSeries a{ChannelSpec{"Np", "n/cc", 25, {999.99, 9999.99}}, 1615420800, 60,
               {1.5, -2.25, 999.99, 1e-300}, {0, 0, 1, 0}};
  TimeSeries b{ChannelSpec{"V", "km/s", 21, {}}, 1615420800, 60, {400, 401, 402, 403},
               {0, 0, 0, 0}};
  const auto out = decode_series(encode_series({a, b}));
  ASSERT_EQ(out.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& want = k ? b : a;
    EXPECT_EQ(out[k].channel.name, want.channel.name);
    EXPECT_EQ(out[k].channel.unit, want.channel.unit);
    EXPECT_EQ(out[k].channel.column, want.channel.column);
    EXPECT_EQ(out[k].channel.fill_values, want.channel.fill_values);
    EXPECT_EQ(out[k].start, want.start);
    EXPECT_EQ(out[k].cadence, want.cadence);
    EXPECT_EQ(out[k].values, want.values);
    EXPECT_EQ(out[k].missing, want.missing);
  }
}

TEST(Stores, TruncatedBinaryRejected) {
  TimeSeries a{ChannelSpec{"Np", "n/cc", 5, {}}, 0, 60, {1, 2, 3}, {0, 0, 0}};
  const auto bytes = encode_series({a});
  EXPECT_THROW(decode_series(bytes.substr(0, bytes.size() - 3)), Error);
  EXPECT_THROW(decode_series("garbage"), Error);
}

TEST(Stores, WindowsRoundTrip) {
  const std::vector<Window> w{{0, "Np", 1615420800, 60, 0, 2100, 0.0},
                              {3, "Np", 1615798800, 60, 6300, 2100, 0.0952380952380952}};
  std::ostringstream out;
  write_windows(out, w);
  std::istringstream in(out.str());
  const auto back = read_windows(in);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(back[k].id, w[k].id);
    EXPECT_EQ(back[k].channel, w[k].channel);
    EXPECT_EQ(back[k].start, w[k].start);
    EXPECT_EQ(back[k].offset, w[k].offset);
    EXPECT_EQ(back[k].length, w[k].length);
    EXPECT_EQ(back[k].missing_fraction, w[k].missing_fraction);
  }
}

TEST(Stores, PreprocessedRoundTrip) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  std::vector<PreprocessedRecord> recs(3);
  for (std::size_t k = 0; k < recs.size(); ++k) {
    recs[k].id = 10 * k;
    recs[k].steps = {k == 0, true, k != 2, k == 2};
    recs[k].values.resize(17);
    for (auto& v : recs[k].values) v = d(rng);
  }
  const auto back = decode_preprocessed(encode_preprocessed(recs));
  ASSERT_EQ(back.size(), recs.size());
  for (std::size_t k = 0; k < recs.size(); ++k) {
    EXPECT_EQ(back[k].id, recs[k].id);
    EXPECT_EQ(back[k].values, recs[k].values);
    EXPECT_EQ(back[k].steps.detrended, recs[k].steps.detrended);
    EXPECT_EQ(back[k].steps.normalized, recs[k].steps.normalized);
    EXPECT_EQ(back[k].steps.flat, recs[k].steps.flat);
  }
}

TEST(Stores, WordsAndAssignmentsRoundTrip) {
  const std::vector<std::pair<WindowId, IsaxWord>> words{{0, parse_word("1/4,3/4,0/8")},
                                                         {7, parse_word("0/2,1/2,15/16")}};
  std::ostringstream wo;
  write_words(wo, words);
  std::istringstream wi(wo.str());
  EXPECT_EQ(read_words(wi), words);

  const std::vector<ClusterAssignment> rows{{0, 0, Pass::kPrimary, 1.0},
                                            {1, kNoise, Pass::kRelaxed, 0.0},
                                            {2, 3, Pass::kRelaxed, 0.123456789012345}};
  std::ostringstream ao;
  write_assignments(ao, rows);
  std::istringstream ai(ao.str());
  EXPECT_EQ(read_assignments(ai), rows);
}

TEST(Stores, SummariesRoundTrip) {
  ClusterSummary s{2, 3, {0.1, -0.2}, {-1, -1}, {1, 1.5}, {{"1/4,2/4", 2}, {"0/4,0/4", 1}}};
  const auto back = summaries_from_json(summaries_to_json({s, s}));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0], s);
}

TEST(Stores, RequireArtifactNamesStage) {
  testing::TempProject p;
  try {
    require_artifact(p.path(), store::kIndex, "index");
    FAIL();
  } catch (const MissingArtifactError& e) {
    EXPECT_EQ(e.stage(), "index");
    EXPECT_EQ(e.artifact(), store::kIndex);
  }
  write_file_atomic(p.path() / store::kIndex, "x");
  EXPECT_EQ(read_file(require_artifact(p.path(), store::kIndex, "index")), "x");
}

}  // namespace
}  // namespace cipher
