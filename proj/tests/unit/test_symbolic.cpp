#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "cipher/error.hpp"
#include "cipher/symbolic.hpp"
#include "normal.hpp"
#include "paa.hpp"

namespace cipher {
namespace {

// Values frozen from an independent inverse-normal implementation.
constexpr double kQ1of4 = -0.6744897501960817;
constexpr double kQ1of3 = -0.43072729929545756;
constexpr double kQ1of8 = -1.1503493803760079;

TEST(Paa, ExactSegmentMeans) {
  EXPECT_EQ(paa(std::vector<double>{1, 1, 2, 2}, 2).coefficients, (std::vector<double>{1, 2}));
}

TEST(Paa, WordSizeEqualToLengthIsIdentity) {
  const std::vector<double> v{3, -1, 4, 1.5};
  EXPECT_EQ(paa(v, 4).coefficients, v);
}

TEST(Paa, FractionalSegmentOfRamp) {
  std::vector<double> ramp(2100);
  std::iota(ramp.begin(), ramp.end(), 0.0);
  const auto p = paa(ramp, 8);
  // Segment 0 covers samples 0..261 fully and half of sample 262:
  // (261 * 262 / 2 + 131) / 262.5.
  EXPECT_NEAR(p.coefficients[0], 34322.0 / 262.5, 1e-9);
  EXPECT_NEAR(p.coefficients[0], oracle::paa(ramp, 8)[0], 1e-9);
}

TEST(Paa, MatchesReplicationOracleAndPreservesMean) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> d(0, 4);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 8 + rng() % 300;
    const std::size_t w = 1 + rng() % 8;
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    const auto got = paa(v, w).coefficients;
    const auto want = oracle::paa(v, w);
    for (std::size_t j = 0; j < w; ++j) EXPECT_NEAR(got[j], want[j], 1e-9);
    const double mean_in = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
    const double mean_out = std::accumulate(got.begin(), got.end(), 0.0) / static_cast<double>(w);
    EXPECT_NEAR(mean_in, mean_out, 1e-9);
  }
}

TEST(Paa, RejectsBadArguments) {
  EXPECT_THROW(paa(std::vector<double>{}, 1), InvalidArgument);
  EXPECT_THROW(paa(std::vector<double>{1, 2}, 3), InvalidArgument);
  EXPECT_THROW(paa(std::vector<double>{1, 2}, 0), InvalidArgument);
}

TEST(Breakpoints, Cardinality2IsMedian) {
  EXPECT_EQ(breakpoints(2).thresholds, (std::vector<double>{0.0}));
}

TEST(Breakpoints, Cardinality4) {
  const auto& t = breakpoints(4).thresholds;
  ASSERT_EQ(t.size(), 3u);
  EXPECT_NEAR(t[0], kQ1of4, 1e-12);
  EXPECT_EQ(t[1], 0.0);
  EXPECT_EQ(t[2], -t[0]);
}

TEST(Breakpoints, Cardinality8SymmetricWithZeroMiddle) {
  const auto& t = breakpoints(8).thresholds;
  ASSERT_EQ(t.size(), 7u);
  EXPECT_EQ(t[3], 0.0);
  for (std::size_t k = 0; k < 7; ++k) EXPECT_EQ(t[k], -t[6 - k]);
  EXPECT_NEAR(t[0], kQ1of8, 1e-12);
}

TEST(Breakpoints, OddAlphabet) {
  const auto& t = breakpoints(3).thresholds;
  ASSERT_EQ(t.size(), 2u);
  EXPECT_NEAR(t[0], kQ1of3, 1e-12);
  EXPECT_EQ(t[1], -t[0]);
}

TEST(Breakpoints, MatchBisectionOracleAcrossPowersOfTwo) {
  for (std::uint32_t c = 2; c <= 1024; c *= 2) {
    const auto& got = breakpoints(c).thresholds;
    const auto want = oracle::breakpoints(c);
    for (std::size_t k = 0; k < got.size(); ++k) EXPECT_NEAR(got[k], want[k], 1e-9) << c;
    EXPECT_TRUE(std::is_sorted(got.begin(), got.end()));
  }
}

TEST(Breakpoints, RejectsOutOfRange) {
  EXPECT_THROW(breakpoints(1), ConfigError);
  EXPECT_THROW(breakpoints(kMaxSupportedCardinality + 1), ConfigError);
}

TEST(Sax, SignSplitAtCardinality2) {
  const auto w = sax(PaaVector{{-1.0, 1.0}, 2}, 2);
  EXPECT_EQ(w[0].value, 0u);
  EXPECT_EQ(w[1].value, 1u);
}

TEST(Sax, ValueOnThresholdGoesUp) { EXPECT_EQ(discretize(0.0, 2), 1u); }

TEST(Sax, Cardinality4Cells) {
  const auto w = sax(PaaVector{{-0.7, -0.1, 0.1, 0.7}, 4}, 4);
  for (std::uint32_t i = 0; i < 4; ++i) {
    EXPECT_EQ(w[i].value, i);
    EXPECT_EQ(w[i].cardinality, 4u);
  }
}

TEST(Sax, NonPowerOfTwoCardinalityRejected) {
  EXPECT_THROW(sax(PaaVector{{0.0}, 1}, 3), ConfigError);
}

// Interval-inclusion view of containment: symbol v of cardinality c is the
// probability cell [v/c, (v+1)/c).
bool cell_inside(const Symbol& coarse, const Symbol& fine) {
  const auto cc = static_cast<std::uint64_t>(coarse.cardinality);
  const auto fc = static_cast<std::uint64_t>(fine.cardinality);
  return coarse.value * fc <= fine.value * cc &&
         (fine.value + 1ull) * cc <= (coarse.value + 1ull) * fc;
}

std::vector<Symbol> all_symbols(std::uint32_t max_card) {
  std::vector<Symbol> out;
  for (std::uint32_t c = 1; c <= max_card; c *= 2) {
    for (std::uint32_t v = 0; v < c; ++v) out.push_back({v, c});
  }
  return out;
}

TEST(Contains, Examples) {
  const IsaxWord w{{{1, 2}, {3, 4}}};
  EXPECT_TRUE(contains(w, w));
  EXPECT_TRUE(contains(IsaxWord{{{1, 2}}}, IsaxWord{{{3, 4}}}));
  EXPECT_FALSE(contains(IsaxWord{{{0, 2}}}, IsaxWord{{{2, 4}}}));
  EXPECT_THROW(contains(IsaxWord{{{0, 2}}}, w), InvalidArgument);
}

TEST(Contains, MatchesIntervalOracleAndIsTransitive) {
  const auto syms = all_symbols(8);
  std::vector<IsaxWord> words;
  for (const auto& a : syms) {
    for (const auto& b : syms) words.push_back(IsaxWord{{a, b}});
  }
  for (const auto& a : words) {
    for (const auto& b : words) {
      const bool want = cell_inside(a[0], b[0]) && cell_inside(a[1], b[1]);
      ASSERT_EQ(contains(a, b), want) << to_string(a) << " vs " << to_string(b);
    }
  }
  std::mt19937_64 rng(8);
  for (int t = 0; t < 200000; ++t) {
    const auto& a = words[rng() % words.size()];
    const auto& b = words[rng() % words.size()];
    const auto& c = words[rng() % words.size()];
    if (contains(a, b) && contains(b, c)) {
      ASSERT_TRUE(contains(a, c));
    }
  }
}

TEST(Promote, RefinesOnePositionAndStaysContained) {
  const auto w = sax(PaaVector{{-0.3, 0.9}, 2}, 2);
  const auto p = promote(w, 0, -0.3, 64);
  EXPECT_EQ(p[0].cardinality, 4u);
  EXPECT_EQ(p[0].value, 1u);
  EXPECT_EQ(p[1], w[1]);
  EXPECT_TRUE(contains(w, p));
  const auto [lo, hi] = split_children(w, 1, 64);
  EXPECT_TRUE(contains(w, lo) && contains(w, hi));
  EXPECT_EQ(hi[1].value, lo[1].value + 1);
  EXPECT_THROW(promote(IsaxWord{{{0, 4}}}, 0, -1.0, 4), InvalidArgument);
}

TEST(Mindist, Examples) {
  const IsaxWord a{{{0, 4}, {2, 4}, {1, 4}, {3, 4}}};
  EXPECT_EQ(mindist(a, a, 16), 0.0);
  IsaxWord adjacent = a;
  adjacent[0] = {1, 4};
  EXPECT_EQ(mindist(a, adjacent, 16), 0.0);
  IsaxWord far = a;
  far[0] = {3, 4};
  // sqrt(16/4) * (0.6745 - (-0.6745))
  EXPECT_NEAR(mindist(a, far, 16), 2.0 * (2.0 * -kQ1of4), 1e-12);
  EXPECT_NEAR(mindist(a, far, 16), 2.698, 1e-3);
  EXPECT_EQ(mindist(a, far, 16), mindist(far, a, 16));
}

TEST(Mindist, LowerBoundsEuclideanAtCommonCardinalities) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> d(0, 1);
  for (int t = 0; t < 3000; ++t) {
    const std::size_t n = 16 + rng() % 200;
    std::vector<double> x(n), y(n);
    for (auto& v : x) v += d(rng);
    for (auto& v : y) v += d(rng);
    double ed = 0;
    for (std::size_t i = 0; i < n; ++i) ed += (x[i] - y[i]) * (x[i] - y[i]);
    ed = std::sqrt(ed);
    for (std::size_t w : {4u, 8u}) {
      const auto px = paa(x, w);
      const auto py = paa(y, w);
      for (std::uint32_t c : {4u, 8u, 16u}) {
        ASSERT_LE(mindist(sax(px, c), sax(py, c), n), ed * (1 + 1e-12));
      }
    }
  }
}

TEST(Mindist, MonotoneUnderPromotion) {
  std::mt19937_64 rng(32);
  std::normal_distribution<double> d(0, 1);
  for (int t = 0; t < 1000; ++t) {
    PaaVector a{{d(rng), d(rng), d(rng), d(rng)}, 64};
    PaaVector b{{d(rng), d(rng), d(rng), d(rng)}, 64};
    auto wa = sax(a, 2);
    auto wb = sax(b, 2);
    double prev = mindist(wa, wb, 64);
    for (int step = 0; step < 12; ++step) {
      const std::size_t pos = step % 4;
      wa = promote(wa, pos, a.coefficients[pos], 256);
      wb = promote(wb, pos, b.coefficients[pos], 256);
      const double next = mindist(wa, wb, 64);
      ASSERT_GE(next, prev - 1e-12);
      prev = next;
    }
  }
}

TEST(Midpoints, Examples) {
  const auto m2 = word_midpoints(IsaxWord{{{0, 2}, {1, 2}}}, 0.5);
  EXPECT_EQ(m2, (std::vector<double>{-0.5, 0.5}));
  const auto m4 = word_midpoints(IsaxWord{{{1, 4}}});
  EXPECT_NEAR(m4[0], kQ1of4 / 2.0, 1e-12);
  EXPECT_NEAR(m4[0], -0.3373, 1e-4);
  EXPECT_EQ(word_midpoints(universal_word(2)), (std::vector<double>{0.0, 0.0}));
}

TEST(Midpoints, ContainedWordsDifferByLessThanCellWidth) {
  for (std::uint32_t cc = 2; cc <= 16; cc *= 2) {
    const auto& tc = breakpoints(cc).thresholds;
    for (std::uint32_t v = 1; v + 1 < cc; ++v) {  // bounded coarse cells
      const double width = tc[v] - tc[v - 1];
      const double mc = word_midpoints(IsaxWord{{{v, cc}}})[0];
      for (std::uint32_t fc = cc * 2; fc <= 64; fc *= 2) {
        const std::uint32_t ratio = fc / cc;
        for (std::uint32_t f = v * ratio; f < (v + 1) * ratio; ++f) {
          const double mf = word_midpoints(IsaxWord{{{f, fc}}})[0];
          EXPECT_LT(std::abs(mf - mc), width);
        }
      }
    }
  }
}

TEST(WordText, RoundTrip) {
  const IsaxWord w{{{1, 4}, {3, 4}, {0, 8}, {0, 1}}};
  EXPECT_EQ(to_string(w), "1/4,3/4,0/8,0/1");
  EXPECT_EQ(parse_word(to_string(w)), w);
  EXPECT_THROW(parse_word("5/4"), InvalidArgument);
  EXPECT_THROW(parse_word("1/3"), InvalidArgument);
  EXPECT_THROW(parse_word("x"), InvalidArgument);
}

}  // namespace
}  // namespace cipher
