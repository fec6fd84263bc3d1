#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "cipher/error.hpp"
#include "cipher/preprocess.hpp"

namespace cipher {
namespace {

void expect_near(const std::vector<double>& got, const std::vector<double>& want,
                 double tol = 1e-12) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], tol) << i;
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d(3.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

TEST(Detrend, RampBecomesZero) { expect_near(detrend(std::vector<double>{1, 2, 3, 4}), {0, 0, 0, 0}); }

TEST(Detrend, ConstantBecomesZero) { expect_near(detrend(std::vector<double>{7, 7, 7}), {0, 0, 0}); }

TEST(Detrend, LeastSquaresResiduals) {
  // Fit over x = 0..3: slope 0.2, intercept 0.2 -> line [0.2, 0.4, 0.6, 0.8].
  expect_near(detrend(std::vector<double>{0, 1, 0, 1}), {-0.2, 0.6, -0.6, 0.2});
}

TEST(Detrend, ResidualUncorrelatedWithIndex) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto r = detrend(random_vector(rng, 10 + t * 7));
    const double n = static_cast<double>(r.size());
    double sx = 0, sr = 0, sxr = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      sx += static_cast<double>(i);
      sr += r[i];
      sxr += static_cast<double>(i) * r[i];
    }
    EXPECT_NEAR(sxr - sx * sr / n, 0.0, 1e-9);
    EXPECT_NEAR(sr, 0.0, 1e-9);
  }
}

TEST(Smooth, WidthOneIsIdentity) {
  const std::vector<double> v{3, -1, 4, 1, 5};
  EXPECT_EQ(smooth(v, 1), v);
}

TEST(Smooth, EdgesShrink) { expect_near(smooth(std::vector<double>{0, 3, 0}, 3), {1.5, 1, 1.5}); }

TEST(Smooth, ConstantUnchangedForAnyWidth) {
  const std::vector<double> v(40, 2.75);
  for (std::size_t w : {1u, 3u, 7u, 31u, 39u}) EXPECT_EQ(smooth(v, w), v) << w;
}

TEST(Smooth, MatchesDirectWindowMean) {
  std::mt19937_64 rng(9);
  const auto v = random_vector(rng, 60);
  const std::size_t w = 9;
  const auto s = smooth(v, w);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::size_t lo = i >= w / 2 ? i - w / 2 : 0;
    const std::size_t hi = std::min(v.size() - 1, i + w / 2);
    double sum = 0;
    for (std::size_t k = lo; k <= hi; ++k) sum += v[k];
    EXPECT_NEAR(s[i], sum / static_cast<double>(hi - lo + 1), 1e-12);
  }
}

TEST(Smooth, EvenWidthRejected) { EXPECT_THROW(smooth(std::vector<double>{1, 2}, 2), ConfigError); }

TEST(ZNormalize, TwoPoints) { expect_near(znormalize(std::vector<double>{2, 4}, 1e-8), {-1, 1}); }

TEST(ZNormalize, ConstantIsFlat) {
  bool flat = false;
  expect_near(znormalize(std::vector<double>{7, 7, 7}, 1e-8, &flat), {0, 0, 0});
  EXPECT_TRUE(flat);
}

TEST(ZNormalize, PopulationStd) {
  const double s = std::sqrt(0.5);
  expect_near(znormalize(std::vector<double>{1, 2, 3, 4, 5}, 1e-8),
              {-2 * s, -s, 0, s, 2 * s});
}

TEST(ZNormalize, Idempotent) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 50; ++t) {
    const auto once = znormalize(random_vector(rng, 5 + t), 1e-8);
    expect_near(znormalize(once, 1e-8), once, 1e-9);
  }
}

TEST(Preprocess, AllFlagsOffIsIdentity) {
  PreprocessConfig c;
  c.detrend = c.smooth = c.normalize = false;
  const std::vector<double> v{5, 1, 4};
  const auto r = preprocess(v, c);
  EXPECT_EQ(r.values, v);
  EXPECT_FALSE(r.steps.detrended || r.steps.smoothed || r.steps.normalized);
}

TEST(Preprocess, RampIsFlatAfterFullPipeline) {
  PreprocessConfig c;
  c.smooth_width = 5;
  std::vector<double> ramp(64);
  std::iota(ramp.begin(), ramp.end(), 10.0);
  const auto r = preprocess(ramp, c);
  EXPECT_TRUE(r.steps.detrended && r.steps.smoothed && r.steps.normalized);
  EXPECT_TRUE(r.steps.flat);
  for (double x : r.values) EXPECT_EQ(x, 0.0);
}

TEST(Preprocess, OrderIsDetrendSmoothNormalize) {
  // Ramp plus step: each ordering of the three operations gives a different
  // result, so matching the explicit composition pins the order.
  std::vector<double> v(40);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.5 * static_cast<double>(i) + (i >= 20 ? 8.0 : 0.0);
  PreprocessConfig c;
  c.smooth_width = 7;
  const auto want = znormalize(smooth(detrend(v), 7), c.std_floor);
  const auto got = preprocess(v, c).values;
  expect_near(got, want, 0.0);
  const auto other = detrend(smooth(v, 7));
  const auto other_z = znormalize(other, c.std_floor);
  double diff = 0;
  for (std::size_t i = 0; i < v.size(); ++i) diff = std::max(diff, std::abs(other_z[i] - got[i]));
  EXPECT_GT(diff, 1e-6);
}

TEST(PreprocessConfig, Validation) {
  PreprocessConfig c;
  c.smooth_width = 4;
  EXPECT_THROW(c.validate(), ConfigError);
  c.smooth_width = 3;
  c.std_floor = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

}  // namespace
}  // namespace cipher
