#include "cipher/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cipher/error.hpp"

namespace cipher {

void PreprocessConfig::validate() const {
  if (smooth_width == 0 || smooth_width % 2 == 0) {
    throw ConfigError("preprocess.smooth_width must be odd and >= 1, got " +
                      std::to_string(smooth_width));
  }
  if (!(std_floor > 0.0)) {
    throw ConfigError("preprocess.std_floor must be > 0");
  }
}

std::vector<double> detrend(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) {
    throw InvalidArgument("detrend needs at least two samples");
  }
  // Centered index keeps the normal equations well conditioned for long
  // windows: t_i = i - (n-1)/2 has zero mean.
  const double center = static_cast<double>(n - 1) / 2.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);

  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) - center;
    sxy += t * (values[i] - mean);
    sxx += t * t;
  }
  const double slope = sxy / sxx;

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) - center;
    out[i] = values[i] - (mean + slope * t);
  }
  return out;
}

std::vector<double> smooth(std::span<const double> values, std::size_t width) {
  const std::size_t n = values.size();
  if (width == 0 || width % 2 == 0) {
    throw ConfigError("smoothing width must be odd, got " + std::to_string(width));
  }
  if (width > n) {
    throw ConfigError("smoothing width " + std::to_string(width) +
                      " exceeds window length " + std::to_string(n));
  }
  if (width == 1) {
    return {values.begin(), values.end()};
  }
  const std::size_t half = width / 2;

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n, i + half + 1);
    // Deviations from the first sample keep constant stretches bit-exact.
    const double base = values[lo];
    double acc = 0.0;
    for (std::size_t j = lo; j < hi; ++j) acc += values[j] - base;
    out[i] = base + acc / static_cast<double>(hi - lo);
  }
  return out;
}

std::vector<double> znormalize(std::span<const double> values, double std_floor,
                               bool* flat) {
  const std::size_t n = values.size();
  if (n == 0) {
    throw InvalidArgument("znormalize needs a non-empty input");
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));

  std::vector<double> out(n, 0.0);
  const bool is_flat = !(sd > std_floor);
  if (flat) *flat = is_flat;
  if (is_flat) return out;
  for (std::size_t i = 0; i < n; ++i) out[i] = (values[i] - mean) / sd;
  return out;
}

PreprocessedWindow preprocess(std::span<const double> values,
                              const PreprocessConfig& config) {
  config.validate();
  PreprocessedWindow result;
  result.values.assign(values.begin(), values.end());
  if (config.detrend) {
    result.values = detrend(result.values);
    result.steps.detrended = true;
  }
  if (config.smooth) {
    result.values = smooth(result.values, config.smooth_width);
    result.steps.smoothed = true;
  }
  if (config.normalize) {
    result.values = znormalize(result.values, config.std_floor, &result.steps.flat);
    result.steps.normalized = true;
  }
  return result;
}

}  // namespace cipher
