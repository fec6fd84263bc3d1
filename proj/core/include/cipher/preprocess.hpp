#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cipher {

struct PreprocessConfig {
  bool detrend = true;
  bool smooth = true;
  std::size_t smooth_width = 31;
  bool normalize = true;
  double std_floor = 1e-8;

  /// Throws ConfigError on an even/zero width or non-positive std_floor.
  void validate() const;
};

/// Which steps actually ran on a window.
struct PreprocessSteps {
  bool detrended = false;
  bool smoothed = false;
  bool normalized = false;
  /// Input to normalization had std <= std_floor; output is all zeros.
  bool flat = false;
};

struct PreprocessedWindow {
  std::vector<double> values;
  PreprocessSteps steps;
};

/// Subtracts the least-squares line through (i, values[i]).
/// Throws InvalidArgument for fewer than two samples.
std::vector<double> detrend(std::span<const double> values);

/// Centered moving average of odd `width`. Near the edges the window is
/// clipped to the samples that exist, so the kernel gets shorter there.
/// Throws ConfigError when width is even or exceeds the input length.
std::vector<double> smooth(std::span<const double> values, std::size_t width);

/// Zero mean, unit population standard deviation. Inputs whose std is at or
/// below `std_floor` map to zeros and set `*flat` when provided.
std::vector<double> znormalize(std::span<const double> values, double std_floor,
                               bool* flat = nullptr);

/// detrend -> smooth -> znormalize, each gated by its flag.
PreprocessedWindow preprocess(std::span<const double> values,
                              const PreprocessConfig& config);

}  // namespace cipher
