#pragma once

// Inverse standard-normal CDF by bisection on erfc. Slow, but shares nothing
// with the rational approximation used by the library.

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double normal_quantile(double p) {
  double lo = -40.0;
  double hi = 40.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Equiprobable cell edges for an alphabet of size c: quantiles k/c, k=1..c-1.
inline std::vector<double> breakpoints(std::uint32_t c) {
  std::vector<double> out;
  for (std::uint32_t k = 1; k < c; ++k) out.push_back(normal_quantile(double(k) / c));
  return out;
}

}  // namespace oracle
