#include "cipher/metrics.hpp"

#include <map>
#include <utility>

#include "cipher/error.hpp"

namespace cipher {

namespace {

double pairs(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw InvalidArgument("labelings differ in length");
  const double n = static_cast<double>(a.size());
  if (a.size() < 2) return 1.0;

  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> rows;
  std::map<int, double> cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  double index = 0.0;
  for (const auto& [key, count] : joint) index += pairs(count);
  double sum_rows = 0.0;
  for (const auto& [key, count] : rows) sum_rows += pairs(count);
  double sum_cols = 0.0;
  for (const auto& [key, count] : cols) sum_cols += pairs(count);

  const double expected = sum_rows * sum_cols / pairs(n);
  const double maximum = 0.5 * (sum_rows + sum_cols);
  if (maximum == expected) return 1.0;
  return (index - expected) / (maximum - expected);
}

}  // namespace cipher
