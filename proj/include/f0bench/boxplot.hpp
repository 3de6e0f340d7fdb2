#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace f0bench {

/// Type-7 (linear interpolation) quantile of already sorted data, p in [0, 1].
double quantile_sorted(std::span<const double> sorted, double p);

/// Tukey box: quartiles by type-7, whiskers at the most extreme data inside
/// [q1 - 1.5 IQR, q3 + 1.5 IQR], everything beyond is an outlier.
struct BoxStats {
  std::size_t n = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  std::vector<double> outliers;  // ascending
};

/// Throws std::invalid_argument on empty input.
BoxStats box_stats(std::vector<double> values);

}  // namespace f0bench
