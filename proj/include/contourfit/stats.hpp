#pragma once

#include <span>
#include <vector>

namespace contourfit::stats {

/// Median with the mean-of-middle-two convention. Empty input is the
/// caller's problem (callers raise their own error codes).
double median(std::vector<double> values);
double median_of(std::span<const double> values);

/// Linear-interpolated quantile (R type 7), q in [0, 1].
double quantile(std::vector<double> values, double q);
double iqr(std::span<const double> values);

/// Raw median absolute deviation about the median (unscaled).
double mad(std::span<const double> values);

double mean(std::span<const double> values);
double stddev(std::span<const double> values);

}  // namespace contourfit::stats
