#pragma once

#include <string>
#include <vector>

#include "contourfit/algorithms.hpp"
#include "contourfit/bench.hpp"
#include "contourfit/cloud.hpp"
#include "contourfit/geometry.hpp"

namespace contourfit::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Points plus fitted curves, each drawn as a closed polyline.
std::string overlay(const PointSet& ps, const std::vector<std::pair<std::string, Fit>>& fits,
                    const Ellipse* truth = nullptr);

/// A single contour as a closed polyline.
std::string contour(const PolarContour& c);

std::string line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series, bool log_x = false);

/// One histogram row per algorithm present in the result.
std::string histograms(const BenchResult& result, std::size_t bins = 10);

}  // namespace contourfit::svg
