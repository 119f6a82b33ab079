#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "contourfit/baselines.hpp"
#include "contourfit/cloud.hpp"
#include "contourfit/contour.hpp"

namespace contourfit {

enum class Algorithm { ols, ransac, rht, rosin, median_contour, mode_contour };

inline constexpr std::array<Algorithm, 6> kAllAlgorithms{
    Algorithm::ols,   Algorithm::ransac,         Algorithm::rht,
    Algorithm::rosin, Algorithm::median_contour, Algorithm::mode_contour};

std::string_view label(Algorithm a);
/// Throws Error(UnknownAlgorithm) listing the valid labels.
Algorithm parse_algorithm(std::string_view text);
std::string algorithm_labels();  // "ols, ransac, ..."

/// Every algorithm except ols consumes the shared ellipse cloud.
constexpr bool uses_cloud(Algorithm a) { return a != Algorithm::ols; }
constexpr bool yields_contour(Algorithm a) {
  return a == Algorithm::median_contour || a == Algorithm::mode_contour;
}

struct FitParams {
  std::size_t rays = kDefaultRays;
  KdeConfig kde;
  RansacConfig ransac;
  RhtConfig rht;
  /// OLS start; the Rosin median of the first `ols_init_members` cloud
  /// members when unset.
  std::optional<Ellipse> ols_init;
  std::size_t ols_init_members = 100;
};

using Fit = std::variant<Ellipse, PolarContour>;

Fit run_fitter(Algorithm algo, const PointSet& ps, const EllipseCloud& cloud,
               const FitParams& params, Exec exec = Exec::parallel);

/// pi*a*b for ellipses, polygon area for contours.
double fit_area(const Fit& fit);
double fit_curve_error(const Fit& fit, const Ellipse& truth);
/// Contours pass through; ellipses are sampled about their own center.
PolarContour fit_to_contour(const Fit& fit, std::size_t rays = kDefaultRays);

}  // namespace contourfit
