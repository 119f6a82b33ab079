#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "contourfit/cloud.hpp"
#include "contourfit/exec.hpp"
#include "contourfit/geometry.hpp"

namespace contourfit {

/// Closed star-shaped curve: radii[k] is the distance from `center` along
/// the ray at angle 2*pi*k/K.
struct PolarContour {
  Point2 center;
  std::vector<double> radii;

  std::size_t rays() const { return radii.size(); }
  double theta(std::size_t k) const;
  Point2 point(std::size_t k) const;
};

inline constexpr std::size_t kDefaultRays = 360;
inline constexpr std::size_t kMinRays = 8;

struct KdeConfig {
  /// Fixed Gaussian bandwidth in radius units; Silverman's rule per ray when unset.
  std::optional<double> bandwidth;
  std::size_t grid_points = 512;

  void validate() const;
};

double median_radius(std::span<const double> radii);

/// 0.9 * min(sd, IQR/1.34) * n^(-1/5), floored at 1e-6.
double silverman_bandwidth(std::span<const double> values);

/// Gaussian KDE (unnormalized sum of kernels) at x; `sorted` ascending.
double kde_density(std::span<const double> sorted, double bandwidth, double x);

/// Radius maximizing the Gaussian KDE of `radii`. Coarse grid over
/// [min - 3bw, max + 3bw], then golden-section refinement of the leading
/// peaks against the exact density. Ties go to the smaller radius.
double kde_mode(std::span<const double> radii, const KdeConfig& cfg);

PolarContour fit_median_contour(const EllipseCloud& cloud, std::size_t rays = kDefaultRays,
                                Exec exec = Exec::parallel);

PolarContour fit_mode_contour(const EllipseCloud& cloud, std::size_t rays = kDefaultRays,
                              const KdeConfig& cfg = {}, Exec exec = Exec::parallel);

/// Periodic linear interpolation between stored rays; theta is wrapped.
double contour_radius_at(const PolarContour& c, double theta);

}  // namespace contourfit
