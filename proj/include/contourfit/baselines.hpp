#pragma once

#include <optional>
#include <span>
#include <vector>

#include "contourfit/cloud.hpp"
#include "contourfit/exec.hpp"
#include "contourfit/geometry.hpp"

namespace contourfit {

/// Orthogonal (shortest) distance from p to the boundary of e.
double point_ellipse_distance(const Ellipse& e, Point2 p);

/// Closest boundary point to p.
Point2 foot_point(const Ellipse& e, Point2 p);

struct OlsResult {
  Ellipse ellipse;
  bool converged = false;
  int iterations = 0;
  double objective = 0.0;  // sum of squared orthogonal distances
};

/// Geometric least squares: Levenberg-damped Gauss-Newton on the signed
/// orthogonal distances, Jacobian taken at each foot point. Stops when an
/// accepted step is below 1e-9 or after 200 iterations (converged = false).
/// Throws NotAnEllipse if the minor axis collapses.
OlsResult fit_ols(std::span<const Point2> points, const Ellipse& init);

struct RansacConfig {
  /// Orthogonal-distance inlier threshold; estimated from the data when unset.
  std::optional<double> inlier_threshold;
};

/// Cloud member with the least median first-order distance to the points.
std::size_t least_median_member(std::span<const Point2> points, const EllipseCloud& cloud,
                                Exec exec = Exec::parallel);
/// Twice the reweighted least-median-of-squares scale of the distances to
/// the least-median member.
double default_inlier_threshold(std::span<const Point2> points, const EllipseCloud& cloud,
                                Exec exec = Exec::parallel);

struct RansacResult {
  Ellipse ellipse;
  std::size_t winner = 0;         // index into the cloud
  std::size_t winner_inliers = 0;
  std::size_t final_inliers = 0;
  double threshold = 0.0;
};

/// Inlier count and summed inlier distance of one candidate.
std::pair<std::size_t, double> count_inliers(const Ellipse& e, std::span<const Point2> points,
                                             double threshold);

RansacResult fit_ransac(std::span<const Point2> points, const EllipseCloud& cloud,
                        const RansacConfig& cfg = {}, Exec exec = Exec::parallel);

struct RhtConfig {
  /// Multiplier on each parameter's MAD giving its kernel width.
  double bandwidth = 0.5;
};

Ellipse fit_rht(const EllipseCloud& cloud, const RhtConfig& cfg = {}, Exec exec = Exec::parallel);

Ellipse fit_rosin_median(const EllipseCloud& cloud);

/// The sample angle minimizing the summed wrapped distance to all samples,
/// canonicalized to [-period/2, period/2). Ties go to the smallest angle.
double circular_median(std::span<const double> angles, double period);

}  // namespace contourfit
