#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "contourfit/cloud.hpp"
#include "contourfit/contour.hpp"
#include "contourfit/geometry.hpp"

namespace contourfit {

/// Noisy ellipse with second-ellipse outliers and one occluded arc.
/// `n_points` is the inlier count before occlusion; the outlier count is
/// round(n_points * r / (1 - r)) so outliers make up fraction r of the
/// un-occluded total.
struct SynthSpec {
  Ellipse truth{0.0, 0.0, 100.0, 60.0, 0.3};
  std::size_t n_points = 500;
  double noise_sigma = 1.0;
  double outlier_ratio = 0.0;
  Ellipse outlier_ellipse{30.0, 20.0, 110.0, 70.0, -0.6};
  double occlusion_ratio = 0.0;
  std::uint64_t seed = 1;

  void validate() const;
  std::size_t outlier_count() const;
};

struct SynthSample {
  PointSet points;
  std::vector<double> inlier_parameters;  // parametric angle of each inlier, in point order
  double arc_start = 0.0;                 // occluded parametric arc [start, start + length)
  double arc_length = 0.0;
};

SynthSample generate_sample(const SynthSpec& spec);
PointSet generate(const SynthSpec& spec);

/// One per-run error record.
struct FitError {
  double mean_distance = 0.0;
  std::string algorithm;
  std::size_t run_index = 0;
};

inline constexpr std::size_t kErrorSamples = 200;

/// Mean orthogonal distance to `truth` from n_eval points on the fit,
/// spaced uniformly in parametric angle.
double curve_error(const Ellipse& fit, const Ellipse& truth, std::size_t n_eval = kErrorSamples);
/// Same, with the points spaced uniformly in ray angle.
double curve_error(const PolarContour& fit, const Ellipse& truth,
                   std::size_t n_eval = kErrorSamples);

/// Cyclic shoelace area of the polygon through the ray points.
double contour_area(const PolarContour& c);

/// Polar samples of an ellipse about `center` (its own center by default).
PolarContour ellipse_to_contour(const Ellipse& e, std::size_t rays = kDefaultRays);
PolarContour ellipse_to_contour(const Ellipse& e, Point2 center, std::size_t rays);

/// Re-expresses a contour's polygon as radii about another center: each ray
/// takes the farthest crossing of the polygon (0 when the ray misses it).
PolarContour resample_contour(const PolarContour& c, Point2 center, std::size_t rays);

/// Mean |r_fit - r_truth| over the truth contour's rays, about its center.
double edge_deviation(const PolarContour& fit, const PolarContour& truth);

}  // namespace contourfit
