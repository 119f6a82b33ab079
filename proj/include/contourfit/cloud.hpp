#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "contourfit/exec.hpp"
#include "contourfit/geometry.hpp"

namespace contourfit {

enum class Label : std::uint8_t { inlier, outlier };

/// Points to be fitted. `labels` is either empty or parallel to `points`;
/// it is only populated for synthetic data.
struct PointSet {
  std::vector<Point2> points;
  std::vector<Label> labels;

  std::size_t size() const { return points.size(); }
};

using Quintuple = std::array<std::uint32_t, 5>;

/// Ellipses fitted to random five-point subsets. `conics[i]` and
/// `quintuples[i]` are the exact fit and source indices of `ellipses[i]`,
/// kept in quintuple-draw order.
struct EllipseCloud {
  std::vector<Ellipse> ellipses;
  std::vector<Conic> conics;
  std::vector<Quintuple> quintuples;
  std::size_t attempted = 0;
  std::uint64_t seed = 0;

  std::size_t size() const { return ellipses.size(); }
  bool empty() const { return ellipses.empty(); }
  /// FNV-1a over the ellipse parameter bits; used to prove cloud sharing.
  std::uint64_t fingerprint() const;
};

/// Draws `n_conics` independent quintuples (distinct indices within each),
/// fits a conic to each and keeps the ellipses. Throws TooFewPoints or
/// EmptyCloud.
EllipseCloud sample_cloud(const PointSet& ps, std::size_t n_conics, std::uint64_t seed,
                          Exec exec = Exec::parallel);

/// The quintuples `sample_cloud` would draw for this seed.
std::vector<Quintuple> draw_quintuples(std::size_t n_points, std::size_t n_conics,
                                       std::uint64_t seed);

/// Component-wise median of the ellipse centers.
Point2 median_center(const EllipseCloud& cloud);

/// Cloud ellipses that strictly enclose a fixed origin, pre-reduced to the
/// quadratic coefficients needed to intersect rays from that origin.
class EnclosingSet {
 public:
  EnclosingSet(const EllipseCloud& cloud, Point2 origin);

  Point2 origin() const { return origin_; }
  std::size_t size() const { return quads_.size(); }
  bool empty() const { return quads_.empty(); }

  /// Appends one outgoing-ray radius per enclosing ellipse to `out` (cleared first).
  void radii(double theta, std::vector<double>& out) const;

 private:
  struct Quad {
    double m11, m12, m22;  // ellipse quadratic form
    double gx, gy;         // M * (origin - center)
    double gamma;          // (origin - center)^T M (origin - center) - 1, < 0
  };
  Point2 origin_;
  std::vector<Quad> quads_;
};

/// One radius per cloud ellipse strictly containing `center`.
std::vector<double> ray_radii(const EllipseCloud& cloud, Point2 center, double theta);

}  // namespace contourfit
