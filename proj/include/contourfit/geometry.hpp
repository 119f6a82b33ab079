#pragma once

#include <array>
#include <numbers>
#include <span>
#include <vector>

namespace contourfit {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// General conic a*x^2 + b*x*y + c*y^2 + d*x + e*y + f = 0, stored with
/// max |coefficient| == 1.
struct Conic {
  double a = 0, b = 0, c = 0, d = 0, e = 0, f = 0;

  double operator()(Point2 p) const {
    return a * p.x * p.x + b * p.x * p.y + c * p.y * p.y + d * p.x + e * p.y + f;
  }
  Conic normalized() const;
};

/// Natural parameters: center, semi-axes (major >= minor > 0) and the
/// major-axis angle in [-pi/2, pi/2).
struct Ellipse {
  double cx = 0.0;
  double cy = 0.0;
  double major = 1.0;
  double minor = 1.0;
  double angle = 0.0;

  Point2 center() const { return {cx, cy}; }
  /// Boundary point at parametric angle t.
  Point2 point_at(double t) const;
  /// x'^2/major^2 + y'^2/minor^2 in the ellipse frame; < 1 inside.
  double normalized_radius_sq(Point2 p) const;
  double area() const { return std::numbers::pi * major * minor; }

  friend bool operator==(const Ellipse&, const Ellipse&) = default;
};

/// Wraps an angle into [-period/2, period/2).
double wrap_angle(double angle, double period);

/// Shortest distance between two angles on a circle of the given period.
double circular_distance(double a, double b, double period);

/// Exact conic through five points. Points are translated to their centroid
/// and scaled to RMS radius sqrt(2) before the null-space solve; the
/// coefficients are mapped back to the input frame.
/// Throws Error(DegenerateQuintuple) when the 5x6 system has rank < 5.
Conic fit_conic_five_points(std::span<const Point2, 5> pts);

/// B^2 - 4AC < 0 and C * det(conic matrix) < 0.
bool is_ellipse(const Conic& c);

/// Throws Error(NotAnEllipse) unless is_ellipse(c) and minor >= 1e-9 * major.
Ellipse conic_to_ellipse(const Conic& c);

Conic ellipse_to_conic(const Ellipse& e);

/// Non-negative distances r, ascending, with origin + r*(cos t, sin t) on the
/// boundary.
std::vector<double> ray_intersect(const Ellipse& e, Point2 origin, double theta);

/// Strict interior test.
bool contains_point(const Ellipse& e, Point2 p);

}  // namespace contourfit
