#include "contourfit/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "contourfit/error.hpp"

namespace contourfit {

namespace {

constexpr double kRankTolerance = 1e-10;
constexpr double kMinAxisRatio = 1e-9;

}  // namespace

Conic Conic::normalized() const {
  const double m = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d), std::abs(e),
                             std::abs(f)});
  if (m == 0.0) return *this;
  return {a / m, b / m, c / m, d / m, e / m, f / m};
}

Point2 Ellipse::point_at(double t) const {
  const double ca = std::cos(angle), sa = std::sin(angle);
  const double u = major * std::cos(t), v = minor * std::sin(t);
  return {cx + ca * u - sa * v, cy + sa * u + ca * v};
}

double Ellipse::normalized_radius_sq(Point2 p) const {
  const double ca = std::cos(angle), sa = std::sin(angle);
  const double dx = p.x - cx, dy = p.y - cy;
  const double u = ca * dx + sa * dy;
  const double v = -sa * dx + ca * dy;
  return (u * u) / (major * major) + (v * v) / (minor * minor);
}

double wrap_angle(double angle, double period) {
  double w = std::fmod(angle + 0.5 * period, period);
  if (w < 0) w += period;
  w -= 0.5 * period;
  // fmod can land exactly on +period/2 after the shift back
  if (w >= 0.5 * period) w -= period;
  return w;
}

double circular_distance(double a, double b, double period) {
  double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

Conic fit_conic_five_points(std::span<const Point2, 5> pts) {
  for (const auto& p : pts) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::InvalidArgument, "non-finite point in quintuple");
    }
  }
  double mx = 0, my = 0;
  for (const auto& p : pts) {
    mx += p.x;
    my += p.y;
  }
  mx /= 5.0;
  my /= 5.0;
  double ms = 0;
  for (const auto& p : pts) ms += (p.x - mx) * (p.x - mx) + (p.y - my) * (p.y - my);
  ms = std::sqrt(ms / 5.0);
  if (ms == 0.0) throw Error(ErrorCode::DegenerateQuintuple, "all five points coincide");
  const double s = std::sqrt(2.0) / ms;

  Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero();
  for (int i = 0; i < 5; ++i) {
    const double x = (pts[i].x - mx) * s, y = (pts[i].y - my) * s;
    m.row(i) << x * x, x * y, y * y, x, y, 1.0;
  }
  // The zero sixth row leaves the singular values of the 5x6 block unchanged
  // and lets the fixed-size SVD hand back a full V.
  Eigen::JacobiSVD<Eigen::Matrix<double, 6, 6>> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(4) >= kRankTolerance * sv(0))) {
    throw Error(ErrorCode::DegenerateQuintuple, "five points do not determine a unique conic");
  }
  const Eigen::Matrix<double, 6, 1> n = svd.matrixV().col(5);

  const double s2 = s * s;
  const double A = n(0) * s2, B = n(1) * s2, C = n(2) * s2;
  const double D = -2.0 * A * mx - B * my + n(3) * s;
  const double E = -B * mx - 2.0 * C * my + n(4) * s;
  const double F = A * mx * mx + B * mx * my + C * my * my - n(3) * s * mx - n(4) * s * my + n(5);
  return Conic{A, B, C, D, E, F}.normalized();
}

bool is_ellipse(const Conic& k) {
  if (k.b * k.b - 4.0 * k.a * k.c >= 0.0) return false;
  const double inner = (k.a * k.c - k.b * k.b / 4.0) * k.f + k.b * k.e * k.d / 4.0 -
                       k.c * k.d * k.d / 4.0 - k.a * k.e * k.e / 4.0;
  return k.c * inner < 0.0;
}

Ellipse conic_to_ellipse(const Conic& input) {
  if (!is_ellipse(input)) throw Error(ErrorCode::NotAnEllipse, "conic is not a real ellipse");
  Conic k = input.normalized();
  const double det = 4.0 * k.a * k.c - k.b * k.b;
  const double cx = (k.b * k.e - 2.0 * k.c * k.d) / det;
  const double cy = (k.b * k.d - 2.0 * k.a * k.e) / det;
  double f0 = k.f + 0.5 * (k.d * cx + k.e * cy);
  double a = k.a, b = k.b, c = k.c;
  if (f0 > 0) {
    a = -a;
    b = -b;
    c = -c;
    f0 = -f0;
  }
  const double mean = 0.5 * (a + c);
  const double r = std::hypot(0.5 * (a - c), 0.5 * b);
  const double lam_small = mean - r;
  const double lam_large = mean + r;
  if (!(lam_small > 0.0) || !(f0 < 0.0)) {
    throw Error(ErrorCode::NotAnEllipse, "quadratic form is not positive definite");
  }
  Ellipse out;
  out.cx = cx;
  out.cy = cy;
  out.major = std::sqrt(-f0 / lam_small);
  out.minor = std::sqrt(-f0 / lam_large);
  if (!std::isfinite(out.major) || !std::isfinite(out.minor) ||
      out.minor < kMinAxisRatio * out.major) {
    throw Error(ErrorCode::NotAnEllipse, "degenerate minor axis");
  }
  if (r <= 1e-14 * std::abs(mean)) {
    out.angle = 0.0;
  } else {
    out.angle = wrap_angle(0.5 * std::atan2(b, a - c) + 0.5 * std::numbers::pi, std::numbers::pi);
  }
  return out;
}

Conic ellipse_to_conic(const Ellipse& e) {
  const double ca = std::cos(e.angle), sa = std::sin(e.angle);
  const double ia = 1.0 / (e.major * e.major), ib = 1.0 / (e.minor * e.minor);
  const double A = ca * ca * ia + sa * sa * ib;
  const double B = 2.0 * ca * sa * (ia - ib);
  const double C = sa * sa * ia + ca * ca * ib;
  const double D = -2.0 * A * e.cx - B * e.cy;
  const double E = -B * e.cx - 2.0 * C * e.cy;
  const double F = A * e.cx * e.cx + B * e.cx * e.cy + C * e.cy * e.cy - 1.0;
  return Conic{A, B, C, D, E, F}.normalized();
}

std::vector<double> ray_intersect(const Ellipse& e, Point2 origin, double theta) {
  const double ca = std::cos(e.angle), sa = std::sin(e.angle);
  const double dx = origin.x - e.cx, dy = origin.y - e.cy;
  const double qx = ca * dx + sa * dy, qy = -sa * dx + ca * dy;
  const double c = std::cos(theta), s = std::sin(theta);
  const double ux = ca * c + sa * s, uy = -sa * c + ca * s;
  const double ia = 1.0 / (e.major * e.major), ib = 1.0 / (e.minor * e.minor);

  const double alpha = ux * ux * ia + uy * uy * ib;
  const double beta = qx * ux * ia + qy * uy * ib;
  const double gamma = qx * qx * ia + qy * qy * ib - 1.0;
  const double disc = beta * beta - alpha * gamma;
  std::vector<double> out;
  if (disc < 0.0) return out;
  const double sq = std::sqrt(disc);
  // q = -(beta + sign(beta) sq); roots q/alpha and gamma/q
  const double q = beta >= 0 ? -(beta + sq) : -(beta - sq);
  double r1, r2;
  if (q == 0.0) {
    r1 = r2 = 0.0;
  } else {
    r1 = q / alpha;
    r2 = gamma / q;
  }
  if (r1 > r2) std::swap(r1, r2);
  if (r1 >= 0.0) out.push_back(r1);
  if (r2 >= 0.0 && (out.empty() || r2 != r1)) out.push_back(r2);
  return out;
}

bool contains_point(const Ellipse& e, Point2 p) { return e.normalized_radius_sq(p) < 1.0; }

}  // namespace contourfit
