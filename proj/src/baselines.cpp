#include "contourfit/baselines.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "contourfit/error.hpp"
#include "contourfit/stats.hpp"

namespace contourfit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxOlsIterations = 200;
constexpr double kOlsStepTolerance = 1e-9;
constexpr double kRhtCutoff = 8.5;

struct Local {
  double u, v;
};

Local to_local(const Ellipse& e, Point2 p) {
  const double ca = std::cos(e.angle), sa = std::sin(e.angle);
  const double dx = p.x - e.cx, dy = p.y - e.cy;
  return {ca * dx + sa * dy, -sa * dx + ca * dy};
}

Point2 from_local(const Ellipse& e, Local l) {
  const double ca = std::cos(e.angle), sa = std::sin(e.angle);
  return {e.cx + ca * l.u - sa * l.v, e.cy + sa * l.u + ca * l.v};
}

// Closest point on the axis-aligned ellipse (a >= b) to a first-quadrant
// point (y0, y1): the root of a convex decreasing function of the shifted
// Lagrange parameter s = t + b^2, reached by Newton from a lower bound.
Local foot_first_quadrant(double a, double b, double y0, double y1) {
  const double d = a * a - b * b;
  if (y1 > 0.0 && y0 > 0.0) {
    const double ay = a * y0, by = b * y1;
    double s = std::max(by, ay - d);
    if (s > 0.0) {
      for (int it = 0; it < 256; ++it) {
        const double pa = ay / (s + d), pb = by / s;
        const double f = pa * pa + pb * pb - 1.0;
        if (f <= 0.0) break;
        const double df = -2.0 * (pa * pa / (s + d) + pb * pb / s);
        const double step = -f / df;
        s += step;
        if (step <= 1e-16 * s) break;
      }
      return {a * a * y0 / (s + d), b * b * y1 / s};
    }
  }
  if (y1 > 0.0 && y0 <= 0.0) return {0.0, b};
  if (y0 * a < d) {
    const double x0 = a * a * y0 / d;
    const double r = x0 / a;
    return {x0, b * std::sqrt(std::max(0.0, 1.0 - r * r))};
  }
  return {a, 0.0};
}

Local foot_local(const Ellipse& e, Local p) {
  const Local q = foot_first_quadrant(e.major, e.minor, std::abs(p.u), std::abs(p.v));
  return {std::copysign(q.u, p.u), std::copysign(q.v, p.v)};
}

using Params = Eigen::Matrix<double, 5, 1>;

Ellipse from_params(const Params& p) { return {p(0), p(1), p(2), p(3), p(4)}; }

Ellipse canonical(Ellipse e) {
  if (e.minor > e.major) {
    std::swap(e.major, e.minor);
    e.angle += 0.5 * kPi;
  }
  e.angle = wrap_angle(e.angle, kPi);
  return e;
}

double objective(const Ellipse& e, std::span<const Point2> pts) {
  double acc = 0.0;
  for (const auto& p : pts) {
    const double d = point_ellipse_distance(e, p);
    acc += d * d;
  }
  return acc;
}

// Signed residuals (positive outside) and their parameter Jacobian. At the
// foot point x*, d(dist)/d(param) = f_param(x*) / |grad_x f(x*)| for
// f = u^2/a^2 + v^2/b^2 - 1.
void linearize(const Ellipse& e, std::span<const Point2> pts, Eigen::VectorXd& r,
               Eigen::Matrix<double, Eigen::Dynamic, 5>& jac) {
  const auto n = static_cast<Eigen::Index>(pts.size());
  r.resize(n);
  jac.resize(n, 5);
  const double ca = std::cos(e.angle), sa = std::sin(e.angle);
  const double a = e.major, b = e.minor;
  const double ia2 = 1.0 / (a * a), ib2 = 1.0 / (b * b);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Local p = to_local(e, pts[static_cast<std::size_t>(i)]);
    const Local f = foot_local(e, p);
    const double dist = std::hypot(p.u - f.u, p.v - f.v);
    const double sign = (p.u * p.u * ia2 + p.v * p.v * ib2) >= 1.0 ? 1.0 : -1.0;
    r(i) = sign * dist;
    const double gu = 2.0 * f.u * ia2, gv = 2.0 * f.v * ib2;
    const double gnorm = std::hypot(gu, gv);
    jac(i, 0) = (-gu * ca + gv * sa) / gnorm;
    jac(i, 1) = (-gu * sa - gv * ca) / gnorm;
    jac(i, 2) = (-2.0 * f.u * f.u / (a * a * a)) / gnorm;
    jac(i, 3) = (-2.0 * f.v * f.v / (b * b * b)) / gnorm;
    jac(i, 4) = (2.0 * f.u * f.v * (ia2 - ib2)) / gnorm;
  }
}

}  // namespace

Point2 foot_point(const Ellipse& e, Point2 p) { return from_local(e, foot_local(e, to_local(e, p))); }

double point_ellipse_distance(const Ellipse& e, Point2 p) {
  const Local l = to_local(e, p);
  const Local f = foot_local(e, l);
  return std::hypot(l.u - f.u, l.v - f.v);
}

OlsResult fit_ols(std::span<const Point2> points, const Ellipse& init) {
  if (points.size() < 6) throw Error(ErrorCode::TooFewPoints, "OLS needs at least 6 points");
  if (!(init.major >= init.minor && init.minor > 0.0)) {
    throw Error(ErrorCode::NotAnEllipse, "invalid initial ellipse");
  }
  OlsResult res;
  Ellipse cur = canonical(init);
  double obj = objective(cur, points);
  double lambda = 1e-3;
  Eigen::VectorXd r;
  Eigen::Matrix<double, Eigen::Dynamic, 5> jac;

  for (int iter = 0; iter < kMaxOlsIterations; ++iter) {
    res.iterations = iter + 1;
    linearize(cur, points, r, jac);
    const Eigen::Matrix<double, 5, 5> h = jac.transpose() * jac;
    const Params g = jac.transpose() * r;
    const double ridge = 1e-12 * std::max(h.diagonal().maxCoeff(), 1e-300);
    const Params p0{cur.cx, cur.cy, cur.major, cur.minor, cur.angle};

    bool accepted = false;
    Params step = Params::Zero();
    while (lambda < 1e16) {
      Eigen::Matrix<double, 5, 5> damped = h;
      for (int k = 0; k < 5; ++k) damped(k, k) += lambda * h(k, k) + ridge;
      step = damped.ldlt().solve(-g);
      const Params p1 = p0 + step;
      if (step.allFinite() && p1(2) > 0.0 && p1(3) > 0.0) {
        const Ellipse cand = canonical(from_params(p1));
        const double cand_obj = objective(cand, points);
        if (cand_obj <= obj) {
          cur = cand;
          obj = cand_obj;
          lambda = std::max(lambda * 0.1, 1e-12);
          accepted = true;
          break;
        }
      }
      lambda *= 10.0;
    }
    if (cur.minor < 1e-9 * cur.major) {
      throw Error(ErrorCode::NotAnEllipse, "OLS iterate collapsed");
    }
    if (!accepted || step.norm() < kOlsStepTolerance) {
      // no descent direction left at any damping: we are at the optimum
      res.converged = true;
      break;
    }
  }
  res.ellipse = cur;
  res.objective = obj;
  return res;
}

namespace {

/// First-order (Sampson) distance, exact on the boundary.
double approx_distance(const Ellipse& e, double c, double s, const Point2& p) {
  const double dx = p.x - e.cx, dy = p.y - e.cy;
  const double u = c * dx + s * dy, v = -s * dx + c * dy;
  const double ia = 1.0 / (e.major * e.major), ib = 1.0 / (e.minor * e.minor);
  const double f = u * u * ia + v * v * ib - 1.0;
  const double g = 2.0 * std::hypot(u * ia, v * ib);
  return g > 0.0 ? std::abs(f) / g : e.minor;
}

double median_approx_distance(const Ellipse& e, std::span<const Point2> points, std::vector<double>& buf) {
  const double c = std::cos(e.angle), s = std::sin(e.angle);
  buf.clear();
  for (const auto& p : points) buf.push_back(approx_distance(e, c, s, p));
  auto mid = buf.begin() + static_cast<std::ptrdiff_t>(buf.size() / 2);
  std::nth_element(buf.begin(), mid, buf.end());
  return *mid;
}

}  // namespace

std::size_t least_median_member(std::span<const Point2> points, const EllipseCloud& cloud, Exec exec) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "least-median member of an empty cloud");
  const auto n = static_cast<std::ptrdiff_t>(cloud.size());
  std::vector<double> med(cloud.size());
  if (exec == Exec::parallel) {
#pragma omp parallel
    {
      std::vector<double> buf;
#pragma omp for schedule(static)
      for (std::ptrdiff_t i = 0; i < n; ++i) med[i] = median_approx_distance(cloud.ellipses[i], points, buf);
    }
  } else {
    std::vector<double> buf;
    for (std::ptrdiff_t i = 0; i < n; ++i) med[i] = median_approx_distance(cloud.ellipses[i], points, buf);
  }
  return static_cast<std::size_t>(std::min_element(med.begin(), med.end()) - med.begin());
}

double default_inlier_threshold(std::span<const Point2> points, const EllipseCloud& cloud, Exec exec) {
  const Ellipse& ref = cloud.ellipses[least_median_member(points, cloud, exec)];
  std::vector<double> d;
  d.reserve(points.size());
  for (const auto& p : points) d.push_back(point_ellipse_distance(ref, p));
  const auto n = static_cast<double>(d.size());
  const double s0 = 1.4826 * (1.0 + 5.0 / std::max(1.0, n - 5.0)) * stats::median(d);
  double ss = 0.0, kept = 0.0;
  for (double r : d) {
    if (r <= 2.5 * s0) {
      ss += r * r;
      kept += 1.0;
    }
  }
  const double sigma = kept > 5.0 ? std::sqrt(ss / (kept - 5.0)) : s0;
  return std::max(2.0 * sigma, 1e-9 * ref.major);
}

std::pair<std::size_t, double> count_inliers(const Ellipse& e, std::span<const Point2> points,
                                             double threshold) {
  std::size_t count = 0;
  double sum = 0.0;
  for (const auto& p : points) {
    // |rho - 1| * minor lower-bounds the distance to the homothetic boundary
    const double rho = std::sqrt(e.normalized_radius_sq(p));
    if (std::abs(rho - 1.0) * e.minor >= threshold) continue;
    const double d = point_ellipse_distance(e, p);
    if (d < threshold) {
      ++count;
      sum += d;
    }
  }
  return {count, sum};
}

RansacResult fit_ransac(std::span<const Point2> points, const EllipseCloud& cloud,
                        const RansacConfig& cfg, Exec exec) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "RANSAC needs a non-empty cloud");
  const double thr = cfg.inlier_threshold ? *cfg.inlier_threshold
                                          : default_inlier_threshold(points, cloud, exec);
  if (!(thr > 0.0)) throw Error(ErrorCode::InvalidArgument, "inlier threshold must be > 0");

  const auto n = static_cast<std::ptrdiff_t>(cloud.size());
  std::vector<std::pair<std::size_t, double>> scores(cloud.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) scores[i] = count_inliers(cloud.ellipses[i], points, thr);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) scores[i] = count_inliers(cloud.ellipses[i], points, thr);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i].first > scores[best].first ||
        (scores[i].first == scores[best].first && scores[i].second < scores[best].second)) {
      best = i;
    }
  }
  if (scores[best].first == 0) throw Error(ErrorCode::NoInliers, "no candidate has inliers");

  RansacResult res;
  res.winner = best;
  res.winner_inliers = scores[best].first;
  res.threshold = thr;
  res.ellipse = cloud.ellipses[best];
  res.final_inliers = res.winner_inliers;

  const Ellipse& win = cloud.ellipses[best];
  std::vector<Point2> inliers;
  for (const auto& p : points) {
    if (point_ellipse_distance(win, p) < thr) inliers.push_back(p);
  }
  if (inliers.size() >= 6) {
    try {
      const OlsResult refined = fit_ols(inliers, win);
      const auto refined_count = count_inliers(refined.ellipse, points, thr).first;
      if (refined_count >= res.winner_inliers) {
        res.ellipse = refined.ellipse;
        res.final_inliers = refined_count;
      }
    } catch (const Error&) {
      // keep the unrefined winner
    }
  }
  return res;
}

double circular_median(std::span<const double> angles, double period) {
  if (angles.empty()) throw Error(ErrorCode::EmptyInput, "circular_median of no angles");
  if (!(period > 0.0)) throw Error(ErrorCode::InvalidArgument, "period must be > 0");
  const std::size_t n = angles.size();
  std::vector<double> s;
  s.reserve(n);
  for (double a : angles) s.push_back(wrap_angle(a, period));
  std::sort(s.begin(), s.end());

  // Unrolled copies s - P, s, s + P: any n consecutive entries hold each
  // sample once, so the window starting at c - P/2 gives wrapped distances.
  std::vector<double> ext(3 * n);
  std::vector<double> prefix(3 * n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    ext[i] = s[i] - period;
    ext[n + i] = s[i];
    ext[2 * n + i] = s[i] + period;
  }
  for (std::size_t i = 0; i < 3 * n; ++i) prefix[i + 1] = prefix[i] + ext[i];

  const double tie_tol = 1e-12 * static_cast<double>(n) * period;
  double best_sum = std::numeric_limits<double>::infinity();
  double best = s[0];
  for (std::size_t i = 0; i < n; ++i) {
    const double c = s[i];
    const std::size_t mid = n + i;
    const auto lo = static_cast<std::size_t>(
        std::lower_bound(ext.begin(), ext.end(), c - 0.5 * period) - ext.begin());
    const std::size_t hi = lo + n;
    const double left = c * static_cast<double>(mid - lo) - (prefix[mid] - prefix[lo]);
    const double right = (prefix[hi] - prefix[mid]) - c * static_cast<double>(hi - mid);
    const double sum = left + right;
    if (sum < best_sum - tie_tol) {
      best_sum = sum;
      best = c;
    }
  }
  return best;
}

Ellipse fit_rosin_median(const EllipseCloud& cloud) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "Rosin median of empty cloud");
  const std::size_t n = cloud.size();
  std::vector<double> cx(n), cy(n), ma(n), mi(n), an(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = cloud.ellipses[i];
    cx[i] = e.cx;
    cy[i] = e.cy;
    ma[i] = e.major;
    mi[i] = e.minor;
    an[i] = e.angle;
  }
  Ellipse out;
  out.cx = stats::median(std::move(cx));
  out.cy = stats::median(std::move(cy));
  out.major = stats::median(std::move(ma));
  out.minor = stats::median(std::move(mi));
  out.angle = circular_median(an, kPi);
  return out;
}

Ellipse fit_rht(const EllipseCloud& cloud, const RhtConfig& cfg, Exec exec) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "RHT of empty cloud");
  if (!(cfg.bandwidth > 0.0)) throw Error(ErrorCode::InvalidArgument, "RHT bandwidth must be > 0");
  const std::size_t n = cloud.size();

  std::vector<double> angles(n);
  for (std::size_t i = 0; i < n; ++i) angles[i] = cloud.ellipses[i].angle;
  const double med_angle = circular_median(angles, kPi);

  // row-major n x 5: cx, cy, major, minor, angle centered on the median
  std::vector<double> p(5 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = cloud.ellipses[i];
    p[5 * i + 0] = e.cx;
    p[5 * i + 1] = e.cy;
    p[5 * i + 2] = e.major;
    p[5 * i + 3] = e.minor;
    p[5 * i + 4] = wrap_angle(e.angle - med_angle, kPi);
  }
  std::array<double, 5> inv_h{};
  for (std::size_t j = 0; j < 5; ++j) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = p[5 * i + j];
    const double scale = 1e-12 * (1.0 + std::abs(stats::median_of(col)));
    inv_h[j] = 1.0 / std::max(cfg.bandwidth * stats::mad(col), scale);
  }
  auto scaled_delta = [&](std::size_t i, std::size_t k, std::size_t j) {
    double d = p[5 * i + j] - p[5 * k + j];
    if (j == 4) {
      // both operands lie in [-pi/2, pi/2)
      if (d >= 0.5 * kPi) d -= kPi;
      else if (d < -0.5 * kPi) d += kPi;
    }
    return d * inv_h[j];
  };

  std::vector<double> density(n, 0.0);
  const auto ni = static_cast<std::ptrdiff_t>(n);
  auto eval = [&](std::ptrdiff_t i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      double q = 0.0;
      bool far = false;
      for (std::size_t j = 0; j < 5 && !far; ++j) {
        const double z = scaled_delta(static_cast<std::size_t>(i), k, j);
        far = std::abs(z) > kRhtCutoff;
        q += z * z;
      }
      if (!far) acc += std::exp(-0.5 * q);
    }
    density[static_cast<std::size_t>(i)] = acc;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < ni; ++i) eval(i);
  } else {
    for (std::ptrdiff_t i = 0; i < ni; ++i) eval(i);
  }
  const auto top = static_cast<std::size_t>(
      std::max_element(density.begin(), density.end()) - density.begin());

  std::array<double, 5> acc{};
  std::size_t members = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double q = 0.0;
    for (std::size_t j = 0; j < 5; ++j) {
      const double z = scaled_delta(k, top, j);
      q += z * z;
    }
    if (q > 1.0) continue;
    ++members;
    for (std::size_t j = 0; j < 5; ++j) acc[j] += scaled_delta(k, top, j) / inv_h[j];
  }
  const double m = static_cast<double>(members);
  Ellipse out;
  out.cx = p[5 * top + 0] + acc[0] / m;
  out.cy = p[5 * top + 1] + acc[1] / m;
  out.major = p[5 * top + 2] + acc[2] / m;
  out.minor = p[5 * top + 3] + acc[3] / m;
  out.angle = wrap_angle(p[5 * top + 4] + acc[4] / m + med_angle, kPi);
  return canonical(out);
}

}  // namespace contourfit
