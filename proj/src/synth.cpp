#include "contourfit/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "contourfit/baselines.hpp"
#include "contourfit/error.hpp"
#include "contourfit/rng.hpp"

namespace contourfit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool valid_ellipse(const Ellipse& e) {
  return std::isfinite(e.cx) && std::isfinite(e.cy) && e.minor > 0.0 && e.major >= e.minor &&
         std::isfinite(e.major) && std::isfinite(e.angle);
}

}  // namespace

void SynthSpec::validate() const {
  if (!valid_ellipse(truth)) throw Error(ErrorCode::SpecInvalid, "truth is not a valid ellipse");
  if (!valid_ellipse(outlier_ellipse)) {
    throw Error(ErrorCode::SpecInvalid, "outlier ellipse is not a valid ellipse");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw Error(ErrorCode::SpecInvalid, "noise sigma must be >= 0");
  }
  if (!(outlier_ratio >= 0.0 && outlier_ratio < 1.0)) {
    throw Error(ErrorCode::SpecInvalid, "outlier ratio must be in [0, 1)");
  }
  if (!(occlusion_ratio >= 0.0 && occlusion_ratio < 1.0)) {
    throw Error(ErrorCode::SpecInvalid, "occlusion ratio must be in [0, 1)");
  }
  if (n_points < 5) throw Error(ErrorCode::SpecInvalid, "need at least 5 points");
}

std::size_t SynthSpec::outlier_count() const {
  return static_cast<std::size_t>(
      std::llround(static_cast<double>(n_points) * outlier_ratio / (1.0 - outlier_ratio)));
}

SynthSample generate_sample(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  std::normal_distribution<double> noise(0.0, 1.0);

  SynthSample out;
  out.arc_start = angle(rng);
  out.arc_length = spec.occlusion_ratio * kTwoPi;

  auto jitter = [&](Point2 p) {
    const double nx = noise(rng), ny = noise(rng);
    return Point2{p.x + spec.noise_sigma * nx, p.y + spec.noise_sigma * ny};
  };

  for (std::size_t i = 0; i < spec.n_points; ++i) {
    const double t = angle(rng);
    const Point2 p = jitter(spec.truth.point_at(t));
    double rel = std::fmod(t - out.arc_start, kTwoPi);
    if (rel < 0) rel += kTwoPi;
    if (rel < out.arc_length) continue;
    out.points.points.push_back(p);
    out.points.labels.push_back(Label::inlier);
    out.inlier_parameters.push_back(t);
  }
  if (out.points.size() < 5) {
    throw Error(ErrorCode::SpecInvalid, "fewer than 5 inliers survive occlusion");
  }
  const std::size_t n_out = spec.outlier_count();
  for (std::size_t i = 0; i < n_out; ++i) {
    const double t = angle(rng);
    out.points.points.push_back(jitter(spec.outlier_ellipse.point_at(t)));
    out.points.labels.push_back(Label::outlier);
  }
  return out;
}

PointSet generate(const SynthSpec& spec) { return generate_sample(spec).points; }

double curve_error(const Ellipse& fit, const Ellipse& truth, std::size_t n_eval) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n_eval; ++i) {
    const double t = kTwoPi * static_cast<double>(i) / static_cast<double>(n_eval);
    acc += point_ellipse_distance(truth, fit.point_at(t));
  }
  return acc / static_cast<double>(n_eval);
}

double curve_error(const PolarContour& fit, const Ellipse& truth, std::size_t n_eval) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n_eval; ++i) {
    const double t = kTwoPi * static_cast<double>(i) / static_cast<double>(n_eval);
    const double r = contour_radius_at(fit, t);
    const Point2 p{fit.center.x + r * std::cos(t), fit.center.y + r * std::sin(t)};
    acc += point_ellipse_distance(truth, p);
  }
  return acc / static_cast<double>(n_eval);
}

double contour_area(const PolarContour& c) {
  const std::size_t k = c.rays();
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) acc += c.radii[i] * c.radii[(i + 1) % k];
  return 0.5 * acc * std::sin(kTwoPi / static_cast<double>(k));
}

PolarContour ellipse_to_contour(const Ellipse& e, std::size_t rays) {
  return ellipse_to_contour(e, e.center(), rays);
}

PolarContour ellipse_to_contour(const Ellipse& e, Point2 center, std::size_t rays) {
  PolarContour c;
  c.center = center;
  c.radii.resize(rays);
  for (std::size_t k = 0; k < rays; ++k) {
    const auto hits = ray_intersect(e, center, c.theta(k));
    c.radii[k] = hits.empty() ? 0.0 : hits.back();
  }
  return c;
}

PolarContour resample_contour(const PolarContour& c, Point2 center, std::size_t rays) {
  const std::size_t n = c.rays();
  std::vector<Point2> poly(n);
  for (std::size_t k = 0; k < n; ++k) poly[k] = c.point(k);

  PolarContour out;
  out.center = center;
  out.radii.assign(rays, 0.0);
  for (std::size_t k = 0; k < rays; ++k) {
    const double t = kTwoPi * static_cast<double>(k) / static_cast<double>(rays);
    const double ux = std::cos(t), uy = std::sin(t);
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 a = poly[i], b = poly[(i + 1) % n];
      const double ex = b.x - a.x, ey = b.y - a.y;
      const double den = ux * ey - uy * ex;
      if (den == 0.0) continue;
      const double wx = a.x - center.x, wy = a.y - center.y;
      const double r = (wx * ey - wy * ex) / den;
      const double s = (wx * uy - wy * ux) / den;
      if (r >= 0.0 && s >= -1e-12 && s <= 1.0 + 1e-12) best = std::max(best, r);
    }
    out.radii[k] = best;
  }
  return out;
}

double edge_deviation(const PolarContour& fit, const PolarContour& truth) {
  const PolarContour& f =
      (fit.center == truth.center && fit.rays() == truth.rays())
          ? fit
          : resample_contour(fit, truth.center, truth.rays());
  double acc = 0.0;
  for (std::size_t k = 0; k < truth.rays(); ++k) acc += std::abs(f.radii[k] - truth.radii[k]);
  return acc / static_cast<double>(truth.rays());
}

}  // namespace contourfit
