#include "contourfit/cloud.hpp"

#include <cmath>
#include <cstring>
#include <optional>

#include "contourfit/error.hpp"
#include "contourfit/rng.hpp"
#include "contourfit/stats.hpp"

namespace contourfit {

std::uint64_t EllipseCloud::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& e : ellipses) {
    mix(e.cx);
    mix(e.cy);
    mix(e.major);
    mix(e.minor);
    mix(e.angle);
  }
  return h;
}

std::vector<Quintuple> draw_quintuples(std::size_t n_points, std::size_t n_conics,
                                       std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n_points - 1));
  std::vector<Quintuple> out(n_conics);
  for (auto& q : out) {
    for (std::size_t k = 0; k < 5; ++k) {
      std::uint32_t idx;
      bool dup;
      do {
        idx = pick(rng);
        dup = false;
        for (std::size_t j = 0; j < k; ++j) dup = dup || q[j] == idx;
      } while (dup);
      q[k] = idx;
    }
  }
  return out;
}

namespace {

struct Member {
  Ellipse ellipse;
  Conic conic;
};

std::optional<Member> fit_quintuple(const PointSet& ps, const Quintuple& q) {
  const std::array<Point2, 5> pts{ps.points[q[0]], ps.points[q[1]], ps.points[q[2]],
                                  ps.points[q[3]], ps.points[q[4]]};
  try {
    const Conic c = fit_conic_five_points(std::span<const Point2, 5>(pts));
    if (!is_ellipse(c)) return std::nullopt;
    return Member{conic_to_ellipse(c), c};
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

EllipseCloud sample_cloud(const PointSet& ps, std::size_t n_conics, std::uint64_t seed,
                          Exec exec) {
  if (ps.size() < 5) throw Error(ErrorCode::TooFewPoints, "need at least 5 points");
  if (n_conics < 1) throw Error(ErrorCode::InvalidArgument, "n_conics must be >= 1");

  const auto quints = draw_quintuples(ps.size(), n_conics, seed);
  std::vector<std::optional<Member>> slots(quints.size());
  const auto n = static_cast<std::ptrdiff_t>(quints.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) slots[i] = fit_quintuple(ps, quints[i]);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) slots[i] = fit_quintuple(ps, quints[i]);
  }

  EllipseCloud cloud;
  cloud.attempted = n_conics;
  cloud.seed = seed;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i]) continue;
    cloud.ellipses.push_back(slots[i]->ellipse);
    cloud.conics.push_back(slots[i]->conic);
    cloud.quintuples.push_back(quints[i]);
  }
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "no quintuple produced an ellipse");
  return cloud;
}

Point2 median_center(const EllipseCloud& cloud) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "median_center of empty cloud");
  std::vector<double> xs, ys;
  xs.reserve(cloud.size());
  ys.reserve(cloud.size());
  for (const auto& e : cloud.ellipses) {
    xs.push_back(e.cx);
    ys.push_back(e.cy);
  }
  return {stats::median(std::move(xs)), stats::median(std::move(ys))};
}

EnclosingSet::EnclosingSet(const EllipseCloud& cloud, Point2 origin) : origin_(origin) {
  quads_.reserve(cloud.size());
  for (const auto& e : cloud.ellipses) {
    const double ca = std::cos(e.angle), sa = std::sin(e.angle);
    const double ia = 1.0 / (e.major * e.major), ib = 1.0 / (e.minor * e.minor);
    Quad q;
    q.m11 = ca * ca * ia + sa * sa * ib;
    q.m12 = ca * sa * (ia - ib);
    q.m22 = sa * sa * ia + ca * ca * ib;
    const double wx = origin.x - e.cx, wy = origin.y - e.cy;
    q.gx = q.m11 * wx + q.m12 * wy;
    q.gy = q.m12 * wx + q.m22 * wy;
    q.gamma = wx * q.gx + wy * q.gy - 1.0;
    // same strict test as contains_point, evaluated in the ellipse frame
    if (e.normalized_radius_sq(origin) < 1.0 && q.gamma < 0.0) quads_.push_back(q);
  }
}

void EnclosingSet::radii(double theta, std::vector<double>& out) const {
  out.clear();
  out.reserve(quads_.size());
  const double ux = std::cos(theta), uy = std::sin(theta);
  for (const auto& q : quads_) {
    const double alpha = q.m11 * ux * ux + 2.0 * q.m12 * ux * uy + q.m22 * uy * uy;
    const double beta = q.gx * ux + q.gy * uy;
    const double sq = std::sqrt(beta * beta - alpha * q.gamma);
    // gamma < 0 gives exactly one positive root; pick the cancellation-free form
    out.push_back(beta > 0.0 ? -q.gamma / (beta + sq) : (sq - beta) / alpha);
  }
}

std::vector<double> ray_radii(const EllipseCloud& cloud, Point2 center, double theta) {
  std::vector<double> out;
  EnclosingSet(cloud, center).radii(theta, out);
  return out;
}

}  // namespace contourfit
