#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "../oracles.hpp"
#include "contourfit/cloud.hpp"
#include "contourfit/contour.hpp"
#include "contourfit/error.hpp"
#include "contourfit/synth.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace contourfit;
using std::numbers::pi;

namespace {

double max_jump(const PolarContour& c) {
  double m = 0.0;
  for (std::size_t k = 0; k < c.rays(); ++k) m = std::max(m, std::abs(c.radii[(k + 1) % c.rays()] - c.radii[k]));
  return m;
}

PointSet transform(const PointSet& ps, int qturns, Point2 shift) {
  PointSet out = ps;
  for (auto& p : out.points) {
    Point2 q = p;
    for (int i = 0; i < qturns; ++i) q = {-q.y, q.x};
    p = {q.x + shift.x, q.y + shift.y};
  }
  return out;
}

}  // namespace

TEST_CASE("median_radius examples and sort oracle") {
  const std::vector<double> a{1, 2, 3}, b{1, 2, 3, 4};
  CHECK(median_radius(a) == 2.0);
  CHECK(median_radius(b) == 2.5);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (std::size_t n : {1001u, 1000u, 7u}) {
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    CHECK(median_radius(v) == oracle::sort_median(v));
  }
  CHECK(test::code_of([] { median_radius({}); }) == ErrorCode::EmptyIntersections);
}

TEST_CASE("kde_mode examples") {
  const std::vector<double> one{5.0};
  CHECK(kde_mode(one, {0.5}) == doctest::Approx(5.0));
  CHECK(kde_mode(one, {}) == doctest::Approx(5.0));

  const std::vector<double> a{0, 0, 0, 10};
  CHECK(std::abs(kde_mode(a, {0.5}) - oracle::kde_scan(a, 0.5).argmax) < 1e-3);
  CHECK(std::abs(kde_mode(a, {0.5})) < 1e-3);

  std::vector<double> b(10, 0.0);
  b.insert(b.end(), 12, 10.0);
  CHECK(kde_mode(b, {0.5}) == doctest::Approx(10.0).epsilon(1e-4));
}

TEST_CASE("kde_mode agrees with the dense grid oracle on random samples") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v;
    for (int i = 0; i < 150; ++i) v.push_back(50.0 + 2.0 * n(rng));
    for (int i = 0; i < 100; ++i) v.push_back(58.0 + 1.0 * n(rng));
    const double bw = oracle::silverman(v);
    const auto scan = oracle::kde_scan(v, bw);
    const double m = kde_mode(v, {});
    CHECK(std::abs(m - scan.argmax) <= scan.spacing);
    CHECK(oracle::kde_density(v, bw, m) >= oracle::kde_density(v, bw, scan.argmax) * (1 - 1e-12));
  }
}

TEST_CASE("silverman bandwidth matches the oracle and floors at 1e-6") {
  const std::vector<double> v{1, 2, 4, 8, 9, 11, 30};
  CHECK(silverman_bandwidth(v) == doctest::Approx(oracle::silverman(v)));
  const std::vector<double> flat{3, 3, 3};
  CHECK(silverman_bandwidth(flat) == 1e-6);
}

TEST_CASE("KdeConfig rejects non-positive bandwidth and tiny grids") {
  CHECK(test::code_of([] { KdeConfig{-1.0}.validate(); }) == ErrorCode::InvalidArgument);
  CHECK(test::code_of([] { KdeConfig{std::nullopt, 10}.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("median contour of trivial clouds") {
  const PolarContour a = fit_median_contour(test::repeat({0, 0, 1, 1, 0}, 101));
  CHECK(a.rays() == kDefaultRays);
  for (double r : a.radii) CHECK(r == doctest::Approx(1.0));
  const PolarContour b = fit_median_contour(test::cloud_of({{0, 0, 1, 1, 0}, {0, 0, 2, 2, 0}, {0, 0, 3, 3, 0}}));
  for (double r : b.radii) CHECK(r == doctest::Approx(2.0));
  CHECK(test::code_of([] { fit_median_contour(test::repeat({0, 0, 1, 1, 0}, 3), 4); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("mode contour of identical circles and of a bimodal cloud") {
  const PolarContour a = fit_mode_contour(test::repeat({0, 0, 2, 2, 0}, 50));
  for (double r : a.radii) CHECK(r == doctest::Approx(2.0));

  auto c = test::repeat({0, 0, 5, 5, 0}, 10);
  test::append(c, test::repeat({0, 0, 9, 9, 0}, 14));
  const PolarContour m = fit_mode_contour(c, 64, {0.5});
  for (double r : m.radii) CHECK(r == doctest::Approx(9.0).epsilon(1e-3));
}

TEST_CASE("contour_radius_at interpolates periodically") {
  CHECK(contour_radius_at(test::constant(1.7, 16), 2.3) == doctest::Approx(1.7));
  PolarContour c{{0, 0}, std::vector<double>(8, 0.0)};
  for (std::size_t k = 0; k < 8; ++k) c.radii[k] = 1.0 + double(k);
  CHECK(contour_radius_at(c, c.theta(3)) == c.radii[3]);
  CHECK(contour_radius_at(c, pi / 8) == doctest::Approx(1.5));
  CHECK(contour_radius_at(c, -pi / 8) == doctest::Approx(4.5));
  CHECK(contour_radius_at(c, 2 * pi + pi / 4) == doctest::Approx(2.0));
  PolarContour quad{{0, 0}, {1, 3, 1, 3, 1, 3, 1, 3}};
  CHECK(contour_radius_at(quad, pi / 8) == doctest::Approx(2.0));
}

TEST_CASE("property: contours are deterministic and serial equals parallel") {
  SynthSpec s;
  s.seed = 31;
  s.outlier_ratio = 0.2;
  const EllipseCloud c = sample_cloud(generate(s), 3000, 32);
  CHECK(fit_median_contour(c, 360, Exec::serial).radii == fit_median_contour(c, 360, Exec::parallel).radii);
  CHECK(fit_mode_contour(c, 360, {}, Exec::serial).radii == fit_mode_contour(c, 360, {}, Exec::parallel).radii);
}

TEST_CASE("property: median contour adjacent jumps halve with each doubling of the rays") {
  SynthSpec s;
  s.seed = 41;
  const EllipseCloud c = sample_cloud(generate(s), 10000, 42);
  double prev = max_jump(fit_median_contour(c, 360));
  for (std::size_t rays : {720u, 1440u, 2880u}) {
    const double j = max_jump(fit_median_contour(c, rays));
    CHECK(j <= 0.55 * prev);
    prev = j;
  }
}

TEST_CASE("property: median contour follows translations and quarter turns of the input") {
  SynthSpec s;
  s.seed = 51;
  s.outlier_ratio = 0.1;
  const PointSet ps = generate(s);
  const EllipseCloud c0 = sample_cloud(ps, 2000, 52);
  const PolarContour base = fit_median_contour(c0, 360);
  for (int q : {0, 1, 2, 3}) {
    const Point2 shift{17.25, -40.5};
    const PolarContour moved = fit_median_contour(sample_cloud(transform(ps, q, shift), 2000, 52), 360);
    Point2 ctr = base.center;
    for (int i = 0; i < q; ++i) ctr = {-ctr.y, ctr.x};
    CHECK(std::abs(moved.center.x - ctr.x - shift.x) < 1e-6);
    CHECK(std::abs(moved.center.y - ctr.y - shift.y) < 1e-6);
    for (std::size_t k = 0; k < 360; ++k) {
      CHECK(std::abs(moved.radii[(k + 90 * q) % 360] - base.radii[k]) < 1e-6);
    }
  }
}

TEST_CASE("property: on outlier-free data both contours stay within 3 sigma of the truth") {
  SynthSpec s;
  s.seed = 61;
  s.noise_sigma = 1.0;
  const EllipseCloud c = sample_cloud(generate(s), 10000, 62);
  for (const auto& fit : {fit_median_contour(c), fit_mode_contour(c)}) {
    const PolarContour truth = ellipse_to_contour(s.truth, fit.center, fit.rays());
    for (std::size_t k = 0; k < fit.rays(); ++k) CHECK(std::abs(fit.radii[k] - truth.radii[k]) < 3.0);
  }
}
