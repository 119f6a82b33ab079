#include <cmath>
#include <numbers>

#include "../oracles.hpp"
#include "contourfit/cloud.hpp"
#include "contourfit/error.hpp"
#include "contourfit/synth.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace contourfit;
using std::numbers::pi;

TEST_CASE("five exact ellipse points give a one-ellipse cloud") {
  const Ellipse e{1, 2, 3, 2, 0.4};
  PointSet ps;
  for (double t : {0.0, 1.2, 2.5, 3.7, 5.0}) ps.points.push_back(e.point_at(t));
  const EllipseCloud c = sample_cloud(ps, 1, 9);
  REQUIRE(c.size() == 1);
  CHECK(std::abs(c.ellipses[0].major - 3.0) < 1e-9);
  CHECK(std::abs(c.ellipses[0].minor - 2.0) < 1e-9);
}

TEST_CASE("collinear points give EmptyCloud; fewer than five points give TooFewPoints") {
  PointSet ps;
  for (int i = 0; i < 5; ++i) ps.points.push_back({double(i), 0.0});
  CHECK(test::code_of([&] { sample_cloud(ps, 100, 1); }) == ErrorCode::EmptyCloud);
  ps.points.pop_back();
  CHECK(test::code_of([&] { sample_cloud(ps, 100, 1); }) == ErrorCode::TooFewPoints);
}

TEST_CASE("500 noisy points with 100 outliers give roughly half ellipses") {
  SynthSpec s;
  s.seed = 3;
  s.outlier_ratio = 0.1667;
  const EllipseCloud c = sample_cloud(generate(s), 10000, 4);
  const double yield = double(c.size()) / double(c.attempted);
  CHECK(c.attempted == 10000);
  CHECK(yield > 0.3);
  CHECK(yield < 0.8);
}

TEST_CASE("cloud members are ellipses through their source points") {
  SynthSpec s;
  s.seed = 5;
  s.outlier_ratio = 0.2;
  const PointSet ps = generate(s);
  const EllipseCloud c = sample_cloud(ps, 2000, 6);
  REQUIRE(c.conics.size() == c.size());
  REQUIRE(c.quintuples.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(is_ellipse(c.conics[i]));
    for (auto k : c.quintuples[i]) CHECK(std::abs(c.conics[i](ps.points[k])) < 1e-9);
  }
}

TEST_CASE("quintuples hold distinct indices and follow the seed") {
  const auto q = draw_quintuples(7, 500, 11);
  REQUIRE(q.size() == 500);
  for (const auto& t : q) {
    for (int i = 0; i < 5; ++i) {
      CHECK(t[i] < 7);
      for (int j = i + 1; j < 5; ++j) CHECK(t[i] != t[j]);
    }
  }
  CHECK(draw_quintuples(7, 500, 11) == q);
  CHECK(draw_quintuples(7, 500, 12) != q);
}

TEST_CASE("property: cloud is deterministic and serial equals parallel") {
  SynthSpec s;
  s.seed = 8;
  s.outlier_ratio = 0.3;
  const PointSet ps = generate(s);
  const EllipseCloud a = sample_cloud(ps, 3000, 21, Exec::parallel);
  const EllipseCloud b = sample_cloud(ps, 3000, 21, Exec::parallel);
  const EllipseCloud c = sample_cloud(ps, 3000, 21, Exec::serial);
  CHECK(a.ellipses == b.ellipses);
  CHECK(a.ellipses == c.ellipses);
  CHECK(a.quintuples == c.quintuples);
  CHECK(a.fingerprint() == c.fingerprint());
  CHECK(a.fingerprint() != sample_cloud(ps, 3000, 22).fingerprint());
}

TEST_CASE("median_center examples") {
  CHECK(median_center(test::cloud_of({{0, 0, 1, 1, 0}, {1, 1, 1, 1, 0}, {2, 2, 1, 1, 0}})) == Point2{1, 1});
  CHECK(median_center(test::cloud_of({{3, 4, 1, 1, 0}})) == Point2{3, 4});
  CHECK(median_center(test::cloud_of({{0, 0, 1, 1, 0}, {0, 0, 1, 1, 0}, {0, 0, 1, 1, 0}, {100, 100, 1, 1, 0}})) ==
        Point2{0, 0});
  CHECK(test::code_of([] { median_center(EllipseCloud{}); }) == ErrorCode::EmptyCloud);
}

TEST_CASE("ray_radii examples") {
  const auto rings = test::cloud_of({{0, 0, 1, 1, 0}, {0, 0, 2, 2, 0}, {0, 0, 3, 3, 0}});
  for (double t : {0.0, 1.0, 4.0}) {
    auto r = ray_radii(rings, {0, 0}, t);
    std::sort(r.begin(), r.end());
    REQUIRE(r.size() == 3);
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[1] == doctest::Approx(2.0));
    CHECK(r[2] == doctest::Approx(3.0));
  }
  CHECK(ray_radii(test::cloud_of({{5, 5, 1, 1, 0}}), {0, 0}, 0.0).empty());
  auto r = ray_radii(test::cloud_of({{0, 0, 1, 1, 0}, {0.5, 0, 1, 1, 0}}), {0, 0}, 0.0);
  std::sort(r.begin(), r.end());
  REQUIRE(r.size() == 2);
  CHECK(r[0] == doctest::Approx(1.0));
  CHECK(r[1] == doctest::Approx(1.5));
}

TEST_CASE("property: ray_radii matches enclosure count and ray_intersect") {
  SynthSpec s;
  s.seed = 13;
  s.outlier_ratio = 0.3;
  const EllipseCloud c = sample_cloud(generate(s), 1000, 14);
  const Point2 o = median_center(c);
  std::size_t enclosing = 0;
  for (const auto& e : c.ellipses) enclosing += contains_point(e, o) ? 1 : 0;
  for (double t = 0.0; t < 2 * pi; t += 0.37) {
    const auto r = ray_radii(c, o, t);
    CHECK(r.size() == enclosing);
    CHECK(r.size() <= c.size());
    std::size_t k = 0;
    for (const auto& e : c.ellipses) {
      if (!contains_point(e, o)) continue;
      const auto x = ray_intersect(e, o, t);
      REQUIRE(x.size() == 1);
      CHECK(std::abs(r[k++] - x[0]) < 1e-9 * e.major);
    }
  }
}
