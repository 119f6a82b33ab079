#include <cmath>
#include <numbers>
#include <random>

#include "../oracles.hpp"
#include "contourfit/edges.hpp"
#include "contourfit/error.hpp"
#include "contourfit/raster.hpp"
#include "contourfit/synth.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace contourfit;
using std::numbers::pi;

namespace {

BinaryImage disk(int w, int h, double cx, double cy, double r) {
  BinaryImage b(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) b.set(x, y, std::hypot(x - cx, y - cy) <= r);
  return b;
}

BinaryImage complement(const BinaryImage& in) {
  BinaryImage out = in;
  for (auto& v : out.bits) v = v ? 0 : 1;
  return out;
}

/// Set-theoretic disk morphology by brute force.
BinaryImage oracle_morph(const BinaryImage& in, int r, bool dilation) {
  BinaryImage out(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      bool hit = !dilation;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          if (dx * dx + dy * dy > r * r) continue;
          const int u = x + dx, v = y + dy;
          const bool inside = u >= 0 && v >= 0 && u < in.width && v < in.height;
          const bool fg = inside ? in.at(u, v) : !dilation;
          if (dilation && fg) hit = true;
          if (!dilation && !fg) hit = false;
        }
      }
      out.set(x, y, hit);
    }
  }
  return out;
}

GrayImage from_mask(const BinaryImage& m, std::uint8_t fg = 40, std::uint8_t bg = 210) {
  GrayImage g(m.width, m.height, bg);
  for (std::size_t i = 0; i < m.bits.size(); ++i)
    if (m.bits[i]) g.pixels[i] = fg;
  return g;
}

MorphProgram prog(std::string_view s) { return MorphProgram::parse(s); }

}  // namespace

TEST_CASE("otsu separates two intensities and rejects constant images") {
  GrayImage g(32, 32, 200);
  for (std::size_t i = 0; i < g.pixels.size() / 2; ++i) g.pixels[i] = 10;
  const OtsuResult r = otsu_threshold(g);
  CHECK(r.threshold >= 10);
  CHECK(r.threshold <= 199);
  for (std::size_t i = 0; i < g.pixels.size(); ++i) CHECK(bool(r.foreground.bits[i]) == (g.pixels[i] == 10));
  CHECK(test::code_of([] { otsu_threshold(GrayImage(32, 32, 7)); }) == ErrorCode::ConstantImage);
}

TEST_CASE("otsu equals the exhaustive oracle on Gaussian mixtures") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    std::normal_distribution<double> a(60.0, 10.0), b(180.0, 10.0);
    std::bernoulli_distribution pick(0.3 + 0.1 * trial);
    GrayImage g(64, 64);
    for (auto& p : g.pixels) p = std::uint8_t(std::clamp(std::lround(pick(rng) ? a(rng) : b(rng)), 0L, 255L));
    CHECK(otsu_threshold(g).threshold == oracle::otsu(g));
  }
}

TEST_CASE("morphology program parsing") {
  const MorphProgram p = prog("erode:2,dilate:3");
  REQUIRE(p.steps.size() == 2);
  CHECK(p.steps[0].op == MorphOp::erode);
  CHECK(p.steps[1].radius == 3);
  CHECK(MorphProgram::parse(p.to_string()).to_string() == p.to_string());
  CHECK(test::code_of([] { prog("open:2"); }) == ErrorCode::ParseError);
  CHECK(test::code_of([] { prog("erode"); }) == ErrorCode::ParseError);
  CHECK(test::code_of([] { prog("erode:x"); }) == ErrorCode::ParseError);
  CHECK(test::code_of([] { prog("erode:0").validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("opening removes single-pixel specks") {
  BinaryImage b = disk(64, 64, 32, 32, 12);
  b.set(3, 3, true);
  b.set(60, 50, true);
  const BinaryImage o = run_morph(b, prog("erode:1,dilate:1"));
  CHECK_FALSE(o.at(3, 3));
  CHECK_FALSE(o.at(60, 50));
  CHECK(o.at(32, 32));
}

TEST_CASE("closing leaves a convex blob unchanged") {
  const BinaryImage b = disk(80, 80, 40, 40, 20);
  CHECK(run_morph(b, prog("dilate:3,erode:3")) == b);
}

TEST_CASE("opening with radius 2 erases a 3-pixel wire but keeps a 30-pixel blob") {
  BinaryImage b = disk(96, 96, 48, 48, 15);
  for (int y = 0; y < 96; ++y)
    for (int x = 0; x < 3; ++x) b.set(10 + x, y, true);
  const BinaryImage o = run_morph(b, prog("erode:2,dilate:2"));
  CHECK(o == oracle_morph(oracle_morph(b, 2, false), 2, true));
  for (int y = 0; y < 96; ++y) CHECK_FALSE(o.at(11, y));
  CHECK(o.at(48, 48));
  CHECK(o.count() > 600);
}

TEST_CASE("property: dilation and erosion match the set oracle, are dual, and opening/closing are idempotent") {
  std::mt19937_64 rng(5);
  std::bernoulli_distribution coin(0.35);
  BinaryImage b(40, 33);
  for (auto& v : b.bits) v = coin(rng) ? 1 : 0;
  for (int r : {1, 2, 3}) {
    const BinaryImage d = dilate(b, r), e = erode(b, r);
    CHECK(d == oracle_morph(b, r, true));
    CHECK(e == oracle_morph(b, r, false));
    CHECK(complement(dilate(complement(b), r)) == e);
    CHECK(dilate(b, r, Exec::serial) == d);
    CHECK(erode(b, r, Exec::serial) == e);
    const BinaryImage open = dilate(e, r), close = erode(d, r);
    CHECK(dilate(erode(open, r), r) == open);
    CHECK(erode(dilate(close, r), r) == close);
  }
}

TEST_CASE("select_center_region examples") {
  const BinaryImage one = disk(64, 64, 30, 34, 10);
  CHECK(select_center_region(one) == one);

  BinaryImage two = one;
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 6; ++x) two.set(x, y, true);
  CHECK(select_center_region(two) == one);

  BinaryImage tie(64, 64);
  for (int y = 27; y < 37; ++y)
    for (int x = 5; x < 15; ++x) tie.set(x, y, true);
  for (int y = 27; y < 32; ++y)
    for (int x = 50; x < 60; ++x) tie.set(x, y, true);
  const Region r = select_center_region_info(tie);
  CHECK(r.area == 100);
  CHECK(r.mask.at(10, 30));
  CHECK_FALSE(r.mask.at(55, 30));

  CHECK(test::code_of([] { select_center_region(BinaryImage(20, 20)); }) == ErrorCode::NoForeground);
}

TEST_CASE("canny marks a vertical step with a one-pixel line") {
  GrayImage g(48, 48, 50);
  for (int y = 0; y < 48; ++y)
    for (int x = 24; x < 48; ++x) g.at(x, y) = 200;
  const BinaryImage e = canny_edges(g);
  for (int y = 8; y < 40; ++y) {
    int n = 0, where = -1;
    for (int x = 0; x < 48; ++x)
      if (e.at(x, y)) {
        ++n;
        where = x;
      }
    CHECK(n == 1);
    CHECK(std::abs(where - 23.5) <= 1.0);
  }
  CHECK(canny_edges(GrayImage(32, 32, 90)).count() == 0);
}

TEST_CASE("canny ring of a filled disk has the disk radius") {
  const GrayImage g = from_mask(disk(128, 128, 64, 64, 40));
  const BinaryImage e = canny_edges(g);
  double s = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < 128; ++y)
    for (int x = 0; x < 128; ++x)
      if (e.at(x, y)) {
        s += std::hypot(x - 64.0, y - 64.0);
        ++n;
      }
  REQUIRE(n > 100);
  CHECK(std::abs(s / double(n) - 40.0) < 1.5);
  CHECK(canny_edges(g, 2.0, 0.1, 0.3, Exec::serial) == e);
  CHECK(test::code_of([&] { canny_edges(g, 2.0, 0.4, 0.3); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("radial_outermost keeps the outer ring and drops interior specks") {
  BinaryImage e(128, 128);
  for (int k = 0; k < 2000; ++k) {
    const double t = 2 * pi * k / 2000.0;
    e.set(int(std::lround(64 + 40 * std::cos(t))), int(std::lround(64 + 40 * std::sin(t))), true);
    e.set(int(std::lround(64 + 20 * std::cos(t))), int(std::lround(64 + 20 * std::sin(t))), true);
  }
  e.set(70, 66, true);
  const PointSet ps = radial_outermost(e, {64, 64}, 90);
  CHECK(ps.size() <= 90);
  CHECK(ps.size() >= 85);
  for (const auto& p : ps.points) {
    CHECK(e.at(int(p.x), int(p.y)));
    CHECK(std::hypot(p.x - 64, p.y - 64) > 38.0);
  }
  CHECK(test::code_of([] { radial_outermost(BinaryImage(20, 20), {10, 10}, 36); }) == ErrorCode::NoEdges);
}

TEST_CASE("PGM round trip") {
  const auto dir = test::scratch("pgm");
  GrayImage g(20, 17);
  for (std::size_t i = 0; i < g.pixels.size(); ++i) g.pixels[i] = std::uint8_t(i * 7);
  write_pgm(dir / "a.pgm", g);
  const GrayImage r = read_pgm(dir / "a.pgm");
  CHECK(r.width == 20);
  CHECK(r.height == 17);
  CHECK(r.pixels == g.pixels);
  CHECK(test::code_of([&] { read_pgm(dir / "missing.pgm"); }) == ErrorCode::IoError);
}

TEST_CASE("droplet pipeline on an ellipse blob gets the area within 3%") {
  BlobSpec b;
  b.shape = {128, 128, 60, 40, 0.3};
  const GrayImage img = render_blob(b);
  DropletConfig cfg;
  const double truth = pi * 60 * 40;
  for (auto algo : {Algorithm::median_contour, Algorithm::ransac}) {
    const DropletResult r = analyze_droplet(img, cfg, algo);
    INFO(label(algo));
    CHECK(std::abs(r.area - truth) / truth < 0.03);
  }
}

TEST_CASE("droplet pipeline on lobed blobs: contours beat the ellipse fits") {
  const std::vector<Algorithm> algos{Algorithm::median_contour, Algorithm::mode_contour, Algorithm::ransac,
                                     Algorithm::rht, Algorithm::rosin};
  std::vector<double> area_err(algos.size(), 0.0);
  for (double amp : {0.04, 0.08, 0.12}) {
    for (int lobes : {3, 5}) {
      BlobSpec b;
      b.shape = {128, 128, 60, 45, 0.2};
      b.lobes = lobes;
      b.lobe_amplitude = amp;
      const auto rs = analyze_droplet_all(render_blob(b), DropletConfig{}, algos);
      const PolarContour truth = b.truth_contour();
      std::vector<double> dev;
      for (std::size_t i = 0; i < algos.size(); ++i) {
        area_err[i] += std::abs(rs[i].area - b.area()) / b.area() / 6.0;
        dev.push_back(edge_deviation(fit_to_contour(rs[i].fit), truth));
      }
      for (std::size_t i = 2; i < algos.size(); ++i) {
        CHECK(dev[0] < dev[i]);
        CHECK(dev[1] < dev[i]);
      }
    }
  }
  for (std::size_t i = 2; i < algos.size(); ++i) {
    CHECK(area_err[0] < area_err[i]);
    CHECK(area_err[1] < area_err[i]);
  }
}

TEST_CASE("property: droplet pipeline is deterministic and exec independent") {
  BlobSpec b;
  b.lobes = 4;
  b.lobe_amplitude = 0.1;
  b.stripes.push_back({{128, 128}, 0.5, 3.0});
  const GrayImage img = render_blob(b);
  DropletConfig cfg;
  const DropletPoints a = extract_droplet_points(img, cfg);
  const DropletPoints s = extract_droplet_points(img, cfg, Exec::serial);
  CHECK(a.points.points == s.points.points);
  CHECK(a.region.mask == s.region.mask);
  const DropletResult x = analyze_droplet(img, cfg, Algorithm::mode_contour);
  const DropletResult y = analyze_droplet(img, cfg, Algorithm::mode_contour, Exec::serial);
  CHECK(std::get<PolarContour>(x.fit).radii == std::get<PolarContour>(y.fit).radii);
  CHECK(x.cloud.fingerprint() == y.cloud.fingerprint());
}

TEST_CASE("rendered blob area matches its analytic area") {
  BlobSpec b;
  b.noise_sigma = 0.0;
  const GrayImage img = render_blob(b);
  double dark = 0.0;
  for (auto p : img.pixels) dark += double(b.background - p) / double(b.background - b.foreground);
  CHECK(std::abs(dark - b.area()) / b.area() < 0.01);
  CHECK(b.area() == doctest::Approx(pi * 60 * 40).epsilon(1e-6));
}
