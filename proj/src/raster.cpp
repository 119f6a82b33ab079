#include "contourfit/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "contourfit/rng.hpp"

namespace contourfit {

double BlobSpec::radius(double t) const {
  const double local = t - shape.angle;
  const double c = std::cos(local) / shape.major, s = std::sin(local) / shape.minor;
  const double base = 1.0 / std::sqrt(c * c + s * s);
  return base * (1.0 + lobe_amplitude * std::cos(lobes * t + lobe_phase));
}

double BlobSpec::area() const {
  constexpr int n = 1 << 16;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = radius(2.0 * std::numbers::pi * i / n);
    acc += r * r;
  }
  return 0.5 * acc * 2.0 * std::numbers::pi / n;
}

PolarContour BlobSpec::truth_contour(std::size_t rays) const {
  PolarContour c;
  c.center = shape.center();
  c.radii.resize(rays);
  for (std::size_t k = 0; k < rays; ++k) c.radii[k] = radius(c.theta(k));
  return c;
}

GrayImage render_blob(const BlobSpec& spec) {
  GrayImage img(spec.width, spec.height);
  Rng rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const int ss = std::max(1, spec.supersample);
  const double fg = spec.foreground, bg = spec.background;

  auto dark = [&spec](double x, double y) {
    const double dx = x - spec.shape.cx, dy = y - spec.shape.cy;
    if (std::hypot(dx, dy) <= spec.radius(std::atan2(dy, dx))) return true;
    for (const auto& s : spec.stripes) {
      const double nx = -std::sin(s.angle), ny = std::cos(s.angle);
      if (std::abs((x - s.through.x) * nx + (y - s.through.y) * ny) <= 0.5 * s.width) return true;
    }
    return false;
  };

  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      int hits = 0;
      for (int j = 0; j < ss; ++j) {
        for (int i = 0; i < ss; ++i) {
          const double sx = x - 0.5 + (i + 0.5) / ss, sy = y - 0.5 + (j + 0.5) / ss;
          hits += dark(sx, sy) ? 1 : 0;
        }
      }
      const double cover = static_cast<double>(hits) / (ss * ss);
      const double v = bg + cover * (fg - bg) + spec.noise_sigma * noise(rng);
      img.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return img;
}

std::vector<BlobSpec> synthetic_sequence(std::size_t count, std::uint64_t seed) {
  std::vector<BlobSpec> out;
  const std::size_t half = count / 2;
  for (std::size_t i = 0; i < count; ++i) {
    const bool star = i >= half;
    const double u = static_cast<double>(star ? i - half : i) / static_cast<double>(std::max<std::size_t>(1, star ? count - half : half));
    BlobSpec b;
    b.shape = {128.0 + 6.0 * std::sin(2.0 * std::numbers::pi * u), 126.0 + 4.0 * std::cos(2.0 * std::numbers::pi * u),
               52.0 + 16.0 * u, 36.0 + 8.0 * u, 0.7 * u - 0.2};
    if (star) {
      b.lobes = 5;
      b.lobe_amplitude = 0.08 + 0.06 * u;
      b.lobe_phase = 1.3 * u;
      b.stripes.push_back({b.shape.center(), 0.4 + 0.3 * u, 3.0});
    }
    b.seed = derive_seed(seed, {static_cast<std::uint64_t>(i), 0xb10b});
    out.push_back(b);
  }
  return out;
}

}  // namespace contourfit
