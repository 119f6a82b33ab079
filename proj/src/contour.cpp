#include "contourfit/contour.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "contourfit/error.hpp"
#include "contourfit/stats.hpp"

namespace contourfit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// exp(-0.5 * 8.5^2) ~ 2e-16: contributions beyond this are below double resolution
constexpr double kKernelCutoff = 8.5;
constexpr std::size_t kMaxGrid = 1 << 16;
constexpr std::size_t kMaxPeaks = 8;
constexpr double kPeakFraction = 0.9;

double golden_max(std::span<const double> sorted, double bw, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = kde_density(sorted, bw, c);
  double fd = kde_density(sorted, bw, d);
  const double tol = 1e-10 * std::max(bw, std::abs(a) + std::abs(b));
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = kde_density(sorted, bw, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = kde_density(sorted, bw, d);
    }
  }
  return 0.5 * (a + b);
}

template <typename RadiusFn>
PolarContour sweep(const EllipseCloud& cloud, std::size_t rays, Exec exec, RadiusFn&& reduce) {
  if (rays < kMinRays) throw Error(ErrorCode::InvalidArgument, "contour needs at least 8 rays");
  PolarContour out;
  out.center = median_center(cloud);
  const EnclosingSet enclosing(cloud, out.center);
  if (enclosing.empty()) {
    throw Error(ErrorCode::NoEnclosingEllipse,
                "no cloud ellipse encloses the median center (theta = 0)");
  }
  out.radii.assign(rays, 0.0);
  const auto n = static_cast<std::ptrdiff_t>(rays);
  auto body = [&](std::ptrdiff_t k, std::vector<double>& buf) {
    enclosing.radii(kTwoPi * static_cast<double>(k) / static_cast<double>(rays), buf);
    out.radii[static_cast<std::size_t>(k)] = reduce(std::span<const double>(buf));
  };
  if (exec == Exec::parallel) {
#pragma omp parallel
    {
      std::vector<double> buf;
#pragma omp for schedule(dynamic, 4)
      for (std::ptrdiff_t k = 0; k < n; ++k) body(k, buf);
    }
  } else {
    std::vector<double> buf;
    for (std::ptrdiff_t k = 0; k < n; ++k) body(k, buf);
  }
  return out;
}

}  // namespace

double PolarContour::theta(std::size_t k) const {
  return kTwoPi * static_cast<double>(k) / static_cast<double>(radii.size());
}

Point2 PolarContour::point(std::size_t k) const {
  const double t = theta(k);
  return {center.x + radii[k] * std::cos(t), center.y + radii[k] * std::sin(t)};
}

void KdeConfig::validate() const {
  if (bandwidth && !(*bandwidth > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "KDE bandwidth must be > 0");
  }
  if (grid_points < 256) throw Error(ErrorCode::InvalidArgument, "KDE grid_points must be >= 256");
}

double median_radius(std::span<const double> radii) {
  if (radii.empty()) throw Error(ErrorCode::EmptyIntersections, "no intersections to reduce");
  return stats::median_of(radii);
}

double silverman_bandwidth(std::span<const double> values) {
  const double n = static_cast<double>(values.size());
  double spread = stats::stddev(values);
  if (values.size() >= 2) {
    const double q = stats::iqr(values) / 1.34;
    if (q > 0.0) spread = std::min(spread, q);
  }
  return std::max(0.9 * spread * std::pow(n, -0.2), 1e-6);
}

double kde_density(std::span<const double> sorted, double bw, double x) {
  const auto lo = std::lower_bound(sorted.begin(), sorted.end(), x - kKernelCutoff * bw);
  const auto hi = std::upper_bound(lo, sorted.end(), x + kKernelCutoff * bw);
  const double inv = 1.0 / bw;
  double acc = 0.0;
  for (auto it = lo; it != hi; ++it) {
    const double z = (x - *it) * inv;
    acc += std::exp(-0.5 * z * z);
  }
  return acc;
}

double kde_mode(std::span<const double> radii, const KdeConfig& cfg) {
  cfg.validate();
  if (radii.empty()) throw Error(ErrorCode::EmptyIntersections, "no intersections to reduce");
  std::vector<double> sorted(radii.begin(), radii.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) return sorted.front();

  const double bw = cfg.bandwidth ? *cfg.bandwidth : silverman_bandwidth(sorted);
  const double lo = sorted.front() - 3.0 * bw;
  const double hi = sorted.back() + 3.0 * bw;
  const double want = std::ceil((hi - lo) / (0.25 * bw)) + 1.0;
  const std::size_t g = std::clamp(static_cast<std::size_t>(std::min(want, double(kMaxGrid))),
                                   cfg.grid_points, kMaxGrid);
  const double step = (hi - lo) / static_cast<double>(g - 1);

  // Linear binning of the samples onto the grid, then a discrete convolution
  // with the sampled kernel. This approximates the grid scan; the exact
  // density decides between the surviving peaks below.
  std::vector<double> mass(g, 0.0);
  for (double r : sorted) {
    const double pos = (r - lo) / step;
    const auto j = std::min(static_cast<std::size_t>(pos), g - 2);
    const double f = pos - static_cast<double>(j);
    mass[j] += 1.0 - f;
    mass[j + 1] += f;
  }
  const auto reach = static_cast<std::ptrdiff_t>(
      std::min<double>(static_cast<double>(g - 1), std::ceil(kKernelCutoff * bw / step)));
  std::vector<double> kernel(static_cast<std::size_t>(reach) + 1);
  for (std::ptrdiff_t k = 0; k <= reach; ++k) {
    const double z = static_cast<double>(k) * step / bw;
    kernel[static_cast<std::size_t>(k)] = std::exp(-0.5 * z * z);
  }
  const auto gi = static_cast<std::ptrdiff_t>(g);
  std::vector<double> dens(g, 0.0);
  for (std::ptrdiff_t j = 0; j < gi; ++j) {
    if (mass[static_cast<std::size_t>(j)] == 0.0) continue;
    const double m = mass[static_cast<std::size_t>(j)];
    const std::ptrdiff_t a = std::max<std::ptrdiff_t>(0, j - reach);
    const std::ptrdiff_t b = std::min<std::ptrdiff_t>(gi - 1, j + reach);
    for (std::ptrdiff_t i = a; i <= b; ++i) {
      dens[static_cast<std::size_t>(i)] += m * kernel[static_cast<std::size_t>(std::abs(i - j))];
    }
  }

  const double top = *std::max_element(dens.begin(), dens.end());
  std::vector<std::pair<double, std::size_t>> peaks;
  for (std::size_t j = 0; j < g; ++j) {
    const double left = j > 0 ? dens[j - 1] : -1.0;
    const double right = j + 1 < g ? dens[j + 1] : -1.0;
    if (dens[j] >= left && dens[j] >= right && dens[j] >= kPeakFraction * top) {
      peaks.emplace_back(dens[j], j);
    }
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  if (peaks.size() > kMaxPeaks) peaks.resize(kMaxPeaks);

  double best_x = 0.0, best_f = -1.0;
  for (const auto& [unused, j] : peaks) {
    const double a = lo + step * static_cast<double>(j == 0 ? 0 : j - 1);
    const double b = lo + step * static_cast<double>(std::min(j + 1, g - 1));
    const double x = golden_max(sorted, bw, a, b);
    const double f = kde_density(sorted, bw, x);
    if (f > best_f * (1.0 + 1e-12) || (f >= best_f * (1.0 - 1e-12) && x < best_x)) {
      best_f = f;
      best_x = x;
    }
  }
  return best_x;
}

PolarContour fit_median_contour(const EllipseCloud& cloud, std::size_t rays, Exec exec) {
  return sweep(cloud, rays, exec, [](std::span<const double> r) { return median_radius(r); });
}

PolarContour fit_mode_contour(const EllipseCloud& cloud, std::size_t rays, const KdeConfig& cfg,
                              Exec exec) {
  cfg.validate();
  return sweep(cloud, rays, exec, [&cfg](std::span<const double> r) { return kde_mode(r, cfg); });
}

double contour_radius_at(const PolarContour& c, double theta) {
  const std::size_t k = c.rays();
  double t = std::fmod(theta, kTwoPi);
  if (t < 0) t += kTwoPi;
  double pos = t / kTwoPi * static_cast<double>(k);
  const double nearest = std::round(pos);
  if (std::abs(pos - nearest) < 1e-9) {
    return c.radii[static_cast<std::size_t>(nearest) % k];
  }
  const auto i = static_cast<std::size_t>(std::floor(pos)) % k;
  const double f = pos - std::floor(pos);
  return (1.0 - f) * c.radii[i] + f * c.radii[(i + 1) % k];
}

}  // namespace contourfit
