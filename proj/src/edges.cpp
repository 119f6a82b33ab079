#include "contourfit/edges.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <numbers>
#include <boost/multiprecision/cpp_int.hpp>
#include <sstream>

#include "contourfit/error.hpp"

namespace contourfit {

namespace {

std::vector<std::pair<int, int>> disk(int radius) {
  std::vector<std::pair<int, int>> out;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dx * dx + dy * dy <= radius * radius) out.emplace_back(dx, dy);
    }
  }
  return out;
}

template <typename Body>
void for_rows(int height, Exec exec, Body&& body) {
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int y = 0; y < height; ++y) body(y);
  } else {
    for (int y = 0; y < height; ++y) body(y);
  }
}

BinaryImage morph(const BinaryImage& in, int radius, bool dilation, Exec exec) {
  const auto se = disk(radius);
  BinaryImage out(in.width, in.height);
  const bool outside = !dilation;
  for_rows(in.height, exec, [&](int y) {
    for (int x = 0; x < in.width; ++x) {
      bool v = !dilation;
      for (const auto& [dx, dy] : se) {
        const int xx = x + dx, yy = y + dy;
        const bool s = (xx < 0 || yy < 0 || xx >= in.width || yy >= in.height) ? outside
                                                                               : in.at(xx, yy);
        if (dilation && s) {
          v = true;
          break;
        }
        if (!dilation && !s) {
          v = false;
          break;
        }
      }
      out.set(x, y, v);
    }
  });
  return out;
}

std::vector<double> gaussian_kernel(double sigma) {
  const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
  double sum = 0;
  for (int i = -r; i <= r; ++i) {
    k[static_cast<std::size_t>(i + r)] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[static_cast<std::size_t>(i + r)];
  }
  for (auto& v : k) v /= sum;
  return k;
}

}  // namespace

OtsuResult otsu_threshold(const GrayImage& img) {
  using boost::multiprecision::int256_t;
  std::array<std::uint64_t, 256> hist{};
  for (auto p : img.pixels) ++hist[p];
  const std::uint64_t total = img.pixels.size();
  std::uint64_t sum_total = 0;
  for (int i = 0; i < 256; ++i) sum_total += static_cast<std::uint64_t>(i) * hist[i];

  // between-class variance * N^2 = diff^2 / (n0 * n1), compared exactly
  int best_t = -1;
  int256_t best_num = 0, best_den = 1;
  std::uint64_t n0 = 0, sum0 = 0;
  for (int t = 0; t < 255; ++t) {
    n0 += hist[t];
    sum0 += static_cast<std::uint64_t>(t) * hist[t];
    const std::uint64_t n1 = total - n0;
    if (n0 == 0 || n1 == 0) continue;
    const int256_t diff = int256_t(sum0) * total - int256_t(sum_total) * n0;
    const int256_t num = diff * diff, den = int256_t(n0) * n1;
    if (best_t < 0 || num * best_den > best_num * den) {
      best_num = num;
      best_den = den;
      best_t = t;
    }
  }
  if (best_t < 0) throw Error(ErrorCode::ConstantImage, "image has a single intensity");
  OtsuResult res{best_t, BinaryImage(img.width, img.height)};
  for (std::size_t i = 0; i < img.pixels.size(); ++i) res.foreground.bits[i] = img.pixels[i] <= best_t;
  return res;
}

void MorphProgram::validate() const {
  if (steps.empty()) throw Error(ErrorCode::InvalidArgument, "morphology program is empty");
  for (const auto& s : steps) {
    if (s.radius < 1) throw Error(ErrorCode::InvalidArgument, "structuring radius must be >= 1");
  }
}

MorphProgram MorphProgram::parse(std::string_view text) {
  MorphProgram prog;
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }),
               item.end());
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::ParseError, "morph step '" + item + "' must be op:radius");
    }
    const std::string op = item.substr(0, colon);
    MorphStep step{};
    if (op == "dilate") {
      step.op = MorphOp::dilate;
    } else if (op == "erode") {
      step.op = MorphOp::erode;
    } else {
      throw Error(ErrorCode::ParseError, "unknown morph op '" + op + "'");
    }
    try {
      step.radius = std::stoi(item.substr(colon + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad radius in morph step '" + item + "'");
    }
    prog.steps.push_back(step);
  }
  prog.validate();
  return prog;
}

std::string MorphProgram::to_string() const {
  std::string out;
  for (const auto& s : steps) {
    if (!out.empty()) out += ',';
    out += (s.op == MorphOp::dilate ? "dilate:" : "erode:") + std::to_string(s.radius);
  }
  return out;
}

BinaryImage dilate(const BinaryImage& in, int radius, Exec exec) { return morph(in, radius, true, exec); }
BinaryImage erode(const BinaryImage& in, int radius, Exec exec) { return morph(in, radius, false, exec); }

BinaryImage run_morph(const BinaryImage& in, const MorphProgram& prog, Exec exec) {
  prog.validate();
  BinaryImage cur = in;
  for (const auto& s : prog.steps) {
    cur = s.op == MorphOp::dilate ? dilate(cur, s.radius, exec) : erode(cur, s.radius, exec);
  }
  return cur;
}

Region select_center_region_info(const BinaryImage& bin) {
  const int w = bin.width, h = bin.height;
  std::vector<int> label(bin.bits.size(), -1);
  struct Comp {
    std::size_t area = 0;
    double sx = 0, sy = 0;
  };
  std::vector<Comp> comps;
  std::deque<int> queue;
  for (int start = 0; start < w * h; ++start) {
    if (!bin.bits[static_cast<std::size_t>(start)] || label[static_cast<std::size_t>(start)] >= 0) continue;
    const int id = static_cast<int>(comps.size());
    comps.emplace_back();
    label[static_cast<std::size_t>(start)] = id;
    queue.push_back(start);
    while (!queue.empty()) {
      const int idx = queue.front();
      queue.pop_front();
      const int x = idx % w, y = idx / w;
      auto& c = comps[static_cast<std::size_t>(id)];
      ++c.area;
      c.sx += x;
      c.sy += y;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int xx = x + dx, yy = y + dy;
          if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
          const int n = yy * w + xx;
          if (bin.bits[static_cast<std::size_t>(n)] && label[static_cast<std::size_t>(n)] < 0) {
            label[static_cast<std::size_t>(n)] = id;
            queue.push_back(n);
          }
        }
      }
    }
  }
  if (comps.empty()) throw Error(ErrorCode::NoForeground, "binary image has no foreground");

  const double mx = 0.5 * (w - 1), my = 0.5 * (h - 1);
  int best = -1;
  double best_d = 0;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const auto& c = comps[i];
    const double cx = c.sx / static_cast<double>(c.area), cy = c.sy / static_cast<double>(c.area);
    const double d = (cx - mx) * (cx - mx) + (cy - my) * (cy - my);
    const double tol = 1e-9 * std::max(1.0, best_d);
    if (best < 0 || d < best_d - tol ||
        (std::abs(d - best_d) <= tol && c.area > comps[static_cast<std::size_t>(best)].area)) {
      best = static_cast<int>(i);
      best_d = d;
    }
  }
  Region r;
  r.mask = BinaryImage(w, h);
  for (std::size_t i = 0; i < label.size(); ++i) r.mask.bits[i] = label[i] == best;
  const auto& c = comps[static_cast<std::size_t>(best)];
  r.area = c.area;
  r.centroid = {c.sx / static_cast<double>(c.area), c.sy / static_cast<double>(c.area)};
  return r;
}

BinaryImage select_center_region(const BinaryImage& bin) { return select_center_region_info(bin).mask; }

BinaryImage canny_edges(const GrayImage& img, double sigma, double lo, double hi, Exec exec) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "Canny sigma must be > 0");
  if (!(lo >= 0.0 && lo < hi)) throw Error(ErrorCode::InvalidArgument, "Canny needs 0 <= lo < hi");
  const int w = img.width, h = img.height;
  auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };
  auto clampi = [](int v, int lo_, int hi_) { return std::min(std::max(v, lo_), hi_); };

  const auto k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  std::vector<double> tmp(img.pixels.size()), smooth(img.pixels.size());
  for_rows(h, exec, [&](int y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int i = -r; i <= r; ++i) acc += k[static_cast<std::size_t>(i + r)] * img.at(clampi(x + i, 0, w - 1), y);
      tmp[idx(x, y)] = acc;
    }
  });
  for_rows(h, exec, [&](int y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int i = -r; i <= r; ++i) acc += k[static_cast<std::size_t>(i + r)] * tmp[idx(x, clampi(y + i, 0, h - 1))];
      smooth[idx(x, y)] = acc;
    }
  });

  std::vector<double> gx(img.pixels.size()), gy(img.pixels.size()), mag(img.pixels.size());
  for_rows(h, exec, [&](int y) {
    const int ym = clampi(y - 1, 0, h - 1), yp = clampi(y + 1, 0, h - 1);
    for (int x = 0; x < w; ++x) {
      const int xm = clampi(x - 1, 0, w - 1), xp = clampi(x + 1, 0, w - 1);
      const double sx = (smooth[idx(xp, ym)] + 2 * smooth[idx(xp, y)] + smooth[idx(xp, yp)]) -
                        (smooth[idx(xm, ym)] + 2 * smooth[idx(xm, y)] + smooth[idx(xm, yp)]);
      const double sy = (smooth[idx(xm, yp)] + 2 * smooth[idx(x, yp)] + smooth[idx(xp, yp)]) -
                        (smooth[idx(xm, ym)] + 2 * smooth[idx(x, ym)] + smooth[idx(xp, ym)]);
      gx[idx(x, y)] = sx;
      gy[idx(x, y)] = sy;
      mag[idx(x, y)] = std::hypot(sx, sy);
    }
  });

  // non-maximum suppression along the gradient, quantized to 4 directions
  std::vector<double> thin(img.pixels.size(), 0.0);
  for_rows(h, exec, [&](int y) {
    if (y == 0 || y == h - 1) return;
    for (int x = 1; x < w - 1; ++x) {
      const double m = mag[idx(x, y)];
      if (m == 0.0) continue;
      double ang = std::atan2(gy[idx(x, y)], gx[idx(x, y)]) * 180.0 / std::numbers::pi;
      if (ang < 0) ang += 180.0;
      int dx, dy;
      if (ang < 22.5 || ang >= 157.5) {
        dx = 1, dy = 0;
      } else if (ang < 67.5) {
        dx = 1, dy = 1;
      } else if (ang < 112.5) {
        dx = 0, dy = 1;
      } else {
        dx = -1, dy = 1;
      }
      const double a = mag[idx(x + dx, y + dy)], b = mag[idx(x - dx, y - dy)];
      if (m > a && m >= b) thin[idx(x, y)] = m;
    }
  });

  BinaryImage edges(w, h);
  const double top = *std::max_element(mag.begin(), mag.end());
  if (top <= 0.0) return edges;
  const double t_hi = hi * top, t_lo = lo * top;
  std::deque<int> queue;
  for (int i = 0; i < w * h; ++i) {
    if (thin[static_cast<std::size_t>(i)] >= t_hi) {
      edges.bits[static_cast<std::size_t>(i)] = 1;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    const int i = queue.front();
    queue.pop_front();
    const int x = i % w, y = i / w;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int xx = x + dx, yy = y + dy;
        if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
        const std::size_t n = idx(xx, yy);
        if (!edges.bits[n] && thin[n] >= t_lo && thin[n] > 0.0) {
          edges.bits[n] = 1;
          queue.push_back(static_cast<int>(n));
        }
      }
    }
  }
  return edges;
}

PointSet radial_outermost(const BinaryImage& edges, Point2 center, std::size_t bins) {
  if (bins == 0) throw Error(ErrorCode::InvalidArgument, "bins must be >= 1");
  std::vector<double> best_r(bins, -1.0);
  std::vector<Point2> best_p(bins);
  const double two_pi = 2.0 * std::numbers::pi;
  for (int y = 0; y < edges.height; ++y) {
    for (int x = 0; x < edges.width; ++x) {
      if (!edges.at(x, y)) continue;
      const double dx = x - center.x, dy = y - center.y;
      double t = std::atan2(dy, dx);
      if (t < 0) t += two_pi;
      const auto b = std::min(bins - 1, static_cast<std::size_t>(t / two_pi * static_cast<double>(bins)));
      const double r = std::hypot(dx, dy);
      if (r > best_r[b]) {
        best_r[b] = r;
        best_p[b] = {static_cast<double>(x), static_cast<double>(y)};
      }
    }
  }
  PointSet out;
  for (std::size_t b = 0; b < bins; ++b) {
    if (best_r[b] < 0) continue;
    out.points.push_back(best_p[b]);
  }
  if (out.points.empty()) throw Error(ErrorCode::NoEdges, "edge image has no edge pixels");
  return out;
}

DropletPoints extract_droplet_points(const GrayImage& img, const DropletConfig& cfg, Exec exec) {
  img.validate();
  const auto otsu = otsu_threshold(img);
  const auto cleaned = run_morph(otsu.foreground, cfg.morph, exec);
  DropletPoints ex{select_center_region_info(cleaned), {}};
  const auto gate = cfg.edge_margin > 0 ? dilate(ex.region.mask, cfg.edge_margin, exec) : ex.region.mask;
  auto edges = canny_edges(img, cfg.canny_sigma, cfg.canny_lo, cfg.canny_hi, exec);
  for (std::size_t i = 0; i < edges.bits.size(); ++i) edges.bits[i] &= gate.bits[i];
  ex.points = radial_outermost(edges, ex.region.centroid, cfg.bins);
  return ex;
}

std::vector<DropletResult> analyze_droplet_all(const GrayImage& img, const DropletConfig& cfg,
                                               std::span<const Algorithm> algos, Exec exec) {
  const DropletPoints ex = extract_droplet_points(img, cfg, exec);
  const EllipseCloud cloud = sample_cloud(ex.points, cfg.n_conics, cfg.seed, exec);
  std::vector<DropletResult> out;
  for (auto algo : algos) {
    DropletResult r{run_fitter(algo, ex.points, cloud, cfg.fit, exec), 0.0,
                    static_cast<double>(ex.region.area), ex.region.centroid, ex.points, cloud};
    r.area = fit_area(r.fit);
    out.push_back(std::move(r));
  }
  return out;
}

DropletResult analyze_droplet(const GrayImage& img, const DropletConfig& cfg, Algorithm algo, Exec exec) {
  const Algorithm one[] = {algo};
  return std::move(analyze_droplet_all(img, cfg, one, exec).front());
}

}  // namespace contourfit
