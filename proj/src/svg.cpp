#include "contourfit/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "contourfit/synth.hpp"

namespace contourfit::svg {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"};

struct Box {
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
  double x1 = -x0, y1 = -x0;
  void add(double x, double y) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  bool empty() const { return !(x1 >= x0); }
};

// Maps a world box into a canvas with margins, optionally preserving aspect.
struct Frame {
  Box box;
  double width, height, margin;
  bool flip_y;
  double sx() const { return (width - 2 * margin) / std::max(box.x1 - box.x0, 1e-300); }
  double sy() const { return (height - 2 * margin) / std::max(box.y1 - box.y0, 1e-300); }
  double px(double x) const { return margin + (x - box.x0) * sx(); }
  double py(double y) const {
    const double t = (y - box.y0) * sy();
    return flip_y ? height - margin - t : margin + t;
  }
};

std::string header(double w, double h) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
      w, h);
}

std::string polyline(const Frame& f, const std::vector<Point2>& pts, const char* color, bool closed) {
  std::string s = fmt::format("<{} fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"",
                              closed ? "polygon" : "polyline", color);
  for (const auto& p : pts) s += fmt::format("{:.2f},{:.2f} ", f.px(p.x), f.py(p.y));
  s += "\"/>\n";
  return s;
}

std::vector<Point2> trace(const Fit& fit) {
  std::vector<Point2> pts;
  if (const auto* e = std::get_if<Ellipse>(&fit)) {
    for (int i = 0; i < 360; ++i) pts.push_back(e->point_at(2.0 * std::numbers::pi * i / 360.0));
  } else {
    const auto& c = std::get<PolarContour>(fit);
    for (std::size_t k = 0; k < c.rays(); ++k) pts.push_back(c.point(k));
  }
  return pts;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace

std::string overlay(const PointSet& ps, const std::vector<std::pair<std::string, Fit>>& fits, const Ellipse* truth) {
  Box box;
  for (const auto& p : ps.points) box.add(p.x, p.y);
  std::vector<std::vector<Point2>> traces;
  for (const auto& [name, fit] : fits) {
    traces.push_back(trace(fit));
    for (const auto& p : traces.back()) box.add(p.x, p.y);
  }
  std::vector<Point2> truth_pts;
  if (truth) {
    truth_pts = trace(*truth);
    for (const auto& p : truth_pts) box.add(p.x, p.y);
  }
  if (box.empty()) box.add(0, 0), box.add(1, 1);
  // equal scale on both axes
  const double span = std::max(box.x1 - box.x0, box.y1 - box.y0);
  const double cx = 0.5 * (box.x0 + box.x1), cy = 0.5 * (box.y0 + box.y1);
  box = Box{cx - 0.5 * span, cy - 0.5 * span, cx + 0.5 * span, cy + 0.5 * span};
  const Frame f{box, 640, 640, 30, true};

  std::string s = header(f.width, f.height);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const bool outlier = !ps.labels.empty() && ps.labels[i] == Label::outlier;
    s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"1.5\" fill=\"{}\"/>\n", f.px(ps.points[i].x),
                     f.py(ps.points[i].y), outlier ? "#999999" : "#333333");
  }
  if (truth) {
    s += "<g stroke-dasharray=\"5,4\">\n" + polyline(f, truth_pts, "#000000", true) + "</g>\n";
  }
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    s += polyline(f, traces[i], color, true);
    s += fmt::format("<text x=\"40\" y=\"{}\" font-size=\"13\" fill=\"{}\">{}</text>\n", 45 + 16 * i, color,
                     escape(fits[i].first));
  }
  s += "</svg>\n";
  return s;
}

std::string contour(const PolarContour& c) {
  PointSet none;
  return overlay(none, {{"contour", Fit{c}}});
}

std::string line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series, bool log_x) {
  auto tx = [log_x](double x) { return log_x ? std::log10(x) : x; };
  Box box;
  for (const auto& sr : series) {
    for (std::size_t i = 0; i < sr.x.size(); ++i) {
      if (std::isfinite(sr.y[i])) box.add(tx(sr.x[i]), sr.y[i]);
    }
  }
  if (box.empty()) box.add(0, 0), box.add(1, 1);
  if (box.y1 == box.y0) box.y1 = box.y0 + 1;
  if (box.x1 == box.x0) box.x1 = box.x0 + 1;
  box.y0 = std::min(box.y0, 0.0);
  const Frame f{box, 720, 460, 60, true};
  std::string s = header(f.width, f.height);
  s += fmt::format("<text x=\"{}\" y=\"25\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n", f.width / 2,
                   escape(title));
  s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", f.margin,
                   f.height - f.margin, f.width - f.margin);
  s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", f.margin, f.margin,
                   f.height - f.margin);
  s += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n", f.width / 2,
                   f.height - 15, escape(x_label));
  s += fmt::format("<text x=\"15\" y=\"{}\" font-size=\"13\" transform=\"rotate(-90 15 {})\" "
                   "text-anchor=\"middle\">{}</text>\n",
                   f.height / 2, f.height / 2, escape(y_label));
  for (int i = 0; i <= 4; ++i) {
    const double y = box.y0 + (box.y1 - box.y0) * i / 4.0;
    s += fmt::format("<text x=\"{}\" y=\"{:.1f}\" font-size=\"11\" text-anchor=\"end\">{:.3g}</text>\n",
                     f.margin - 5, f.py(y) + 4, y);
  }
  for (const auto& sr : series) {
    for (double x : sr.x) {
      s += fmt::format("<text x=\"{:.1f}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{:g}</text>\n",
                       f.px(tx(x)), f.height - f.margin + 16, x);
    }
    break;
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % std::size(kPalette)];
    std::vector<Point2> pts;
    for (std::size_t i = 0; i < series[k].x.size(); ++i) {
      if (std::isfinite(series[k].y[i])) pts.push_back({tx(series[k].x[i]), series[k].y[i]});
    }
    s += polyline(f, pts, color, false);
    s += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{}\">{}</text>\n", f.width - f.margin - 140,
                     f.margin + 16 * k, color, escape(series[k].name));
  }
  s += "</svg>\n";
  return s;
}

std::string histograms(const BenchResult& result, std::size_t bins) {
  const auto& algos = result.bench_case.algorithms;
  const double row_h = 110, w = 640;
  std::string s = header(w, row_h * static_cast<double>(algos.size()) + 20);
  for (std::size_t r = 0; r < algos.size(); ++r) {
    const auto h = error_histogram(result, std::string(label(algos[r])), bins);
    const double top = 20 + row_h * static_cast<double>(r);
    s += fmt::format("<text x=\"10\" y=\"{}\" font-size=\"13\">{} (IQR {:.4g})</text>\n", top + 12,
                     label(algos[r]), h.iqr);
    if (h.counts.empty()) continue;
    const std::size_t peak = *std::max_element(h.counts.begin(), h.counts.end());
    const double bar_w = (w - 80) / static_cast<double>(h.counts.size());
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      const double bh = (row_h - 40) * static_cast<double>(h.counts[b]) / static_cast<double>(peak);
      s += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"{}\"/>\n",
                       40 + bar_w * static_cast<double>(b), top + row_h - 20 - bh, bar_w - 1, bh,
                       kPalette[r % std::size(kPalette)]);
    }
    s += fmt::format("<text x=\"40\" y=\"{}\" font-size=\"10\">{:.4g}</text>\n", top + row_h - 6, h.edges.front());
    s += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{:.4g}</text>\n", w - 40,
                     top + row_h - 6, h.edges.back());
  }
  s += "</svg>\n";
  return s;
}

}  // namespace contourfit::svg
