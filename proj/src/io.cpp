#include "contourfit/io.hpp"

#include <fmt/format.h>

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "contourfit/error.hpp"

namespace contourfit::io {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(line);
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() && s.find_first_not_of(" \t\r", used) != std::string::npos) throw 0;
    return v;
  } catch (...) {
    throw Error(ErrorCode::ParseError, fmt::format("{}:{}: bad number '{}'", path.string(), line, s));
  }
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::string format_geom(double v) { return fmt::format("{:.17g}", v); }
std::string format_stat(double v) { return fmt::format("{:.12g}", v); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

void write_points_csv(const std::filesystem::path& path, const PointSet& ps) {
  auto out = open_out(path);
  out << "x,y,label\n";
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const bool outlier = !ps.labels.empty() && ps.labels[i] == Label::outlier;
    out << format_geom(ps.points[i].x) << ',' << format_geom(ps.points[i].y) << ','
        << (outlier ? "outlier" : "inlier") << '\n';
  }
}

PointSet read_points_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, path.string() + ": empty file");
  strip_cr(line);
  const auto header = split(line, ',');
  const bool labelled = header.size() == 3 && header[2] == "label";
  if (header.size() < 2 || header[0] != "x" || header[1] != "y" || (header.size() == 3 && !labelled) ||
      header.size() > 3) {
    throw Error(ErrorCode::ParseError, path.string() + ": expected header x,y[,label]");
  }
  PointSet ps;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != header.size()) {
      throw Error(ErrorCode::ParseError, fmt::format("{}:{}: expected {} fields", path.string(), lineno, header.size()));
    }
    const Point2 p{parse_double(f[0], path, lineno), parse_double(f[1], path, lineno)};
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::ParseError, fmt::format("{}:{}: non-finite point", path.string(), lineno));
    }
    ps.points.push_back(p);
    if (labelled) {
      if (f[2] == "inlier") {
        ps.labels.push_back(Label::inlier);
      } else if (f[2] == "outlier") {
        ps.labels.push_back(Label::outlier);
      } else {
        throw Error(ErrorCode::ParseError, fmt::format("{}:{}: unknown label '{}'", path.string(), lineno, f[2]));
      }
    }
  }
  return ps;
}

void write_contour_csv(const std::filesystem::path& path, const PolarContour& c) {
  auto out = open_out(path);
  out << "# center," << format_geom(c.center.x) << ',' << format_geom(c.center.y) << '\n';
  out << "theta,radius\n";
  for (std::size_t k = 0; k < c.rays(); ++k) {
    out << format_geom(c.theta(k)) << ',' << format_geom(c.radii[k]) << '\n';
  }
}

PolarContour read_contour_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  PolarContour c;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    if (line.rfind("# center,", 0) == 0) {
      const auto f = split(line.substr(9), ',');
      if (f.size() != 2) throw Error(ErrorCode::ParseError, path.string() + ": bad center line");
      c.center = {parse_double(f[0], path, lineno), parse_double(f[1], path, lineno)};
      continue;
    }
    if (line[0] == '#') continue;
    if (!header) {
      if (line != "theta,radius") throw Error(ErrorCode::ParseError, path.string() + ": expected header theta,radius");
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 2) throw Error(ErrorCode::ParseError, fmt::format("{}:{}: expected 2 fields", path.string(), lineno));
    c.radii.push_back(parse_double(f[1], path, lineno));
  }
  if (c.rays() < kMinRays) throw Error(ErrorCode::ParseError, path.string() + ": contour needs >= 8 rays");
  return c;
}

std::string ellipse_record(const Ellipse& e) {
  return fmt::format(R"({{"cx":{},"cy":{},"major":{},"minor":{},"angle":{}}})", format_geom(e.cx),
                     format_geom(e.cy), format_geom(e.major), format_geom(e.minor), format_geom(e.angle));
}

void write_ellipse_record(const std::filesystem::path& path, const Ellipse& e) {
  write_text(path, ellipse_record(e) + "\n");
}

Ellipse read_ellipse_record(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    const auto j = nlohmann::json::parse(in);
    return {j.at("cx").get<double>(), j.at("cy").get<double>(), j.at("major").get<double>(),
            j.at("minor").get<double>(), j.at("angle").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_results_csv(const std::filesystem::path& path, const std::vector<BenchResult>& results) {
  auto out = open_out(path);
  out << "case_id,n_conics,outlier_ratio,occlusion_ratio,noise_sigma,algorithm,run,seed,cloud_size,"
         "cloud_fingerprint,status,error,time_with_cloud,time_without_cloud\n";
  for (const auto& r : results) {
    const auto& c = r.bench_case;
    for (const auto& cell : r.cells) {
      const double with_cloud = cell.fit_seconds + (uses_cloud(cell.algorithm) ? cell.cloud_seconds : 0.0);
      out << c.id() << ',' << c.n_conics << ',' << format_stat(c.outlier_ratio) << ','
          << format_stat(c.occlusion_ratio) << ',' << format_stat(c.noise_sigma) << ',' << label(cell.algorithm)
          << ',' << cell.run << ',' << cell.cloud_seed << ',' << cell.cloud_size << ','
          << fmt::format("{:016x}", cell.cloud_fingerprint) << ',' << (cell.ok ? std::string("ok") : "failed:" + cell.failure.substr(0, cell.failure.find(':'))) << ','
          << (cell.ok ? format_stat(cell.error) : "") << ',' << format_stat(with_cloud) << ','
          << format_stat(cell.fit_seconds) << '\n';
    }
  }
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<BenchResult>& results) {
  std::vector<Algorithm> algos;
  for (const auto& r : results) {
    for (auto a : r.bench_case.algorithms) {
      if (std::find(algos.begin(), algos.end(), a) == algos.end()) algos.push_back(a);
    }
  }
  auto out = open_out(path);
  out << "n_conics,outlier_ratio,occlusion_ratio,noise_sigma";
  for (auto a : algos) out << ',' << label(a);
  out << '\n';
  for (const auto& r : results) {
    const auto& c = r.bench_case;
    out << c.n_conics << ',' << format_stat(c.outlier_ratio) << ',' << format_stat(c.occlusion_ratio) << ','
        << format_stat(c.noise_sigma);
    for (auto a : algos) {
      const bool present = std::find(c.algorithms.begin(), c.algorithms.end(), a) != c.algorithms.end();
      const double m = present ? r.median_error(a) : NAN;
      out << ',' << (std::isfinite(m) ? format_stat(m) : "");
    }
    out << '\n';
  }
}

void write_sweep_csv(const std::filesystem::path& path, const SweepTable& t) {
  auto out = open_out(path);
  out << "algorithm,n_conics,median_error,normalized_error\n";
  for (std::size_t a = 0; a < t.algorithms.size(); ++a) {
    for (std::size_t j = 0; j < t.counts.size(); ++j) {
      out << label(t.algorithms[a]) << ',' << t.counts[j] << ',' << format_stat(t.median[a][j]) << ','
          << format_stat(t.normalized[a][j]) << '\n';
    }
  }
}

}  // namespace contourfit::io
