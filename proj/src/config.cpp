#include "contourfit/config.hpp"

#include <fmt/format.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "contourfit/error.hpp"

namespace contourfit {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t\"");
  const auto b = s.find_last_not_of(" \t\"");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw 0;
    return d;
  } catch (...) {
    throw Error(ErrorCode::ParseError, fmt::format("config {}: '{}' is not a number", key, v));
  }
}

std::size_t to_count(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d < 0 || d != std::floor(d)) throw Error(ErrorCode::ParseError, fmt::format("config {}: '{}' is not a count", key, v));
  return static_cast<std::size_t>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw Error(ErrorCode::ParseError, fmt::format("config {}: '{}' is not a boolean", key, v));
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(to_double(key, s));
  return out;
}

std::vector<std::size_t> to_counts(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  for (const auto& s : split_list(v)) out.push_back(to_count(key, s));
  return out;
}

std::vector<Algorithm> to_algorithms(const std::string& v) {
  std::vector<Algorithm> out;
  for (const auto& s : split_list(v)) out.push_back(parse_algorithm(s));
  return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& v, F&& f, char sep = ',') {
  std::string out;
  for (const auto& x : v) {
    if (!out.empty()) out += sep;
    out += f(x);
  }
  return out;
}

// shortest representation that parses back to the same double
std::string num(double v) { return fmt::format("{}", v); }

}  // namespace

Ellipse parse_ellipse(const std::string& text) {
  const auto f = split_list(text);
  if (f.size() != 5) throw Error(ErrorCode::ParseError, "ellipse must be cx,cy,major,minor,angle: '" + text + "'");
  Ellipse e{to_double("ellipse", f[0]), to_double("ellipse", f[1]), to_double("ellipse", f[2]),
            to_double("ellipse", f[3]), to_double("ellipse", f[4])};
  if (!(e.minor > 0 && e.major >= e.minor)) {
    throw Error(ErrorCode::ParseError, "ellipse needs major >= minor > 0: '" + text + "'");
  }
  return e;
}

std::string format_ellipse(const Ellipse& e) {
  return fmt::format("{},{},{},{},{}", num(e.cx), num(e.cy), num(e.major), num(e.minor), num(e.angle));
}

Config parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
  }
  Config cfg;
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, std::map<std::string, Setter>> keys{
      {"seed", {{"base", [&](const std::string& v) { cfg.seed = static_cast<std::uint64_t>(to_count("seed.base", v)); }}}},
      {"contour",
       {{"rays", [&](const std::string& v) { cfg.fit.rays = to_count("contour.rays", v); }},
        {"kde_bandwidth",
         [&](const std::string& v) {
           if (v == "silverman") cfg.fit.kde.bandwidth.reset();
           else cfg.fit.kde.bandwidth = to_double("contour.kde_bandwidth", v);
         }},
        {"kde_grid", [&](const std::string& v) { cfg.fit.kde.grid_points = to_count("contour.kde_grid", v); }}}},
      {"ransac",
       {{"threshold",
         [&](const std::string& v) {
           if (v == "auto") cfg.fit.ransac.inlier_threshold.reset();
           else cfg.fit.ransac.inlier_threshold = to_double("ransac.threshold", v);
         }}}},
      {"rht", {{"bandwidth", [&](const std::string& v) { cfg.fit.rht.bandwidth = to_double("rht.bandwidth", v); }}}},
      {"canny",
       {{"sigma", [&](const std::string& v) { cfg.droplet.canny_sigma = to_double("canny.sigma", v); }},
        {"lo", [&](const std::string& v) { cfg.droplet.canny_lo = to_double("canny.lo", v); }},
        {"hi", [&](const std::string& v) { cfg.droplet.canny_hi = to_double("canny.hi", v); }}}},
      {"morph", {{"program", [&](const std::string& v) { cfg.droplet.morph = MorphProgram::parse(v); }}}},
      {"droplet",
       {{"bins", [&](const std::string& v) { cfg.droplet.bins = to_count("droplet.bins", v); }},
        {"conics", [&](const std::string& v) { cfg.droplet.n_conics = to_count("droplet.conics", v); }},
        {"edge_margin",
         [&](const std::string& v) { cfg.droplet.edge_margin = static_cast<int>(to_count("droplet.edge_margin", v)); }},
        {"algorithms", [&](const std::string& v) { cfg.droplet_algorithms = to_algorithms(v); }}}},
      {"synth",
       {{"points", [&](const std::string& v) { cfg.synth.n_points = to_count("synth.points", v); }},
        {"noise", [&](const std::string& v) { cfg.synth.noise_sigma = to_double("synth.noise", v); }},
        {"outlier_ratio", [&](const std::string& v) { cfg.synth.outlier_ratio = to_double("synth.outlier_ratio", v); }},
        {"occlusion", [&](const std::string& v) { cfg.synth.occlusion_ratio = to_double("synth.occlusion", v); }},
        {"truth", [&](const std::string& v) { cfg.synth.truth = parse_ellipse(v); }},
        {"outlier_ellipse", [&](const std::string& v) { cfg.synth.outlier_ellipse = parse_ellipse(v); }}}},
      {"bench",
       {{"n_conics", [&](const std::string& v) { cfg.bench.n_conics = to_counts("bench.n_conics", v); }},
        {"outlier_ratios", [&](const std::string& v) { cfg.bench.outlier_ratios = to_doubles("bench.outlier_ratios", v); }},
        {"occlusion_ratios",
         [&](const std::string& v) { cfg.bench.occlusion_ratios = to_doubles("bench.occlusion_ratios", v); }},
        {"noise_sigmas", [&](const std::string& v) { cfg.bench.noise_sigmas = to_doubles("bench.noise_sigmas", v); }},
        {"runs", [&](const std::string& v) { cfg.bench.runs = to_count("bench.runs", v); }},
        {"algorithms", [&](const std::string& v) { cfg.bench.algorithms = to_algorithms(v); }},
        {"points", [&](const std::string& v) { cfg.bench.points = to_count("bench.points", v); }},
        {"truth", [&](const std::string& v) { cfg.bench.truth = parse_ellipse(v); }},
        {"outlier_ellipse", [&](const std::string& v) { cfg.bench.outlier_ellipse = parse_ellipse(v); }},
        {"cases",
         [&](const std::string& v) {
           cfg.bench.cases.clear();
           for (const auto& c : split_list(v, ';')) {
             const auto f = split_list(c, '/');
             if (f.size() != 4) throw Error(ErrorCode::ParseError, "bench.cases entry must be n/outlier/occlusion/sigma: '" + c + "'");
             cfg.bench.cases.push_back({to_count("bench.cases", f[0]), to_double("bench.cases", f[1]),
                                        to_double("bench.cases", f[2]), to_double("bench.cases", f[3])});
           }
         }},
        {"sweep_counts", [&](const std::string& v) { cfg.bench.sweep_counts = to_counts("bench.sweep_counts", v); }},
        {"timing", [&](const std::string& v) { cfg.bench.timing = to_bool("bench.timing", v); }}}},
  };

  for (const auto& [section, body] : tree) {
    const auto sec = keys.find(section);
    if (sec == keys.end()) throw Error(ErrorCode::ParseError, "config: unknown section [" + section + "]");
    if (!body.data().empty()) throw Error(ErrorCode::ParseError, "config: top-level key '" + section + "' outside a section");
    for (const auto& [key, node] : body) {
      const auto it = sec->second.find(key);
      if (it == sec->second.end()) throw Error(ErrorCode::ParseError, "config: unknown key " + section + "." + key);
      it->second(trim(node.data()));
    }
  }
  cfg.sync();
  cfg.validate();
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void Config::sync() {
  droplet.seed = seed;
  droplet.fit = fit;
  synth.seed = seed;
}

void Config::validate() const {
  if (fit.rays < kMinRays) throw Error(ErrorCode::InvalidArgument, "contour.rays must be >= 8");
  fit.kde.validate();
  if (fit.ransac.inlier_threshold && !(*fit.ransac.inlier_threshold > 0)) {
    throw Error(ErrorCode::InvalidArgument, "ransac.threshold must be > 0");
  }
  if (!(fit.rht.bandwidth > 0)) throw Error(ErrorCode::InvalidArgument, "rht.bandwidth must be > 0");
  if (!(droplet.canny_sigma > 0) || !(droplet.canny_lo >= 0 && droplet.canny_lo < droplet.canny_hi)) {
    throw Error(ErrorCode::InvalidArgument, "canny needs sigma > 0 and 0 <= lo < hi");
  }
  droplet.morph.validate();
  if (droplet.bins < 1 || droplet.n_conics < 1) throw Error(ErrorCode::InvalidArgument, "droplet bins/conics must be >= 1");
  if (droplet_algorithms.empty()) throw Error(ErrorCode::InvalidArgument, "droplet.algorithms is empty");
  if (bench.runs < 1 || bench.algorithms.empty()) throw Error(ErrorCode::InvalidArgument, "bench needs runs and algorithms");
  if (!bench.sweep_counts.empty() &&
      (bench.sweep_counts.size() < 2 || !std::is_sorted(bench.sweep_counts.begin(), bench.sweep_counts.end()))) {
    throw Error(ErrorCode::InvalidArgument, "bench.sweep_counts must be >= 2 ascending counts");
  }
  for (const auto& c : bench_cases()) c.validate();
}

std::vector<BenchCase> Config::bench_cases() const {
  std::vector<BenchCase> out;
  auto make = [&](std::size_t n, double o, double x, double s) {
    BenchCase c;
    c.n_conics = n;
    c.outlier_ratio = o;
    c.occlusion_ratio = x;
    c.noise_sigma = s;
    c.algorithms = bench.algorithms;
    c.runs = bench.runs;
    c.base_seed = seed;
    c.n_points = bench.points;
    c.truth = bench.truth;
    c.outlier_ellipse = bench.outlier_ellipse;
    c.params = fit;
    c.timing = bench.timing;
    out.push_back(c);
  };
  if (!bench.cases.empty()) {
    for (const auto& c : bench.cases) make(c.n_conics, c.outlier_ratio, c.occlusion_ratio, c.noise_sigma);
    return out;
  }
  for (auto n : bench.n_conics)
    for (auto o : bench.outlier_ratios)
      for (auto x : bench.occlusion_ratios)
        for (auto s : bench.noise_sigmas) make(n, o, x, s);
  return out;
}

std::string Config::to_ini() const {
  auto counts = [](const std::vector<std::size_t>& v) { return join(v, [](std::size_t x) { return std::to_string(x); }); };
  auto doubles = [](const std::vector<double>& v) { return join(v, [](double x) { return num(x); }); };
  auto algos = [](const std::vector<Algorithm>& v) { return join(v, [](Algorithm a) { return std::string(label(a)); }); };
  std::string s;
  s += fmt::format("[seed]\nbase = {}\n\n", seed);
  s += fmt::format("[contour]\nrays = {}\nkde_bandwidth = {}\nkde_grid = {}\n\n", fit.rays,
                   fit.kde.bandwidth ? num(*fit.kde.bandwidth) : "silverman", fit.kde.grid_points);
  s += fmt::format("[ransac]\nthreshold = {}\n\n",
                   fit.ransac.inlier_threshold ? num(*fit.ransac.inlier_threshold) : "auto");
  s += fmt::format("[rht]\nbandwidth = {}\n\n", num(fit.rht.bandwidth));
  s += fmt::format("[canny]\nsigma = {}\nlo = {}\nhi = {}\n\n", num(droplet.canny_sigma), num(droplet.canny_lo),
                   num(droplet.canny_hi));
  s += fmt::format("[morph]\nprogram = {}\n\n", droplet.morph.to_string());
  s += fmt::format("[droplet]\nbins = {}\nconics = {}\nedge_margin = {}\nalgorithms = {}\n\n", droplet.bins,
                   droplet.n_conics, droplet.edge_margin, algos(droplet_algorithms));
  s += fmt::format("[synth]\npoints = {}\nnoise = {}\noutlier_ratio = {}\nocclusion = {}\ntruth = {}\noutlier_ellipse = {}\n\n",
                   synth.n_points, num(synth.noise_sigma), num(synth.outlier_ratio), num(synth.occlusion_ratio),
                   format_ellipse(synth.truth), format_ellipse(synth.outlier_ellipse));
  s += fmt::format("[bench]\nn_conics = {}\noutlier_ratios = {}\nocclusion_ratios = {}\nnoise_sigmas = {}\nruns = {}\n"
                   "algorithms = {}\npoints = {}\ntruth = {}\noutlier_ellipse = {}\n",
                   counts(bench.n_conics), doubles(bench.outlier_ratios), doubles(bench.occlusion_ratios),
                   doubles(bench.noise_sigmas), bench.runs, algos(bench.algorithms), bench.points,
                   format_ellipse(bench.truth), format_ellipse(bench.outlier_ellipse));
  if (!bench.cases.empty()) {
    s += "cases = " + join(bench.cases, [](const Bench::Explicit& c) {
           return fmt::format("{}/{}/{}/{}", c.n_conics, num(c.outlier_ratio), num(c.occlusion_ratio), num(c.noise_sigma));
         }, ';') + "\n";
  }
  if (!bench.sweep_counts.empty()) s += "sweep_counts = " + counts(bench.sweep_counts) + "\n";
  s += fmt::format("timing = {}\n", bench.timing ? "true" : "false");
  return s;
}

}  // namespace contourfit
