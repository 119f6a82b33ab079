#include <fmt/format.h>
#include <glob.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "contourfit/algorithms.hpp"
#include "contourfit/bench.hpp"
#include "contourfit/config.hpp"
#include "contourfit/edges.hpp"
#include "contourfit/error.hpp"
#include "contourfit/image.hpp"
#include "contourfit/io.hpp"
#include "contourfit/raster.hpp"
#include "contourfit/svg.hpp"
#include "contourfit/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace contourfit;

namespace {

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitPartial = 3;

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunRecord {
  std::string command;
  std::vector<std::string> args;
  std::string config;
  std::uint64_t seed = 0;
  std::string started;
  std::string finished;
  std::vector<std::string> outputs;

  json to_json() const {
    return {{"command", command}, {"args", args},       {"config", config},  {"seed", seed},
            {"started", started}, {"finished", finished}, {"outputs", outputs}};
  }
  static RunRecord from_json(const json& j) {
    RunRecord r;
    r.command = j.at("command").get<std::string>();
    r.args = j.at("args").get<std::vector<std::string>>();
    r.config = j.at("config").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
  }
};

/// Drops global --config/--seed so a replay can inject its own.
std::vector<std::string> strip_globals(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& a = args[i];
    if (a == "--config" || a == "--seed") {
      ++i;
      continue;
    }
    if (a.rfind("--config=", 0) == 0 || a.rfind("--seed=", 0) == 0) continue;
    out.push_back(a);
  }
  return out;
}

std::vector<fs::path> expand_globs(const std::vector<std::string>& patterns) {
  std::set<fs::path> found;
  for (const auto& p : patterns) {
    glob_t g{};
    if (::glob(p.c_str(), 0, nullptr, &g) == 0) {
      for (std::size_t i = 0; i < g.gl_pathc; ++i) found.insert(g.gl_pathv[i]);
    }
    globfree(&g);
  }
  return {found.begin(), found.end()};
}

class Cli {
 public:
  Cli(std::optional<Config> injected) : injected_(std::move(injected)) {}

  int run(const std::vector<std::string>& args) {
    CLI::App app{"Robust closed-contour fitting and benchmarks"};
    app.require_subcommand(1);
    app.add_option("--config", config_path_, "INI configuration file");
    app.add_option("--seed", seed_flag_, "base seed (overrides CONTOURFIT_SEED and the config)");
    app.add_flag("--serial", serial_, "run the serial reference kernels");

    add_synth(app);
    add_fit(app);
    add_bench(app);
    add_droplet(app);
    add_render(app);
    add_replay(app);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
      app.parse(rev);
    } catch (const CLI::ParseError& e) {
      const int rc = app.exit(e);
      return rc == 0 ? 0 : kExitUsage;
    }
    record_.args = strip_globals(args);
    try {
      return dispatch_();
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      switch (e.code()) {
        case ErrorCode::SpecInvalid:
        case ErrorCode::InvalidArgument:
        case ErrorCode::UnknownAlgorithm:
          return kExitUsage;
        default:
          return kExitError;
      }
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitError;
    }
  }

 private:
  std::optional<Config> injected_;
  std::string config_path_;
  std::optional<std::uint64_t> seed_flag_;
  bool serial_ = false;
  std::function<int()> dispatch_;
  RunRecord record_;
  Config cfg_;

  Exec exec() const { return serial_ ? Exec::serial : Exec::parallel; }

  void load_config(const std::string& command) {
    if (injected_) {
      cfg_ = *injected_;
    } else if (!config_path_.empty()) {
      cfg_ = contourfit::load_config(config_path_);
    }
    if (const char* env = std::getenv("CONTOURFIT_SEED"); env && !injected_) {
      try {
        cfg_.seed = std::stoull(env);
      } catch (...) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("CONTOURFIT_SEED='{}' is not a seed", env));
      }
    }
    if (seed_flag_) cfg_.seed = *seed_flag_;
    cfg_.sync();
    record_.command = command;
    record_.started = utc_now();
  }

  void finish(const fs::path& record_path) {
    cfg_.sync();
    record_.config = cfg_.to_ini();
    record_.seed = cfg_.seed;
    record_.finished = utc_now();
    record_.outputs.push_back(record_path.string());
    io::write_text(record_path, record_.to_json().dump(2) + "\n");
  }

  void output(const fs::path& p) { record_.outputs.push_back(p.string()); }

  struct SynthOpts {
    std::string out = "points.csv";
    std::optional<std::size_t> points;
    std::optional<double> noise, outlier_ratio, occlusion;
    std::optional<std::size_t> outliers;
    std::optional<std::string> truth, outlier_ellipse;
  } synth_;

  void add_synth(CLI::App& app) {
    auto* sub = app.add_subcommand("synth", "generate a noisy ellipse point set with outliers and occlusion");
    sub->add_option("-o,--out", synth_.out, "point CSV path")->capture_default_str();
    sub->add_option("--points", synth_.points, "inlier count before occlusion");
    sub->add_option("--noise", synth_.noise, "Gaussian noise sigma");
    sub->add_option("--outlier-ratio", synth_.outlier_ratio, "outlier fraction of the total, in [0,1)");
    sub->add_option("--outliers", synth_.outliers, "absolute outlier count (overrides --outlier-ratio)");
    sub->add_option("--occlusion", synth_.occlusion, "occluded fraction of the truth arc, in [0,1)");
    sub->add_option("--truth", synth_.truth, "truth ellipse cx,cy,major,minor,angle");
    sub->add_option("--outlier-ellipse", synth_.outlier_ellipse, "outlier ellipse cx,cy,major,minor,angle");
    sub->callback([this] { dispatch_ = [this] { return cmd_synth(); }; });
  }

  int cmd_synth() {
    load_config("synth");
    auto& s = cfg_.synth;
    if (synth_.points) s.n_points = *synth_.points;
    if (synth_.noise) s.noise_sigma = *synth_.noise;
    if (synth_.outlier_ratio) s.outlier_ratio = *synth_.outlier_ratio;
    if (synth_.occlusion) s.occlusion_ratio = *synth_.occlusion;
    if (synth_.truth) s.truth = parse_ellipse(*synth_.truth);
    if (synth_.outlier_ellipse) s.outlier_ellipse = parse_ellipse(*synth_.outlier_ellipse);
    if (synth_.outliers) {
      const double n = static_cast<double>(*synth_.outliers);
      s.outlier_ratio = n == 0.0 ? 0.0 : n / (n + static_cast<double>(s.n_points));
    }
    cfg_.sync();
    try {
      s.validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::SpecInvalid, e.message());
    }
    const PointSet ps = generate(s);
    const fs::path out = synth_.out;
    io::write_points_csv(out, ps);
    output(out);
    const fs::path sidecar = fs::path(out).concat(".ini");
    io::write_text(sidecar, cfg_.to_ini());
    output(sidecar);
    std::size_t outliers = 0;
    for (auto l : ps.labels) outliers += l == Label::outlier ? 1 : 0;
    fmt::print("wrote {} points ({} outliers) to {}\n", ps.size(), outliers, out.string());
    finish(fs::path(out).concat(".run.json"));
    return 0;
  }

  struct FitOpts {
    std::string input;
    std::string algo;
    std::optional<std::string> out;
    std::size_t conics = 10000;
    std::optional<std::size_t> rays;
    std::optional<std::string> bandwidth, threshold;
    std::optional<double> rht_bandwidth;
    std::optional<std::string> truth;
  } fit_;

  void add_fit(CLI::App& app) {
    auto* sub = app.add_subcommand("fit", "fit one point CSV with one algorithm");
    sub->add_option("input", fit_.input, "point CSV (x,y[,label])")->required();
    sub->add_option("--algo", fit_.algo, "one of: " + algorithm_labels())->required();
    sub->add_option("-o,--out", fit_.out, "output stem (default: <input>_<algo>)");
    sub->add_option("--conics", fit_.conics, "ellipse cloud size")->capture_default_str();
    sub->add_option("--rays", fit_.rays, "contour ray count");
    sub->add_option("--bandwidth", fit_.bandwidth, "KDE bandwidth (number or 'silverman')");
    sub->add_option("--threshold", fit_.threshold, "RANSAC inlier threshold (number or 'auto')");
    sub->add_option("--rht-bandwidth", fit_.rht_bandwidth, "RHT kernel width in MAD units");
    sub->add_option("--truth", fit_.truth, "truth ellipse cx,cy,major,minor,angle for an error report");
    sub->callback([this] { dispatch_ = [this] { return cmd_fit(); }; });
  }

  void apply_fit_flags() {
    if (fit_.rays) cfg_.fit.rays = *fit_.rays;
    if (fit_.bandwidth) {
      if (*fit_.bandwidth == "silverman") cfg_.fit.kde.bandwidth.reset();
      else cfg_.fit.kde.bandwidth = std::stod(*fit_.bandwidth);
    }
    if (fit_.threshold) {
      if (*fit_.threshold == "auto") cfg_.fit.ransac.inlier_threshold.reset();
      else cfg_.fit.ransac.inlier_threshold = std::stod(*fit_.threshold);
    }
    if (fit_.rht_bandwidth) cfg_.fit.rht.bandwidth = *fit_.rht_bandwidth;
    cfg_.sync();
    cfg_.validate();
  }

  int cmd_fit() {
    load_config("fit");
    const Algorithm algo = parse_algorithm(fit_.algo);
    apply_fit_flags();
    if (fit_.conics < 1) throw Error(ErrorCode::InvalidArgument, "--conics must be >= 1");
    const PointSet ps = io::read_points_csv(fit_.input);
    EllipseCloud cloud;
    if (uses_cloud(algo) || !cfg_.fit.ols_init) cloud = sample_cloud(ps, fit_.conics, cfg_.seed, exec());
    const Fit fit = run_fitter(algo, ps, cloud, cfg_.fit, exec());

    const fs::path stem = fit_.out ? fs::path(*fit_.out)
                                   : fs::path(fit_.input).replace_extension().concat("_" + std::string(label(algo)));
    if (const auto* c = std::get_if<PolarContour>(&fit)) {
      const fs::path p = fs::path(stem).concat(".csv");
      io::write_contour_csv(p, *c);
      output(p);
      fmt::print("{}: contour with {} rays about ({}, {}), area {}\n", label(algo), c->rays(),
                 io::format_stat(c->center.x), io::format_stat(c->center.y), io::format_stat(fit_area(fit)));
    } else {
      const auto& e = std::get<Ellipse>(fit);
      const fs::path p = fs::path(stem).concat(".json");
      io::write_ellipse_record(p, e);
      output(p);
      fmt::print("{}: {}\n", label(algo), io::ellipse_record(e));
    }
    std::optional<Ellipse> truth;
    if (fit_.truth) {
      truth = parse_ellipse(*fit_.truth);
      fmt::print("curve error {}\n", io::format_stat(fit_curve_error(fit, *truth)));
    }
    const fs::path svg_path = fs::path(stem).concat(".svg");
    io::write_text(svg_path, svg::overlay(ps, {{std::string(label(algo)), fit}}, truth ? &*truth : nullptr));
    output(svg_path);
    finish(fs::path(stem).concat(".run.json"));
    return 0;
  }

  struct BenchOpts {
    std::string out = "bench_out";
    std::optional<std::size_t> runs, conics;
    bool timing = false;
  } bench_;

  void add_bench(CLI::App& app) {
    auto* sub = app.add_subcommand("bench", "run the factor grid from the [bench] config section");
    sub->add_option("-o,--out", bench_.out, "output directory")->capture_default_str();
    sub->add_option("--runs", bench_.runs, "runs per case");
    sub->add_option("--conics", bench_.conics, "ellipse cloud size for every case");
    sub->add_flag("--timing", bench_.timing, "record wall times (outputs then differ between reruns)");
    sub->callback([this] { dispatch_ = [this] { return cmd_bench(); }; });
  }

  int cmd_bench() {
    load_config("bench");
    if (bench_.runs) cfg_.bench.runs = *bench_.runs;
    if (bench_.conics) {
      cfg_.bench.n_conics = {*bench_.conics};
      for (auto& c : cfg_.bench.cases) c.n_conics = *bench_.conics;
    }
    if (bench_.timing) cfg_.bench.timing = true;
    cfg_.validate();
    const fs::path dir = bench_.out;
    fs::create_directories(dir);

    std::vector<BenchResult> results;
    for (const auto& c : cfg_.bench_cases()) {
      fmt::print("case {} ...\n", c.id());
      std::fflush(stdout);
      results.push_back(run_case(c, exec()));
      const auto& r = results.back();
      for (auto a : c.algorithms) fmt::print("  {:<15} median error {}\n", label(a), io::format_stat(r.median_error(a)));
      const fs::path hist = dir / fmt::format("hist_{}.svg", c.id());
      io::write_text(hist, svg::histograms(r));
      output(hist);
    }
    const fs::path results_csv = dir / "results.csv", summary_csv = dir / "summary.csv";
    io::write_results_csv(results_csv, results);
    io::write_summary_csv(summary_csv, results);
    output(results_csv);
    output(summary_csv);

    if (!cfg_.bench.sweep_counts.empty()) {
      BenchCase tmpl = cfg_.bench_cases().front();
      const auto table = sensitivity_sweep(cfg_.bench.sweep_counts, tmpl, exec());
      const fs::path sweep_csv = dir / "sweep.csv", sweep_svg = dir / "sweep.svg";
      io::write_sweep_csv(sweep_csv, table);
      std::vector<svg::Series> series;
      for (std::size_t a = 0; a < table.algorithms.size(); ++a) {
        svg::Series s{std::string(label(table.algorithms[a])), {}, table.normalized[a]};
        for (auto n : table.counts) s.x.push_back(static_cast<double>(n));
        series.push_back(std::move(s));
      }
      io::write_text(sweep_svg, svg::line_plot("Error versus number of ellipses (" + tmpl.data_id() + ")",
                                               "ellipses", "normalized error", series, true));
      output(sweep_csv);
      output(sweep_svg);
    }
    finish(dir / "run.json");
    return 0;
  }

  struct DropletOpts {
    std::vector<std::string> patterns;
    std::string out = "droplet_out";
    std::optional<std::string> algos;
    std::optional<std::size_t> conics;
    std::optional<std::string> morph;
  } droplet_;

  void add_droplet(CLI::App& app) {
    auto* sub = app.add_subcommand("droplet", "extract and fit droplet boundaries from PGM images");
    sub->add_option("images", droplet_.patterns, "PGM files or glob patterns")->required();
    sub->add_option("-o,--out", droplet_.out, "output directory")->capture_default_str();
    sub->add_option("--algo", droplet_.algos, "comma-separated algorithm labels");
    sub->add_option("--conics", droplet_.conics, "ellipse cloud size");
    sub->add_option("--morph", droplet_.morph, "morphology program, e.g. erode:2,dilate:2");
    sub->callback([this] { dispatch_ = [this] { return cmd_droplet(); }; });
  }

  int cmd_droplet() {
    load_config("droplet");
    if (droplet_.algos) {
      cfg_.droplet_algorithms.clear();
      std::stringstream ss(*droplet_.algos);
      for (std::string item; std::getline(ss, item, ',');) cfg_.droplet_algorithms.push_back(parse_algorithm(item));
    }
    if (droplet_.conics) cfg_.droplet.n_conics = *droplet_.conics;
    if (droplet_.morph) cfg_.droplet.morph = MorphProgram::parse(*droplet_.morph);
    cfg_.sync();
    cfg_.validate();

    const auto images = expand_globs(droplet_.patterns);
    if (images.empty()) throw Error(ErrorCode::IoError, "no images matched");
    const fs::path dir = droplet_.out;
    fs::create_directories(dir);

    const auto& algos = cfg_.droplet_algorithms;
    std::string report = "image,algorithm,status,area,morph_area,truth_area,area_error,edge_deviation\n";
    std::vector<svg::Series> series;
    for (auto a : algos) series.push_back({std::string(label(a)), {}, {}});
    std::size_t failed_images = 0;

    for (std::size_t idx = 0; idx < images.size(); ++idx) {
      const auto& path = images[idx];
      const std::string name = path.filename().string();
      const fs::path truth_path = fs::path(path).replace_extension().concat(".truth.csv");
      std::optional<PolarContour> truth;
      bool image_ok = true;
      auto fail_all = [&](ErrorCode why) {
        for (auto a : algos) report += fmt::format("{},{},failed:{},,,,,\n", name, label(a), to_string(why));
        image_ok = false;
      };
      try {
        if (fs::exists(truth_path)) truth = io::read_contour_csv(truth_path);
        const GrayImage img = read_pgm(path);
        const DropletPoints ex = extract_droplet_points(img, cfg_.droplet, exec());
        const fs::path pts = dir / (path.stem().string() + "_points.csv");
        io::write_points_csv(pts, ex.points);
        output(pts);
        const EllipseCloud cloud = sample_cloud(ex.points, cfg_.droplet.n_conics, cfg_.droplet.seed, exec());
        std::vector<std::pair<std::string, Fit>> fits;
        for (std::size_t k = 0; k < algos.size(); ++k) {
          const auto a = algos[k];
          try {
            Fit fit = run_fitter(a, ex.points, cloud, cfg_.droplet.fit, exec());
            const double area = fit_area(fit);
            std::string truth_area, area_err, dev;
            if (truth) {
              const double ta = contour_area(*truth);
              truth_area = io::format_stat(ta);
              area_err = io::format_stat(std::abs(area - ta) / ta);
              dev = io::format_stat(edge_deviation(fit_to_contour(fit, truth->rays()), *truth));
            }
            report += fmt::format("{},{},ok,{},{},{},{},{}\n", name, label(a), io::format_stat(area),
                                  ex.region.area, truth_area, area_err, dev);
            series[k].x.push_back(static_cast<double>(idx));
            series[k].y.push_back(area);
            fits.emplace_back(std::string(label(a)), std::move(fit));
          } catch (const Error& e) {
            report += fmt::format("{},{},failed:{},,{},,,\n", name, label(a), to_string(e.code()), ex.region.area);
            std::cerr << name << " " << label(a) << ": " << e.what() << "\n";
            image_ok = false;
          }
        }
        const fs::path overlay = dir / (path.stem().string() + ".svg");
        io::write_text(overlay, svg::overlay(ex.points, fits));
        output(overlay);
      } catch (const Error& e) {
        std::cerr << name << ": " << e.what() << "\n";
        fail_all(e.code());
      }
      if (!image_ok) ++failed_images;
      fmt::print("{} {}\n", name, image_ok ? "ok" : "failed");
    }
    const fs::path report_csv = dir / "report.csv", series_svg = dir / "areas.svg";
    io::write_text(report_csv, report);
    io::write_text(series_svg, svg::line_plot("Fitted area per image", "image", "area (px^2)", series));
    output(report_csv);
    output(series_svg);
    finish(dir / "run.json");
    if (failed_images) {
      std::cerr << fmt::format("{} of {} images had failures\n", failed_images, images.size());
      return kExitPartial;
    }
    return 0;
  }

  struct RenderOpts {
    std::string out = "droplets";
    std::size_t count = 24;
  } render_;

  void add_render(CLI::App& app) {
    auto* sub = app.add_subcommand("render", "write a synthetic droplet PGM sequence with truth contours");
    sub->add_option("-o,--out", render_.out, "output directory")->capture_default_str();
    sub->add_option("--count", render_.count, "number of images")->capture_default_str();
    sub->callback([this] { dispatch_ = [this] { return cmd_render(); }; });
  }

  int cmd_render() {
    load_config("render");
    if (render_.count < 1) throw Error(ErrorCode::InvalidArgument, "--count must be >= 1");
    const fs::path dir = render_.out;
    fs::create_directories(dir);
    const auto specs = synthetic_sequence(render_.count, cfg_.seed);
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const fs::path pgm = dir / fmt::format("blob_{:02}.pgm", i), truth = dir / fmt::format("blob_{:02}.truth.csv", i);
      write_pgm(pgm, render_blob(specs[i]));
      io::write_contour_csv(truth, specs[i].truth_contour(kDefaultRays));
      output(pgm);
      output(truth);
    }
    fmt::print("wrote {} images to {}\n", specs.size(), dir.string());
    finish(dir / "run.json");
    return 0;
  }

  std::string replay_path_;

  void add_replay(CLI::App& app) {
    auto* sub = app.add_subcommand("replay", "rerun a command from its run record");
    sub->add_option("record", replay_path_, "run record JSON")->required();
    sub->callback([this] { dispatch_ = [this] { return cmd_replay(); }; });
  }

  int cmd_replay() {
    std::ifstream in(replay_path_);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + replay_path_);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("run record: ") + e.what());
    }
    const RunRecord rec = RunRecord::from_json(j);
    Config cfg = parse_config(rec.config);
    cfg.seed = rec.seed;
    cfg.sync();
    std::vector<std::string> args{"--seed", std::to_string(rec.seed)};
    args.insert(args.end(), rec.args.begin(), rec.args.end());
    return Cli(cfg).run(args);
  }
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return Cli(std::nullopt).run(args);
}
