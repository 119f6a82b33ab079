#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "contourfit/io.hpp"
#include "contourfit/raster.hpp"
#include "contourfit/synth.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace contourfit;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string output;
};

Run cli(const fs::path& dir, const std::string& args) {
  const fs::path log = dir / "cli.log";
  const std::string cmd = std::string(CONTOURFIT_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, ss.str()};
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_label(const fs::path& p, const std::string& label) {
  std::size_t n = 0;
  for (const auto& l : lines(p))
    if (l.size() > label.size() && l.ends_with("," + label)) ++n;
  return n;
}

}  // namespace

TEST_CASE("cli synth writes labeled points") {
  const auto dir = test::scratch("cli_synth");
  auto r = cli(dir, "synth --points 500 --noise 0 --outliers 0 -o " + (dir / "a.csv").string());
  REQUIRE(r.status == 0);
  CHECK(lines(dir / "a.csv").size() == 501);
  CHECK(count_label(dir / "a.csv", "inlier") == 500);

  r = cli(dir, "synth --points 500 --outlier-ratio 0.1667 -o " + (dir / "b.csv").string());
  REQUIRE(r.status == 0);
  CHECK(count_label(dir / "b.csv", "outlier") == 100);
  CHECK(count_label(dir / "b.csv", "inlier") == 500);

  r = cli(dir, "synth --occlusion 1.0 -o " + (dir / "c.csv").string());
  CHECK(r.status == 2);
  CHECK(r.output.find("occlusion") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "c.csv"));
}

TEST_CASE("cli fit recovers an exact ellipse with rosin and rejects unknown algorithms") {
  const auto dir = test::scratch("cli_fit");
  const Ellipse truth{10, -5, 40, 25, 0.6};
  PointSet ps;
  for (int i = 0; i < 60; ++i) ps.points.push_back(truth.point_at(2 * std::numbers::pi * i / 60.0));
  io::write_points_csv(dir / "exact.csv", ps);
  auto r = cli(dir, "fit " + (dir / "exact.csv").string() + " --algo rosin --conics 500 -o " + (dir / "fit").string());
  REQUIRE(r.status == 0);
  const Ellipse e = io::read_ellipse_record(dir / "fit.json");
  CHECK(std::abs(e.cx - truth.cx) < 1e-6);
  CHECK(std::abs(e.cy - truth.cy) < 1e-6);
  CHECK(std::abs(e.major - truth.major) < 1e-6);
  CHECK(std::abs(e.minor - truth.minor) < 1e-6);
  CHECK(std::abs(e.angle - truth.angle) < 1e-6);
  CHECK(fs::exists(dir / "fit.svg"));

  r = cli(dir, "fit " + (dir / "exact.csv").string() + " --algo foo");
  CHECK(r.status == 2);
  CHECK(r.output.find("median-contour") != std::string::npos);

  r = cli(dir, "fit " + (dir / "missing.csv").string() + " --algo ols");
  CHECK(r.status == 1);
}

TEST_CASE("cli fit median contour on the outlier dataset stays within 3 sigma") {
  const auto dir = test::scratch("cli_fit_median");
  REQUIRE(cli(dir, "--seed 12 synth --points 500 --noise 1 --outliers 100 -o " + (dir / "p.csv").string()).status == 0);
  const auto r = cli(dir, "--seed 12 fit " + (dir / "p.csv").string() + " --algo median-contour --conics 10000 -o " +
                              (dir / "m").string());
  REQUIRE(r.status == 0);
  CHECK(curve_error(io::read_contour_csv(dir / "m.csv"), SynthSpec{}.truth) < 3.0);
}

TEST_CASE("cli bench smoke run, table layout and byte-identical reruns") {
  const auto dir = test::scratch("cli_bench");
  io::write_text(dir / "smoke.ini", "[bench]\ncases = 100/0.1/0.1/1\nruns = 1\n");
  const auto t0 = std::chrono::steady_clock::now();
  auto r = cli(dir, "--config " + (dir / "smoke.ini").string() + " bench -o " + (dir / "smoke").string());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  REQUIRE(r.status == 0);
  CHECK(secs < 10.0);
  for (const char* f : {"results.csv", "summary.csv", "run.json"}) CHECK(fs::exists(dir / "smoke" / f));

  io::write_text(dir / "grid.ini", "[bench]\nn_conics = 100\nruns = 2\n");
  const std::string args = "--config " + (dir / "grid.ini").string() + " bench -o ";
  REQUIRE(cli(dir, args + (dir / "g1").string()).status == 0);
  REQUIRE(cli(dir, args + (dir / "g2").string()).status == 0);
  const auto summary = lines(dir / "g1" / "summary.csv");
  REQUIRE(summary.size() == 9);
  CHECK(summary[0] == "n_conics,outlier_ratio,occlusion_ratio,noise_sigma,ols,ransac,rht,rosin,median-contour,mode-contour");
  CHECK(lines(dir / "g1" / "results.csv").size() == 1 + 8 * 2 * 6);
  CHECK(slurp(dir / "g1" / "results.csv") == slurp(dir / "g2" / "results.csv"));
  CHECK(slurp(dir / "g1" / "summary.csv") == slurp(dir / "g2" / "summary.csv"));
}

TEST_CASE("cli droplet: ellipse blob area, empty glob, and a 24-image sequence") {
  const auto dir = test::scratch("cli_droplet");
  BlobSpec b;
  b.shape = {128, 128, 60, 40, 0.2};
  write_pgm(dir / "one.pgm", render_blob(b));
  auto r = cli(dir, "droplet " + (dir / "one.pgm").string() + " --algo median-contour -o " + (dir / "one").string());
  REQUIRE(r.status == 0);
  const auto report = lines(dir / "one" / "report.csv");
  REQUIRE(report.size() == 2);
  std::vector<std::string> f;
  std::stringstream ss(report[1]);
  for (std::string s; std::getline(ss, s, ',');) f.push_back(s);
  REQUIRE(f.size() >= 4);
  CHECK(f[2] == "ok");
  const double area = std::stod(f[3]), truth = std::numbers::pi * 60 * 40;
  CHECK(std::abs(area - truth) / truth < 0.03);

  r = cli(dir, "droplet '" + (dir / "nothing_*.pgm").string() + "' -o " + (dir / "none").string());
  CHECK(r.status != 0);
  CHECK(r.output.find("no images matched") != std::string::npos);

  REQUIRE(cli(dir, "render --count 24 -o " + (dir / "seq").string()).status == 0);
  r = cli(dir, "droplet '" + (dir / "seq" / "*.pgm").string() + "' --algo median-contour --conics 500 -o " +
                   (dir / "seq_out").string());
  REQUIRE(r.status == 0);
  CHECK(lines(dir / "seq_out" / "report.csv").size() == 25);
  CHECK(fs::exists(dir / "seq_out" / "areas.svg"));
}

TEST_CASE("cli replay reproduces a synth run") {
  const auto dir = test::scratch("cli_replay");
  REQUIRE(cli(dir, "--seed 99 synth --outlier-ratio 0.3 -o " + (dir / "p.csv").string()).status == 0);
  const std::string first = slurp(dir / "p.csv");
  fs::remove(dir / "p.csv");
  REQUIRE(cli(dir, "replay " + (dir / "p.csv.run.json").string()).status == 0);
  CHECK(slurp(dir / "p.csv") == first);
}
