#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "contourfit/algorithms.hpp"
#include "contourfit/bench.hpp"
#include "contourfit/edges.hpp"
#include "contourfit/synth.hpp"

namespace contourfit {

/// Tool-wide settings read from an INI-style file:
///
///   [seed]     base
///   [contour]  rays, kde_bandwidth (silverman | value), kde_grid
///   [ransac]   threshold (auto | value)
///   [rht]      bandwidth
///   [canny]    sigma, lo, hi
///   [morph]    program ("erode:2,dilate:2")
///   [droplet]  bins, conics, edge_margin, algorithms
///   [synth]    points, noise, outlier_ratio, occlusion, truth, outlier_ellipse
///   [bench]    n_conics, outlier_ratios, occlusion_ratios, noise_sigmas, runs,
///              algorithms, points, truth, outlier_ellipse, cases, sweep_counts, timing
///
/// Lists are comma separated; ellipses are "cx,cy,major,minor,angle"; an
/// explicit `cases` list ("n/outlier/occlusion/sigma; ...") replaces the
/// cross-product. Unknown sections or keys are rejected.
struct Config {
  std::uint64_t seed = 1;
  FitParams fit;
  DropletConfig droplet;
  std::vector<Algorithm> droplet_algorithms{Algorithm::ransac, Algorithm::rht, Algorithm::median_contour,
                                            Algorithm::mode_contour};
  SynthSpec synth;

  struct Bench {
    std::vector<std::size_t> n_conics{10000};
    std::vector<double> outlier_ratios{0.1, 0.4};
    std::vector<double> occlusion_ratios{0.1, 0.4};
    std::vector<double> noise_sigmas{1.0, 10.0};
    std::size_t runs = 10;
    std::vector<Algorithm> algorithms{kAllAlgorithms.begin(), kAllAlgorithms.end()};
    std::size_t points = 500;
    Ellipse truth = SynthSpec{}.truth;
    Ellipse outlier_ellipse = SynthSpec{}.outlier_ellipse;
    struct Explicit {
      std::size_t n_conics;
      double outlier_ratio, occlusion_ratio, noise_sigma;
    };
    std::vector<Explicit> cases;
    std::vector<std::size_t> sweep_counts;
    bool timing = false;
  } bench;

  /// Expands the bench section into concrete cases (seeded from `seed`).
  std::vector<BenchCase> bench_cases() const;
  /// Propagates `seed` and `fit` into the droplet and synth settings.
  void sync();
  void validate() const;
  /// Canonical INI text; load(to_ini()) reproduces this config.
  std::string to_ini() const;
};

Config load_config(const std::filesystem::path& path);
Config parse_config(const std::string& text);

Ellipse parse_ellipse(const std::string& text);
std::string format_ellipse(const Ellipse& e);

}  // namespace contourfit
