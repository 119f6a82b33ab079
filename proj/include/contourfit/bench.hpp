#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "contourfit/algorithms.hpp"
#include "contourfit/exec.hpp"
#include "contourfit/synth.hpp"

namespace contourfit {

/// One cell of the factor grid. A case owns one point set (seeded from
/// data_id, so sweeps over n_conics reuse it); each run draws a fresh ellipse
/// cloud from it and feeds that cloud to every algorithm.
struct BenchCase {
  std::size_t n_conics = 10000;
  double outlier_ratio = 0.1;
  double occlusion_ratio = 0.1;
  double noise_sigma = 1.0;
  std::vector<Algorithm> algorithms{kAllAlgorithms.begin(), kAllAlgorithms.end()};
  std::size_t runs = 10;
  std::uint64_t base_seed = 1;
  std::size_t n_points = 500;
  Ellipse truth = SynthSpec{}.truth;
  Ellipse outlier_ellipse = SynthSpec{}.outlier_ellipse;
  FitParams params;
  bool timing = false;

  void validate() const;
  /// Identifies the point set (independent of n_conics).
  std::string data_id() const;
  std::string id() const;
  SynthSpec synth_spec() const;
};

struct BenchCell {
  Algorithm algorithm;
  std::size_t run = 0;
  std::uint64_t cloud_seed = 0;
  std::size_t cloud_size = 0;
  std::uint64_t cloud_fingerprint = 0;
  bool ok = false;
  double error = 0.0;          // NaN when !ok
  std::string failure;
  double fit_seconds = 0.0;    // zero unless timing was requested
  double cloud_seconds = 0.0;
};

struct BenchResult {
  BenchCase bench_case;
  std::vector<BenchCell> cells;  // run-major, algorithm order within a run

  std::vector<double> errors(Algorithm a) const;  // successful runs only
  double median_error(Algorithm a) const;          // NaN if every run failed
  double mean_seconds(Algorithm a, bool with_cloud) const;
};

BenchResult run_case(const BenchCase& c, Exec exec = Exec::parallel);

/// Median error per algorithm at each count, divided by the first count's.
struct SweepTable {
  std::vector<std::size_t> counts;
  std::vector<Algorithm> algorithms;
  std::vector<std::vector<double>> median;      // [algorithm][count]
  std::vector<std::vector<double>> normalized;  // [algorithm][count]
};

SweepTable sensitivity_sweep(const std::vector<std::size_t>& counts, const BenchCase& tmpl,
                             Exec exec = Exec::parallel);

struct ErrorHistogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::size_t> counts;
  double iqr = 0.0;
};

/// Per-run errors of `algorithm` binned over [min, max]. Throws
/// UnknownAlgorithm for a label that is not in the result.
ErrorHistogram error_histogram(const BenchResult& result, const std::string& algorithm,
                               std::size_t bins = 10);

}  // namespace contourfit
