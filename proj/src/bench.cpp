#include "contourfit/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "contourfit/error.hpp"
#include "contourfit/rng.hpp"
#include "contourfit/stats.hpp"

namespace contourfit {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t kDataTag = 0xda7a;
constexpr std::uint64_t kOlsInitTag = 0x0150;
constexpr std::size_t kOlsInitConics = 100;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void BenchCase::validate() const {
  if (runs < 1) throw Error(ErrorCode::InvalidArgument, "bench case needs runs >= 1");
  if (algorithms.empty()) throw Error(ErrorCode::InvalidArgument, "bench case needs algorithms");
  if (n_conics < 1) throw Error(ErrorCode::InvalidArgument, "bench case needs n_conics >= 1");
  synth_spec().validate();
}

std::string BenchCase::data_id() const {
  return fmt::format("p{}_o{}_x{}_s{}", n_points, outlier_ratio, occlusion_ratio, noise_sigma);
}

std::string BenchCase::id() const { return fmt::format("n{}_{}", n_conics, data_id()); }

SynthSpec BenchCase::synth_spec() const {
  SynthSpec s;
  s.truth = truth;
  s.outlier_ellipse = outlier_ellipse;
  s.n_points = n_points;
  s.noise_sigma = noise_sigma;
  s.outlier_ratio = outlier_ratio;
  s.occlusion_ratio = occlusion_ratio;
  s.seed = derive_seed(base_seed, {fnv1a(data_id()), kDataTag});
  return s;
}

std::vector<double> BenchResult::errors(Algorithm a) const {
  std::vector<double> out;
  for (const auto& c : cells) {
    if (c.algorithm == a && c.ok) out.push_back(c.error);
  }
  return out;
}

double BenchResult::median_error(Algorithm a) const {
  const auto e = errors(a);
  return e.empty() ? std::numeric_limits<double>::quiet_NaN() : stats::median(e);
}

double BenchResult::mean_seconds(Algorithm a, bool with_cloud) const {
  double acc = 0.0;
  std::size_t n = 0;
  for (const auto& c : cells) {
    if (c.algorithm != a) continue;
    acc += c.fit_seconds + (with_cloud && uses_cloud(a) ? c.cloud_seconds : 0.0);
    ++n;
  }
  return n ? acc / static_cast<double>(n) : 0.0;
}

BenchResult run_case(const BenchCase& bc, Exec exec) {
  bc.validate();
  BenchResult res;
  res.bench_case = bc;
  const PointSet ps = generate(bc.synth_spec());
  FitParams params = bc.params;
  const bool needs_ols =
      std::find(bc.algorithms.begin(), bc.algorithms.end(), Algorithm::ols) != bc.algorithms.end();
  if (needs_ols && !params.ols_init) {
    const auto init_cloud =
        sample_cloud(ps, kOlsInitConics, derive_seed(bc.base_seed, {fnv1a(bc.data_id()), kOlsInitTag}), exec);
    params.ols_init = fit_rosin_median(init_cloud);
  }

  const std::uint64_t case_hash = fnv1a(bc.id());
  for (std::size_t run = 0; run < bc.runs; ++run) {
    const std::uint64_t seed = derive_seed(bc.base_seed, {case_hash, run + 1});
    const auto t0 = std::chrono::steady_clock::now();
    EllipseCloud cloud;
    std::string cloud_failure;
    try {
      cloud = sample_cloud(ps, bc.n_conics, seed, exec);
    } catch (const Error& e) {
      cloud_failure = e.what();
    }
    const double cloud_seconds = bc.timing ? seconds_since(t0) : 0.0;

    for (auto algo : bc.algorithms) {
      BenchCell cell;
      cell.algorithm = algo;
      cell.run = run;
      cell.cloud_seed = seed;
      cell.cloud_size = cloud.size();
      cell.cloud_fingerprint = cloud.fingerprint();
      cell.cloud_seconds = cloud_seconds;
      cell.error = std::numeric_limits<double>::quiet_NaN();
      if (uses_cloud(algo) && !cloud_failure.empty()) {
        cell.failure = cloud_failure;
        res.cells.push_back(std::move(cell));
        continue;
      }
      const auto t1 = std::chrono::steady_clock::now();
      try {
        const Fit fit = run_fitter(algo, ps, cloud, params, exec);
        cell.fit_seconds = bc.timing ? seconds_since(t1) : 0.0;
        cell.error = fit_curve_error(fit, bc.truth);
        cell.ok = std::isfinite(cell.error);
        if (!cell.ok) cell.failure = "non-finite error";
      } catch (const Error& e) {
        cell.fit_seconds = bc.timing ? seconds_since(t1) : 0.0;
        cell.failure = e.what();
      }
      res.cells.push_back(std::move(cell));
    }
  }
  return res;
}

SweepTable sensitivity_sweep(const std::vector<std::size_t>& counts, const BenchCase& tmpl, Exec exec) {
  if (counts.size() < 2 || !std::is_sorted(counts.begin(), counts.end())) {
    throw Error(ErrorCode::InvalidArgument, "sweep needs >= 2 ascending counts");
  }
  SweepTable t;
  t.counts = counts;
  t.algorithms = tmpl.algorithms;
  t.median.assign(t.algorithms.size(), std::vector<double>(counts.size()));
  t.normalized = t.median;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    BenchCase c = tmpl;
    c.n_conics = counts[j];
    const auto r = run_case(c, exec);
    for (std::size_t a = 0; a < t.algorithms.size(); ++a) t.median[a][j] = r.median_error(t.algorithms[a]);
  }
  for (std::size_t a = 0; a < t.algorithms.size(); ++a) {
    for (std::size_t j = 0; j < counts.size(); ++j) {
      const double base = t.median[a][0];
      // a fit that is exact at the first count stays "unchanged" when it remains exact
      t.normalized[a][j] = base > 0.0 ? t.median[a][j] / base : (t.median[a][j] == 0.0 ? 1.0 : INFINITY);
    }
  }
  return t;
}

ErrorHistogram error_histogram(const BenchResult& result, const std::string& algorithm, std::size_t bins) {
  if (bins < 1) throw Error(ErrorCode::InvalidArgument, "histogram needs >= 1 bin");
  Algorithm a;
  try {
    a = parse_algorithm(algorithm);
  } catch (const Error&) {
    throw Error(ErrorCode::UnknownAlgorithm, "unknown algorithm '" + algorithm + "'");
  }
  const auto& algos = result.bench_case.algorithms;
  if (std::find(algos.begin(), algos.end(), a) == algos.end()) {
    throw Error(ErrorCode::UnknownAlgorithm, "algorithm '" + algorithm + "' not in this result");
  }
  const auto errs = result.errors(a);
  ErrorHistogram h;
  if (errs.empty()) return h;
  const auto [mn, mx] = std::minmax_element(errs.begin(), errs.end());
  const double lo = *mn, hi = *mx;
  if (hi == lo) {
    h.edges = {lo, hi};
    h.counts = {errs.size()};
    h.iqr = 0.0;
    return h;
  }
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  h.counts.assign(bins, 0);
  for (double e : errs) {
    const auto b = std::min(bins - 1, static_cast<std::size_t>((e - lo) / (hi - lo) * static_cast<double>(bins)));
    ++h.counts[b];
  }
  h.iqr = stats::iqr(errs);
  return h;
}

}  // namespace contourfit
