#include <benchmark/benchmark.h>

#include "contourfit/baselines.hpp"
#include "contourfit/cloud.hpp"
#include "contourfit/contour.hpp"
#include "contourfit/edges.hpp"
#include "contourfit/raster.hpp"
#include "contourfit/synth.hpp"

using namespace contourfit;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

const PointSet& points() {
  static const PointSet ps = [] {
    SynthSpec s;
    s.outlier_ratio = 0.4;
    s.occlusion_ratio = 0.1;
    s.seed = 11;
    return generate(s);
  }();
  return ps;
}

const EllipseCloud& cloud() {
  static const EllipseCloud c = sample_cloud(points(), 10000, 12);
  return c;
}

const GrayImage& droplet() {
  static const GrayImage g = [] {
    BlobSpec b;
    b.width = b.height = 512;
    b.shape = {256, 256, 150, 110, 0.3};
    b.lobes = 5;
    b.lobe_amplitude = 0.08;
    b.stripes.push_back({{256, 256}, 0.4, 3.0});
    return render_blob(b);
  }();
  return g;
}

void BM_SampleCloud(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(sample_cloud(points(), 10000, 12, exec_of(st)));
}

void BM_MedianContour(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(fit_median_contour(cloud(), kDefaultRays, exec_of(st)));
}

void BM_ModeContour(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(fit_mode_contour(cloud(), kDefaultRays, {}, exec_of(st)));
}

void BM_Ransac(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(fit_ransac(points().points, cloud(), {}, exec_of(st)));
}

void BM_Rht(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(fit_rht(cloud(), {}, exec_of(st)));
}

void BM_Dilate(benchmark::State& st) {
  const BinaryImage bin = otsu_threshold(droplet()).foreground;
  for (auto _ : st) benchmark::DoNotOptimize(dilate(bin, 4, exec_of(st)));
}

void BM_Canny(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(canny_edges(droplet(), 2.0, 0.1, 0.3, exec_of(st)));
}

}  // namespace

BENCHMARK(BM_SampleCloud)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MedianContour)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ModeContour)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Ransac)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Rht)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Dilate)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Canny)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
