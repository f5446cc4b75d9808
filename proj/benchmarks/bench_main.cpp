#include <benchmark/benchmark.h>

#include "einmob/calculus.hpp"
#include "einmob/constructions.hpp"
#include "einmob/curvature.hpp"
#include "einmob/enumerate.hpp"
#include "einmob/mobility.hpp"
#include "einmob/parse.hpp"

using namespace einmob;

namespace {

const CatalogEntry& ex14() {
  static const CatalogEntry e = catalog_entry("example14");
  return e;
}

void BM_ParseDifferentiate(benchmark::State& state) {
  const std::vector<std::string> coords{"t", "x0", "x1", "x2", "x3"};
  for (auto _ : state) {
    Expr e = parse("exp(2*t)*exp(x2)*sin(x3) + x1^2*cosh(x0)/(1 + x3^2)", coords);
    for (const auto& c : coords) benchmark::DoNotOptimize(differentiate(e, c));
  }
}
BENCHMARK(BM_ParseDifferentiate);

void BM_PointCurvature(benchmark::State& state) {
  const MetricField& g = ex14().metric;
  const Point p = g.chart().center();
  for (auto _ : state) benchmark::DoNotOptimize(point_curvature(g, p));
}
BENCHMARK(BM_PointCurvature);

void BM_IsEinstein(benchmark::State& state) {
  const MetricField& g = ex14().metric;
  for (auto _ : state) benchmark::DoNotOptimize(is_einstein(g));
}
BENCHMARK(BM_IsEinstein);

void BM_KernelDimension(benchmark::State& state) {
  LinearConnectionBundle bundle = build_prolongation(ex14().metric, -1.0);
  KernelOptions opt;
  opt.max_order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernel_dimension(bundle, opt));
}
BENCHMARK(BM_KernelDimension)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_LoopTransport(benchmark::State& state) {
  LinearConnectionBundle bundle = build_prolongation(ex14().metric, -1.0);
  for (auto _ : state) benchmark::DoNotOptimize(loop_transport_dimension(bundle));
}
BENCHMARK(BM_LoopTransport)->Unit(benchmark::kMillisecond);

void BM_MobilityValues(benchmark::State& state) {
  for (auto _ : state) {
    for (int n = 3; n <= 64; ++n) benchmark::DoNotOptimize(mobility_values(n, SignatureClass::lorentzian));
  }
}
BENCHMARK(BM_MobilityValues);

void BM_Catalog(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(catalog());
}
BENCHMARK(BM_Catalog)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
