// Serial reference vs production (OpenMP) kernels.

#include <benchmark/benchmark.h>

#include "lcflow/flow.hpp"
#include "lcflow/lightcone.hpp"
#include "lcflow/transform.hpp"

using namespace lcflow;

namespace {

ScalarField test_field(const SphereGrid& g, double amp) {
  HarmonicCoeffs c(g.bandlimit());
  c(0, 0) = std::sqrt(4.0 * 3.14159265358979323846);
  for (int l = 2; l <= std::min(6, g.bandlimit()); ++l)
    for (int m = -l; m <= l; ++m) c(l, m) = amp / (l * l);
  return synthesize(c, g);
}

void bm_analyze_ref(benchmark::State& state) {
  const SphereGrid g = SphereGrid::build(static_cast<int>(state.range(0)));
  const ScalarField f = test_field(g, 0.05);
  for (auto _ : state) {
    auto c = ref::analyze(f, g.bandlimit());
    benchmark::DoNotOptimize(c.c.data());
  }
}

void bm_analyze(benchmark::State& state) {
  const SphereGrid g = SphereGrid::build(static_cast<int>(state.range(0)));
  const ScalarField f = test_field(g, 0.05);
  for (auto _ : state) {
    auto c = analyze(f, g.bandlimit());
    benchmark::DoNotOptimize(c.c.data());
  }
}

void bm_synthesize_ref(benchmark::State& state) {
  const SphereGrid g = SphereGrid::build(static_cast<int>(state.range(0)));
  const HarmonicCoeffs c = analyze(test_field(g, 0.05), g.bandlimit());
  for (auto _ : state) {
    auto f = ref::synthesize(c, g);
    benchmark::DoNotOptimize(f.v.data());
  }
}

void bm_synth_jets(benchmark::State& state) {
  const SphereGrid g = SphereGrid::build(static_cast<int>(state.range(0)));
  const HarmonicCoeffs c = analyze(test_field(g, 0.05), g.bandlimit());
  for (auto _ : state) {
    auto d = synth_derivatives(c, g, 4);
    benchmark::DoNotOptimize(d.d.data());
  }
}

void bm_rhs(benchmark::State& state) {
  const SphereGrid g = SphereGrid::build(static_cast<int>(state.range(0)));
  const ConformalFactor w(test_field(g, 0.05));
  for (auto _ : state) {
    auto r = flow::rhs(w, flow::Mode::Normalized);
    benchmark::DoNotOptimize(r.v.data());
  }
}

void bm_diagnostics(benchmark::State& state) {
  const SphereGrid g = SphereGrid::build(static_cast<int>(state.range(0)));
  const ConformalFactor w(test_field(g, 0.05));
  for (auto _ : state) {
    auto d = flow::diagnostics(w, {0.0, 0.5, 1.0});
    benchmark::DoNotOptimize(d.vol);
  }
}

}  // namespace

BENCHMARK(bm_analyze_ref)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_analyze)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_synthesize_ref)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_synth_jets)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_rhs)->Arg(16)->Arg(24)->Arg(32)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_diagnostics)->Arg(16)->Arg(24)->Arg(32)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
