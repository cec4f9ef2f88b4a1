#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "hydrolimit/cascade.hpp"
#include "hydrolimit/collide1d.hpp"
#include "hydrolimit/hydro.hpp"
#include "hydrolimit/measures.hpp"
#include "hydrolimit/scattering.hpp"
#include "hydrolimit/scenarios.hpp"

using namespace hydrolimit;

namespace {

EmpiricalMeasure cloud(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  EmpiricalMeasure m;
  for (int i = 0; i < n; ++i) m.add({u(rng), u(rng)}, {u(rng), u(rng)}, 1.0 / n);
  return m;
}

void BM_LabDeflection(benchmark::State& state) {
  const PairPotential p(0.1);
  double a = 0.0;
  for (auto _ : state) {
    a += 1e-3;
    if (a > 0.1) a = 1e-3;
    benchmark::DoNotOptimize(lab_deflection({a, 1.3}, p));
  }
}
BENCHMARK(BM_LabDeflection);

void BM_ImpactForDeflection(benchmark::State& state) {
  const PairPotential p(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(impact_for_deflection(0.6, 2.0, p));
}
BENCHMARK(BM_ImpactForDeflection);

void BM_TwoBodyEncounter(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(two_body_encounter(0.05, 1.0, 0.1));
}
BENCHMARK(BM_TwoBodyEncounter)->Unit(benchmark::kMillisecond);

void BM_BuildCascade(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_cascade(N));
}
BENCHMARK(BM_BuildCascade)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_W1Exact(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto a = cloud(1, n), b = cloud(2, n);
  for (auto _ : state) benchmark::DoNotOptimize(w1_exact(a, b));
  state.SetComplexityN(n);
}
BENCHMARK(BM_W1Exact)->RangeMultiplier(2)->Range(16, 512)->Unit(benchmark::kMillisecond)->Complexity();

void BM_W1Sliced(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto a = cloud(3, n), b = cloud(4, n);
  for (auto _ : state) benchmark::DoNotOptimize(w1_sliced(a, b));
}
BENCHMARK(BM_W1Sliced)->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond);

void BM_Simulate1D(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const System1D s0 = two_layer_init(N);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_1d(s0, 1.0));
}
BENCHMARK(BM_Simulate1D)->Arg(50)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_PressurelessResidual(benchmark::State& state) {
  auto m0 = cloud(5, 256);
  std::vector<Snapshot> snaps;
  for (double t : uniform_times(-0.5, 1.0, 501)) snaps.push_back({t, push_forward_free(m0, t)});
  const auto phi = battery_2d()[0].phi;
  for (auto _ : state) benchmark::DoNotOptimize(residual_pressureless(snaps, phi));
}
BENCHMARK(BM_PressurelessResidual)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
