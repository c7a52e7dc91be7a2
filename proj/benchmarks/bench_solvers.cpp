#include <benchmark/benchmark.h>

#include "chargedamp/quantum.hpp"

using namespace chargedamp;

namespace {

Scenario gaas(double t_end) {
  Scenario s = gaas_scenario();
  s.t_end = t_end;
  return s;
}

}  // namespace

static void BM_VariableMassDirect(benchmark::State& state) {
  const Scenario s = gaas(state.range(0) * 1e-9);
  const auto vs = validate_scenario(s);
  const auto grid = TimeGrid::for_scenario(s);
  for (auto _ : state) benchmark::DoNotOptimize(integrate_variable_mass(vs, grid));
}
BENCHMARK(BM_VariableMassDirect)->Arg(1)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_CanonicalTrajectory(benchmark::State& state) {
  const Scenario s = gaas(state.range(0) * 1e-9);
  const auto vs = validate_scenario(s);
  const auto grid = TimeGrid::for_scenario(s);
  for (auto _ : state) benchmark::DoNotOptimize(classical_trajectory_canonical(vs, grid));
}
BENCHMARK(BM_CanonicalTrajectory)->Arg(1)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_AssembleMap(benchmark::State& state) {
  const TranslationParams tr{0.4, 1e-6, -2e-6, 3e-27, 1e-27, 0.0};
  const ShearParams sh{0.7, 0.1, -0.2, 3e-21, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(assemble_map(tr, sh));
}
BENCHMARK(BM_AssembleMap);

static void BM_DensityGrid(benchmark::State& state) {
  const Scenario s = gaas(1e-9);
  const auto st = evolve_packet(validate_scenario(s), packet_for_scenario(s), TimeGrid::from_samples({0.0, 20e-12}))[1];
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = centered_grid(st.zeta_R, 4 * st.sigma, n);
  for (auto _ : state) benchmark::DoNotOptimize(sample_psi(g, st));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * g.size()));
}
BENCHMARK(BM_DensityGrid)->Arg(64)->Arg(256);

static void BM_GreenPropagation(benchmark::State& state) {
  const Scenario s = gaas(1e-9);
  const auto st = evolve_packet(validate_scenario(s), packet_for_scenario(s), TimeGrid::from_samples({0.0, 20e-12}))[1];
  const auto targets = centered_grid(st.zeta_R, 4 * st.sigma, 64);
  const GreenQuadrature q{8.0, static_cast<std::size_t>(state.range(0)), 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(propagate_via_green(st, targets, q));
}
BENCHMARK(BM_GreenPropagation)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_Ehrenfest(benchmark::State& state) {
  const Scenario s = gaas(5e-9);
  const auto vs = validate_scenario(s);
  const auto grid = TimeGrid::for_scenario(s);
  const auto spec = packet_for_scenario(s);
  for (auto _ : state) benchmark::DoNotOptimize(ehrenfest_residual(vs, spec, grid));
}
BENCHMARK(BM_Ehrenfest)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
