#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

#include "ineq/energy.hpp"
#include "ineq/fokker_planck.hpp"
#include "ineq/income_fit.hpp"
#include "ineq/simulation.hpp"
#include "ineq/two_class.hpp"

using namespace ineq;

// Exchange steps per second on a 10^4-agent ensemble.
static void BM_ExchangeSteps(benchmark::State& state) {
  auto e = kinetic::AgentEnsemble::equal_split(10000, 500000);
  kinetic::ExchangeRule rule;
  rule.kind = kinetic::RuleKind::uniform_amount;
  rule.delta = 50;
  kinetic::SimulationOptions o;
  o.steps = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    o.seed = seed++;
    benchmark::DoNotOptimize(kinetic::run_simulation(e, rule, o));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExchangeSteps)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

static void BM_WeightedCcdf(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> v(n), w(n);
  Rng rng(3);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = rng.uniform() * 100.0;
    w[i] = rng.uniform();
  }
  std::sort(v.begin(), v.end());
  for (auto _ : state) benchmark::DoNotOptimize(WeightedCDF(v, w));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_WeightedCcdf)->Range(1 << 8, 1 << 16)->Complexity();

static void BM_StationarySolution(benchmark::State& state) {
  const double b = 48.0 / (113.0 * 113.0);
  const auto spec = fp::DriftDiffusionSpec::combined(1.0, 48.0, 0.34 * b, b);
  const auto grid = fp::make_grid(spec, 60.0 * 113.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fp::stationary_solution(spec, grid));
}
BENCHMARK(BM_StationarySolution)->Arg(500)->Arg(4000)->Unit(benchmark::kMillisecond);

static void BM_FitReport(benchmark::State& state) {
  Rng rng(7);
  const auto table =
      income::synthesize_income_table(TwoClassModel(48.0, 1.34, 113.0), 100000, 50, 1e-4, rng);
  income::FitOptions o;
  o.joint_refine = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(income::fit_report(table, o));
}
BENCHMARK(BM_FitReport)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_EnergyLorenz(benchmark::State& state) {
  const auto recs = energy::table2_fixture(2005);
  for (auto _ : state) benchmark::DoNotOptimize(energy::lorenz_energy(recs));
}
BENCHMARK(BM_EnergyLorenz);
BENCHMARK_MAIN();
