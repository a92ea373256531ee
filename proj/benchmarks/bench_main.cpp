#include <benchmark/benchmark.h>

#include "entrydyn/abm.hpp"
#include "entrydyn/kinetic.hpp"
#include "entrydyn/oracle.hpp"

using namespace entrydyn;

namespace {

const ProbabilityModel kModel{Logistic{1.0, 0.0}};

void BM_PlayRound(benchmark::State& state) {
  const auto n = state.range(0);
  const GameParams g(n, n / 2, 0.01, 100, LearningRule::BasicReinforcement);
  auto pop = abm::init_population(g, abm::init::Gaussian{0.0, 1.0, false, 0.0}, 1);
  abm::Rng rng(2);
  for (auto _ : state) {
    auto [next, out] = abm::play_round(pop, g, kModel, rng);
    benchmark::DoNotOptimize(out.m);
    pop = std::move(next);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_PlayRound)->Arg(1000)->Arg(10000);

void BM_PdeStep(benchmark::State& state) {
  const GridSpec grid{-12.0, 12.0, static_cast<std::size_t>(state.range(0))};
  const GameParams g(1000, 500, 0.01, 100, LearningRule::BasicReinforcement);
  auto f = kinetic::gaussian_with_mean_entry(grid, kModel, 1.0, 0.2);
  const auto m = kinetic::moments(f, kModel);
  const double dt =
      kinetic::stable_dt(grid, kinetic::coefficients(m.a, m.b, g, kModel, grid, kinetic::Variant::EqA), 0.4, 1.0);
  for (auto _ : state) {
    auto next = kinetic::step(f, dt, g, kModel, kinetic::Variant::EqA);
    benchmark::DoNotOptimize(next.values().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PdeStep)->Arg(800)->Arg(1600);

void BM_EnumerateRound(benchmark::State& state) {
  const auto n = state.range(0);
  const GameParams g(n, n / 2, 0.05, 10, LearningRule::FictitiousStochastic);
  const auto pop = abm::init_population(g, abm::init::Gaussian{0.0, 1.0, false, 0.0}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::enumerate_round(pop, g, kModel));
}
BENCHMARK(BM_EnumerateRound)->Arg(6)->Arg(12);

}  // namespace

BENCHMARK_MAIN();
