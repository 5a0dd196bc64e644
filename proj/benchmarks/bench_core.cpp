#include <benchmark/benchmark.h>

#include <random>

#include "oracles.hpp"
#include "popstat/special_functions.hpp"
#include "popstat/tuning.hpp"

using namespace popstat;

namespace {

struct Fixture {
  PyramidMap world;
  LogOutcomeVector cases;
  LogOutcomeVector deaths;
};

const Fixture& world(std::size_t n) {
  static std::map<std::size_t, Fixture> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::mt19937_64 rng(n);
  Fixture f;
  f.world = oracle::synthetic_world(rng, n);
  std::normal_distribution<double> nd;
  for (const auto& [code, _] : f.world) {
    f.cases.values[code] = 10.0 + nd(rng);
    f.deaths.values[code] = 6.0 + nd(rng);
  }
  return cache.emplace(n, std::move(f)).first->second;
}

void BM_PopDivergence(benchmark::State& state) {
  const auto& w = world(2).world;
  const auto& p = w.begin()->second;
  const auto& q = std::next(w.begin())->second;
  for (auto _ : state) benchmark::DoNotOptimize(pop_divergence(p, q));
}
BENCHMARK(BM_PopDivergence);

void BM_DivergenceVector(benchmark::State& state) {
  const auto& w = world(static_cast<std::size_t>(state.range(0))).world;
  for (auto _ : state) benchmark::DoNotOptimize(divergence_vector(w.begin()->second, w));
}
BENCHMARK(BM_DivergenceVector)->Arg(183);

void BM_Tune(benchmark::State& state) {
  const auto& f = world(static_cast<std::size_t>(state.range(0)));
  TuningOptions opts;
  opts.threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(tune(f.world, f.cases, f.deaths, opts));
}
BENCHMARK(BM_Tune)->Args({183, 1})->Args({183, 4})->Unit(benchmark::kMillisecond);

void BM_Pearson(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  std::vector<double> x(183), y(183);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = nd(rng);
    y[i] = x[i] + nd(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(pearson(x, y));
}
BENCHMARK(BM_Pearson);

void BM_IncompleteBeta(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(special::regularized_incomplete_beta(90.5, 0.5, 0.83));
  }
}
BENCHMARK(BM_IncompleteBeta);

}  // namespace

BENCHMARK_MAIN();
