#include <benchmark/benchmark.h>

#include "edrdim/dimtest.hpp"
#include "edrdim/fpca.hpp"
#include "edrdim/simlab.hpp"
#include "edrdim/sir.hpp"

using namespace edrdim;

namespace {

const simlab::FunctionalSample& sample(int n) {
  static const auto s200 = simlab::generate_functional(2, simlab::ProcessSpec{}, 200, 1);
  static const auto s500 = simlab::generate_functional(2, simlab::ProcessSpec{}, 500, 1);
  return n == 200 ? s200 : s500;
}

void BM_Generate(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        simlab::generate_functional(2, simlab::ProcessSpec{}, static_cast<int>(state.range(0)), ++seed));
  }
}
BENCHMARK(BM_Generate)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_Eigensystem(benchmark::State& state) {
  const auto& s = sample(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eigensystem(s.curves));
}
BENCHMARK(BM_Eigensystem)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_BuildSir(benchmark::State& state) {
  const auto& s = sample(500);
  const auto eig = eigensystem(s.curves);
  const auto scores = pc_scores(s.curves, eig, static_cast<int>(state.range(0)));
  const auto part = make_slices(s.y, 8);
  for (auto _ : state) benchmark::DoNotOptimize(build_sir(scores, part));
}
BENCHMARK(BM_BuildSir)->Arg(5)->Arg(37);

void BM_NeymanStatistic(benchmark::State& state) {
  const auto& s = sample(500);
  const auto eig = eigensystem(s.curves);
  const auto sir = build_sir(pc_scores(s.curves, eig, 31), make_slices(s.y, 8));
  for (auto _ : state) benchmark::DoNotOptimize(neyman_statistic(sir, 500, 1));
}
BENCHMARK(BM_NeymanStatistic);

void BM_NeymanCritical(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_neyman_critical(8, 1, 31, 0.05, 100'000, 1, 1));
  }
}
BENCHMARK(BM_NeymanCritical)->Unit(benchmark::kMillisecond);

void BM_Replicate(benchmark::State& state) {
  EstimationConfig config;
  config.method = Method::adaptive_neyman;
  NeymanCriticalCache cache(1, 100'000, 1);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto s = simlab::generate_functional(2, simlab::ProcessSpec{}, 500, ++seed);
    const auto eig = eigensystem(s.curves);
    const auto scores = pc_scores(s.curves, eig, required_components(config));
    benchmark::DoNotOptimize(estimate_dimension(scores, make_slices(s.y, 8), config, &cache));
  }
}
BENCHMARK(BM_Replicate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
