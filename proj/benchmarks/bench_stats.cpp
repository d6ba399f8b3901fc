#include <benchmark/benchmark.h>

#include <vector>

#include "taxiflow/rng.hpp"
#include "taxiflow/stats.hpp"

using namespace taxiflow;

namespace {

std::vector<double> sample(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(0.0, 100.0);
  return v;
}

}  // namespace

static void BM_MannWhitneyExact(benchmark::State& state) {
  auto x = sample(static_cast<std::size_t>(state.range(0)), 1);
  auto y = sample(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(mann_whitney_u(x, y));
}
BENCHMARK(BM_MannWhitneyExact)->Arg(6)->Arg(8)->Arg(10);

static void BM_MannWhitneyAsymptotic(benchmark::State& state) {
  auto x = sample(static_cast<std::size_t>(state.range(0)), 1);
  auto y = sample(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(mann_whitney_u(x, y));
}
BENCHMARK(BM_MannWhitneyAsymptotic)->Arg(100)->Arg(10000);

static void BM_WilcoxonExact(benchmark::State& state) {
  auto a = sample(static_cast<std::size_t>(state.range(0)), 3);
  auto b = sample(static_cast<std::size_t>(state.range(0)), 4);
  std::vector<std::pair<double, double>> pairs(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) pairs[i] = {a[i], b[i]};
  for (auto _ : state) benchmark::DoNotOptimize(wilcoxon_signed_rank(pairs));
}
BENCHMARK(BM_WilcoxonExact)->Arg(12)->Arg(18)->Arg(20);

static void BM_KruskalWallis(benchmark::State& state) {
  std::vector<std::vector<double>> groups = {sample(static_cast<std::size_t>(state.range(0)), 5),
                                             sample(static_cast<std::size_t>(state.range(0)), 6)};
  for (auto _ : state) benchmark::DoNotOptimize(kruskal_wallis(groups));
}
BENCHMARK(BM_KruskalWallis)->Arg(100)->Arg(10000);
