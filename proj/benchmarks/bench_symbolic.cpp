#include <benchmark/benchmark.h>

#include <random>

#include "cipher/isax_index.hpp"
#include "cipher/symbolic.hpp"

namespace {

std::vector<double> random_series(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> out(n);
  for (auto& v : out) v = d(rng);
  return out;
}

void BM_Paa(benchmark::State& state) {
  const auto series = random_series(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(cipher::paa(series, 8));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Paa)->Arg(128)->Arg(2100)->Arg(16384);

void BM_Sax(benchmark::State& state) {
  const auto p = cipher::paa(random_series(2100, 2), 8);
  const auto c = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cipher::sax(p, c));
}
BENCHMARK(BM_Sax)->Arg(4)->Arg(64);

void BM_Mindist(benchmark::State& state) {
  const auto a = cipher::sax(cipher::paa(random_series(2100, 3), 8), 64);
  const auto b = cipher::sax(cipher::paa(random_series(2100, 4), 8), 16);
  for (auto _ : state) benchmark::DoNotOptimize(cipher::mindist(a, b, 2100));
}
BENCHMARK(BM_Mindist);

void BM_IndexInsert(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<cipher::PaaVector> paas;
  for (std::size_t i = 0; i < n; ++i) paas.push_back(cipher::paa(random_series(64, i), 8));
  cipher::IsaxIndexParams params;
  params.leaf_capacity = 32;
  for (auto _ : state) {
    cipher::IsaxIndex index(params);
    for (std::size_t i = 0; i < n; ++i) index.insert(i, paas[i]);
    benchmark::DoNotOptimize(index.size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IndexInsert)->Arg(1000)->Arg(10000);

}  // namespace
