#include <benchmark/benchmark.h>

#include <random>

#include "cipher/cluster.hpp"

namespace {

std::vector<std::vector<double>> blobs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<std::vector<double>> out(n, std::vector<double>(8));
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : out[i]) v = d(rng) + 6.0 * static_cast<double>(i % 4);
  }
  return out;
}

void BM_DistanceMatrix(benchmark::State& state) {
  const auto pts = blobs(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(cipher::DistanceMatrix::euclidean(pts));
}
BENCHMARK(BM_DistanceMatrix)->Arg(500)->Arg(2000);

void BM_Hdbscan(benchmark::State& state) {
  const auto d = cipher::DistanceMatrix::euclidean(blobs(static_cast<std::size_t>(state.range(0)), 2));
  cipher::ClusterParams p;
  for (auto _ : state) benchmark::DoNotOptimize(cipher::hdbscan(d, p));
}
BENCHMARK(BM_Hdbscan)->Arg(200)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
