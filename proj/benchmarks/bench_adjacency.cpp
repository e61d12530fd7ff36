#include <benchmark/benchmark.h>

#include "gcnboost/adjacency.hpp"
#include "gcnboost/rng.hpp"
#include "support/test_helpers.hpp"

namespace {

using namespace gcnboost;

void BM_normalized_adjacency(benchmark::State& state) {
  Rng rng(42);
  const int n = static_cast<int>(state.range(0));
  const auto edges = testing::random_graph_edges(rng, n, 8.0 / n);
  for (auto _ : state) {
    NormalizedAdjacency adj(n, edges);
    benchmark::DoNotOptimize(adj.matrix().nonZeros());
  }
  state.SetComplexityN(n);
}

}  // namespace

BENCHMARK(BM_normalized_adjacency)->Arg(256)->Arg(1024)->Arg(4096)->Complexity();
