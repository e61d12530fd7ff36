#include <benchmark/benchmark.h>

#include "gcnboost/node2vec.hpp"
#include "gcnboost/rng.hpp"

namespace {

using namespace gcnboost;

std::vector<std::vector<NodeId>> ring_of_cliques(int cliques, int size) {
  const int n = cliques * size;
  std::vector<std::vector<NodeId>> adj(static_cast<std::size_t>(n));
  auto connect = [&adj](NodeId a, NodeId b) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  };
  for (int c = 0; c < cliques; ++c) {
    for (int i = 0; i < size; ++i) {
      for (int j = i + 1; j < size; ++j) connect(c * size + i, c * size + j);
    }
    connect(c * size, ((c + 1) % cliques) * size);
  }
  for (auto& neighbors : adj) std::sort(neighbors.begin(), neighbors.end());
  return adj;
}

void BM_walks(benchmark::State& state) {
  const auto adj = ring_of_cliques(static_cast<int>(state.range(0)), 8);
  WalkParams params;
  params.walk_length = 40;
  params.walks_per_node = 4;
  params.return_bias_p = 0.5;
  params.inout_bias_q = 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(node2vec_walks(adj, params).total_steps());
  }
}

void BM_skipgram_epoch(benchmark::State& state) {
  const auto adj = ring_of_cliques(16, 8);
  WalkParams wp;
  wp.walk_length = 20;
  wp.walks_per_node = 4;
  const WalkCorpus corpus = node2vec_walks(adj, wp);
  SkipGramParams sp;
  sp.dim = static_cast<int>(state.range(0));
  sp.epochs = 1;
  sp.window = 4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_skipgram(corpus, sp).final_objective);
  }
}

}  // namespace

BENCHMARK(BM_walks)->Arg(16)->Arg(64);
BENCHMARK(BM_skipgram_epoch)->Arg(32)->Arg(128);
