#include <benchmark/benchmark.h>

#include "gcnboost/gcn.hpp"
#include "gcnboost/rng.hpp"
#include "support/test_helpers.hpp"

namespace {

using namespace gcnboost;

struct Fixture {
  NormalizedAdjacency adj;
  Eigen::MatrixXd h0;
  GcnModel model;
  TaskLabels task;

  Fixture(int n, int d, int h, int k) {
    Rng rng(7);
    adj = NormalizedAdjacency(n, testing::random_graph_edges(rng, n, 8.0 / n));
    h0.resize(n, d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) h0(i, j) = rng.uniform(-1.0, 1.0);
    }
    model = glorot_init(d, h, k, 11);
    task.num_classes = k;
    for (int i = 0; i < n; ++i) {
      task.targets[i] = static_cast<int>(rng.uniform_int(k));
      if (i % 2 == 0) task.train_mask.push_back(i);
    }
  }
};

void BM_forward(benchmark::State& state) {
  Fixture fx(static_cast<int>(state.range(0)), 128, 16, 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(fx.model, fx.adj, fx.h0).probs.sum());
  }
}

void BM_train_iteration(benchmark::State& state) {
  Fixture fx(static_cast<int>(state.range(0)), 128, 16, 10);
  AdamState opt = AdamState::zeros_like(fx.model);
  TrainConfig config;
  for (auto _ : state) {
    const Gradients grads =
        backward(fx.model, fx.adj, fx.h0, fx.task, fx.task.train_mask);
    adam_step(fx.model, opt, grads, config);
    benchmark::DoNotOptimize(fx.model.w1.sum());
  }
}

}  // namespace

BENCHMARK(BM_forward)->Arg(512)->Arg(2048);
BENCHMARK(BM_train_iteration)->Arg(512)->Arg(2048);
