#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <vector>

#include "gcnboost/graph.hpp"

namespace gcnboost {

struct WalkParams {
  double return_bias_p = 1.0;
  double inout_bias_q = 1.0;
  int walk_length = 40;
  int walks_per_node = 10;
  std::uint64_t seed = 0;
};

struct WalkCorpus {
  std::vector<std::vector<NodeId>> walks;
  std::size_t total_steps() const;
};

// Second-order biased random walks. From current node v having arrived from
// t, the unnormalized weight of candidate x is 1/p if x == t, 1 if x is a
// neighbor of t, and 1/q otherwise; the first step is uniform. Every node
// starts walks_per_node walks; isolated nodes yield length-1 walks. Each walk
// draws from its own seed stream derived from (seed, start node, walk index),
// so the corpus is independent of generation order.
WalkCorpus node2vec_walks(const std::vector<std::vector<NodeId>>& neighbors,
                          const WalkParams& params);
WalkCorpus node2vec_walks(const ExtendedKG& ekg, const WalkParams& params);

struct SkipGramParams {
  int dim = 128;
  int window = 5;
  int negatives_per_positive = 5;
  int epochs = 5;
  double learning_rate = 0.025;
  std::uint64_t seed = 0;
};

struct EmbeddingTable {
  int dim = 0;
  std::map<NodeId, Eigen::VectorXf> rows;
};

// The seeded starting point of skip-gram training; train with zero epochs
// returns exactly this table.
EmbeddingTable skipgram_init(const WalkCorpus& corpus, const SkipGramParams& params);

struct SkipGramResult {
  EmbeddingTable embeddings;  // input vectors, one per node in the corpus
  // Mean negative-sampling loss per (center, context) pair, evaluated with a
  // fixed negative stream before and after training.
  double initial_objective = 0.0;
  double final_objective = 0.0;
};

SkipGramResult train_skipgram(const WalkCorpus& corpus, const SkipGramParams& params);

}  // namespace gcnboost
