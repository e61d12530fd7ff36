#include "gcnboost/node2vec.hpp"

#include <algorithm>
#include <cmath>

#include "gcnboost/errors.hpp"
#include "gcnboost/rng.hpp"

namespace gcnboost {

std::size_t WalkCorpus::total_steps() const {
  std::size_t n = 0;
  for (const auto& walk : walks) n += walk.size();
  return n;
}

namespace {

bool is_neighbor(const std::vector<NodeId>& sorted, NodeId x) {
  return std::binary_search(sorted.begin(), sorted.end(), x);
}

}  // namespace

WalkCorpus node2vec_walks(const std::vector<std::vector<NodeId>>& neighbors,
                          const WalkParams& params) {
  if (params.walk_length < 2 || params.walks_per_node < 1 ||
      params.return_bias_p <= 0.0 || params.inout_bias_q <= 0.0) {
    throw ConfigError("invalid walk parameters");
  }
  if (neighbors.empty()) throw DataError("cannot walk an empty graph");

  const double w_return = 1.0 / params.return_bias_p;
  const double w_out = 1.0 / params.inout_bias_q;

  WalkCorpus corpus;
  corpus.walks.reserve(neighbors.size() * static_cast<std::size_t>(params.walks_per_node));
  std::vector<double> weights;

  for (NodeId start = 0; start < static_cast<NodeId>(neighbors.size()); ++start) {
    for (int w = 0; w < params.walks_per_node; ++w) {
      Rng rng(mix_seed(params.seed, "walk", static_cast<std::uint64_t>(start),
                       static_cast<std::uint64_t>(w)));
      std::vector<NodeId> walk;
      walk.reserve(static_cast<std::size_t>(params.walk_length));
      walk.push_back(start);

      const auto& first_hop = neighbors[static_cast<std::size_t>(start)];
      if (first_hop.empty()) {
        corpus.walks.push_back(std::move(walk));
        continue;
      }
      walk.push_back(first_hop[static_cast<std::size_t>(
          rng.uniform_int(static_cast<std::int64_t>(first_hop.size())))]);

      while (walk.size() < static_cast<std::size_t>(params.walk_length)) {
        const NodeId prev = walk[walk.size() - 2];
        const NodeId cur = walk.back();
        const auto& candidates = neighbors[static_cast<std::size_t>(cur)];

        weights.clear();
        double total = 0.0;
        for (const NodeId x : candidates) {
          double weight = w_out;
          if (x == prev) {
            weight = w_return;
          } else if (is_neighbor(neighbors[static_cast<std::size_t>(prev)], x)) {
            weight = 1.0;
          }
          total += weight;
          weights.push_back(total);
        }

        const double pick = rng.uniform(0.0, total);
        std::size_t chosen = static_cast<std::size_t>(
            std::lower_bound(weights.begin(), weights.end(), pick) - weights.begin());
        if (chosen >= candidates.size()) chosen = candidates.size() - 1;
        walk.push_back(candidates[chosen]);
      }
      corpus.walks.push_back(std::move(walk));
    }
  }
  return corpus;
}

WalkCorpus node2vec_walks(const ExtendedKG& ekg, const WalkParams& params) {
  return node2vec_walks(adjacency_lists(ekg), params);
}

namespace {

struct SgnsState {
  std::vector<NodeId> vocab;            // ascending node ids
  std::vector<std::int32_t> vocab_of;   // node id -> vocab slot, -1 if absent
  std::vector<double> negative_cdf;     // over vocab slots, count^0.75
  Eigen::MatrixXf input;                // vocab x dim
  Eigen::MatrixXf output;
};

SgnsState make_state(const WalkCorpus& corpus, const SkipGramParams& params) {
  NodeId max_id = -1;
  for (const auto& walk : corpus.walks) {
    for (const NodeId node : walk) max_id = std::max(max_id, node);
  }
  if (max_id < 0) throw DataError("empty walk corpus");

  std::vector<std::int64_t> counts(static_cast<std::size_t>(max_id) + 1, 0);
  for (const auto& walk : corpus.walks) {
    for (const NodeId node : walk) ++counts[static_cast<std::size_t>(node)];
  }

  SgnsState st;
  st.vocab_of.assign(static_cast<std::size_t>(max_id) + 1, -1);
  for (NodeId id = 0; id <= max_id; ++id) {
    if (counts[static_cast<std::size_t>(id)] == 0) continue;
    st.vocab_of[static_cast<std::size_t>(id)] = static_cast<std::int32_t>(st.vocab.size());
    st.vocab.push_back(id);
  }

  double cum = 0.0;
  st.negative_cdf.reserve(st.vocab.size());
  for (const NodeId id : st.vocab) {
    cum += std::pow(static_cast<double>(counts[static_cast<std::size_t>(id)]), 0.75);
    st.negative_cdf.push_back(cum);
  }

  const int dim = params.dim;
  st.input.resize(static_cast<Eigen::Index>(st.vocab.size()), dim);
  st.output.setZero(static_cast<Eigen::Index>(st.vocab.size()), dim);
  const float bound = 0.5f / static_cast<float>(dim);
  for (std::size_t slot = 0; slot < st.vocab.size(); ++slot) {
    Rng rng(mix_seed(params.seed, "sg_init", static_cast<std::uint64_t>(st.vocab[slot])));
    for (int d = 0; d < dim; ++d) {
      st.input(static_cast<Eigen::Index>(slot), d) =
          static_cast<float>(rng.uniform(-bound, bound));
    }
  }
  return st;
}

std::size_t sample_negative(const SgnsState& st, Rng& rng) {
  const double pick = rng.uniform(0.0, st.negative_cdf.back());
  std::size_t slot = static_cast<std::size_t>(
      std::lower_bound(st.negative_cdf.begin(), st.negative_cdf.end(), pick) -
      st.negative_cdf.begin());
  if (slot >= st.vocab.size()) slot = st.vocab.size() - 1;
  return slot;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// One sweep over every (center, context) pair. With train=false it only
// accumulates the loss; the negative stream comes from rng either way, so an
// evaluation pass reseeded identically sees identical negatives.
double sweep(SgnsState& st, const WalkCorpus& corpus, const SkipGramParams& params,
             Rng& rng, bool train) {
  const float lr = static_cast<float>(params.learning_rate);
  double loss_sum = 0.0;
  std::size_t pair_count = 0;
  Eigen::VectorXf grad_center(params.dim);

  for (const auto& walk : corpus.walks) {
    const int len = static_cast<int>(walk.size());
    for (int i = 0; i < len; ++i) {
      const std::int32_t center =
          st.vocab_of[static_cast<std::size_t>(walk[static_cast<std::size_t>(i)])];
      const int lo = std::max(0, i - params.window);
      const int hi = std::min(len - 1, i + params.window);
      for (int j = lo; j <= hi; ++j) {
        if (j == i) continue;
        const std::int32_t context =
            st.vocab_of[static_cast<std::size_t>(walk[static_cast<std::size_t>(j)])];
        ++pair_count;
        grad_center.setZero();
        double pair_loss = 0.0;

        for (int k = 0; k <= params.negatives_per_positive; ++k) {
          std::int32_t target = context;
          float label = 1.0f;
          if (k > 0) {
            target = static_cast<std::int32_t>(sample_negative(st, rng));
            if (target == context) continue;
            label = 0.0f;
          }
          const float score = static_cast<float>(
              sigmoid(st.input.row(center).dot(st.output.row(target))));
          pair_loss -= std::log(std::max(
              1e-10, static_cast<double>(label == 1.0f ? score : 1.0f - score)));
          if (train) {
            const float g = lr * (label - score);
            grad_center += g * st.output.row(target);
            st.output.row(target) += g * st.input.row(center);
          }
        }
        if (train) st.input.row(center) += grad_center;
        loss_sum += pair_loss;
      }
    }
  }
  return pair_count == 0 ? 0.0 : loss_sum / static_cast<double>(pair_count);
}

EmbeddingTable to_table(const SgnsState& st, int dim) {
  EmbeddingTable table;
  table.dim = dim;
  for (std::size_t slot = 0; slot < st.vocab.size(); ++slot) {
    table.rows.emplace(st.vocab[slot], st.input.row(static_cast<Eigen::Index>(slot)));
  }
  return table;
}

void validate(const SkipGramParams& params) {
  if (params.dim <= 0) throw ConfigError("skip-gram dim must be >= 1");
  if (params.window < 1 || params.negatives_per_positive < 1 || params.epochs < 0 ||
      params.learning_rate <= 0.0) {
    throw ConfigError("invalid skip-gram parameters");
  }
}

}  // namespace

EmbeddingTable skipgram_init(const WalkCorpus& corpus, const SkipGramParams& params) {
  validate(params);
  return to_table(make_state(corpus, params), params.dim);
}

SkipGramResult train_skipgram(const WalkCorpus& corpus, const SkipGramParams& params) {
  validate(params);
  SgnsState st = make_state(corpus, params);

  SkipGramResult result;
  {
    Rng eval_rng(mix_seed(params.seed, "sg_eval"));
    result.initial_objective = sweep(st, corpus, params, eval_rng, /*train=*/false);
  }
  Rng train_rng(mix_seed(params.seed, "sg_train"));
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    sweep(st, corpus, params, train_rng, /*train=*/true);
  }
  {
    Rng eval_rng(mix_seed(params.seed, "sg_eval"));
    result.final_objective = sweep(st, corpus, params, eval_rng, /*train=*/false);
  }

  result.embeddings = to_table(st, params.dim);
  return result;
}

}  // namespace gcnboost
