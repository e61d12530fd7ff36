#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "gcnboost/errors.hpp"
#include "gcnboost/node2vec.hpp"
#include "gcnboost/rng.hpp"

using namespace gcnboost;

namespace {

std::vector<std::vector<NodeId>> from_edges(int n, const std::vector<Edge>& edges) {
  std::vector<std::vector<NodeId>> adj(static_cast<std::size_t>(n));
  for (const Edge& e : edges) {
    adj[static_cast<std::size_t>(e.first)].push_back(e.second);
    adj[static_cast<std::size_t>(e.second)].push_back(e.first);
  }
  for (auto& x : adj) std::sort(x.begin(), x.end());
  return adj;
}

// Analytic second-order distribution out of (prev -> cur).
std::map<NodeId, double> analytic_step(const std::vector<std::vector<NodeId>>& adj,
                                       NodeId prev, NodeId cur, double p, double q) {
  std::map<NodeId, double> weights;
  double total = 0.0;
  for (const NodeId x : adj[static_cast<std::size_t>(cur)]) {
    double w = 1.0 / q;
    if (x == prev) {
      w = 1.0 / p;
    } else if (std::binary_search(adj[static_cast<std::size_t>(prev)].begin(),
                                  adj[static_cast<std::size_t>(prev)].end(), x)) {
      w = 1.0;
    }
    weights[x] = w;
    total += w;
  }
  for (auto& [node, w] : weights) w /= total;
  return weights;
}

}  // namespace

TEST_CASE("every walk is a path in the graph and counts are exact") {
  const auto adj = from_edges(7, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {2, 4}, {4, 5}});
  WalkParams params;
  params.walks_per_node = 3;
  params.walk_length = 12;
  params.seed = 9;
  const WalkCorpus corpus = node2vec_walks(adj, params);

  CHECK(corpus.walks.size() == 7 * 3);
  int starts_at[7] = {0};
  for (const auto& walk : corpus.walks) {
    REQUIRE(!walk.empty());
    ++starts_at[walk.front()];
    for (std::size_t i = 1; i < walk.size(); ++i) {
      CHECK(std::binary_search(adj[static_cast<std::size_t>(walk[i - 1])].begin(),
                               adj[static_cast<std::size_t>(walk[i - 1])].end(), walk[i]));
    }
  }
  for (int node = 0; node < 7; ++node) CHECK(starts_at[node] == 3);
  // Node 6 is isolated: its walks have length 1.
  for (const auto& walk : corpus.walks) {
    if (walk.front() == 6) CHECK(walk.size() == 1);
  }
}

TEST_CASE("p=q=1 reduces to a uniform first-order walk on a triangle") {
  const auto adj = from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
  WalkParams params;
  params.walks_per_node = 90;
  params.walk_length = 400;
  params.seed = 4;
  const WalkCorpus corpus = node2vec_walks(adj, params);

  // On a triangle both non-self candidates are neighbors of prev, so the
  // next step should be 50/50 regardless of p and q when p=q=1.
  std::map<std::pair<NodeId, NodeId>, std::map<NodeId, long>> counts;
  long total = 0;
  for (const auto& walk : corpus.walks) {
    for (std::size_t i = 2; i < walk.size(); ++i) {
      ++counts[{walk[i - 2], walk[i - 1]}][walk[i]];
      ++total;
    }
  }
  CHECK(total > 100000);
  for (const auto& [context, next_counts] : counts) {
    long n = 0;
    for (const auto& [node, c] : next_counts) n += c;
    double l1 = 0.0;
    for (const auto& [node, c] : next_counts) {
      l1 += std::abs(static_cast<double>(c) / n - 0.5);
    }
    CHECK(l1 < 0.02);
  }
}

TEST_CASE("biased second-order weights on a path") {
  // At b, having arrived from a: weight(a) = 1/p = 4, weight(c) = 1/q = 0.25.
  const auto adj = from_edges(3, {{0, 1}, {1, 2}});
  const auto dist = analytic_step(adj, 0, 1, 0.25, 4.0);
  CHECK(dist.at(0) == doctest::Approx(16.0 / 17.0).epsilon(1e-12));
  CHECK(dist.at(2) == doctest::Approx(1.0 / 17.0).epsilon(1e-12));

  WalkParams params;
  params.return_bias_p = 0.25;
  params.inout_bias_q = 4.0;
  params.walks_per_node = 600;
  params.walk_length = 40;
  params.seed = 31;
  const WalkCorpus corpus = node2vec_walks(adj, params);

  long returned = 0;
  long moved_on = 0;
  for (const auto& walk : corpus.walks) {
    for (std::size_t i = 2; i < walk.size(); ++i) {
      if (walk[i - 2] == 0 && walk[i - 1] == 1) {
        (walk[i] == 0 ? returned : moved_on) += 1;
      }
    }
  }
  const long n = returned + moved_on;
  REQUIRE(n > 10000);
  CHECK(std::abs(static_cast<double>(returned) / n - 16.0 / 17.0) < 0.01);
}

TEST_CASE("empirical transitions match the analytic biased distribution") {
  const auto adj = from_edges(
      10, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 4}, {3, 4}, {4, 5}, {5, 6},
           {6, 7}, {7, 8}, {8, 9}, {9, 5}, {3, 7}, {2, 8}});
  WalkParams params;
  params.return_bias_p = 0.5;
  params.inout_bias_q = 2.0;
  params.walks_per_node = 4000;
  params.walk_length = 30;
  params.seed = 17;
  const WalkCorpus corpus = node2vec_walks(adj, params);

  std::map<std::pair<NodeId, NodeId>, std::map<NodeId, long>> counts;
  for (const auto& walk : corpus.walks) {
    for (std::size_t i = 2; i < walk.size(); ++i) {
      ++counts[{walk[i - 2], walk[i - 1]}][walk[i]];
    }
  }

  int checked = 0;
  for (const auto& [context, next_counts] : counts) {
    long n = 0;
    for (const auto& [node, c] : next_counts) n += c;
    if (n < 10000) continue;
    ++checked;
    const auto analytic =
        analytic_step(adj, context.first, context.second, params.return_bias_p,
                      params.inout_bias_q);
    double l1 = 0.0;
    for (const auto& [node, prob] : analytic) {
      const auto it = next_counts.find(node);
      const double freq = it == next_counts.end() ? 0.0
                                                  : static_cast<double>(it->second) / n;
      l1 += std::abs(freq - prob);
    }
    CHECK(l1 < 0.05);
  }
  CHECK(checked >= 5);
}

TEST_CASE("walks are reproducible from the seed") {
  const auto adj = from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}});
  WalkParams params;
  params.seed = 99;
  params.walks_per_node = 2;
  params.walk_length = 10;
  const WalkCorpus first = node2vec_walks(adj, params);
  CHECK(first.walks == node2vec_walks(adj, params).walks);
  params.seed = 100;
  CHECK(first.walks != node2vec_walks(adj, params).walks);
}

TEST_CASE("skip-gram with zero epochs returns the seeded initialization") {
  const auto adj = from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  WalkParams wp;
  wp.seed = 3;
  wp.walks_per_node = 2;
  wp.walk_length = 8;
  const WalkCorpus corpus = node2vec_walks(adj, wp);

  SkipGramParams sp;
  sp.dim = 16;
  sp.epochs = 0;
  sp.seed = 12;
  const EmbeddingTable init = skipgram_init(corpus, sp);
  const SkipGramResult trained = train_skipgram(corpus, sp);
  REQUIRE(trained.embeddings.rows.size() == init.rows.size());
  for (const auto& [node, row] : init.rows) {
    CHECK(trained.embeddings.rows.at(node) == row);
  }
  CHECK(trained.initial_objective == trained.final_objective);
}

TEST_CASE("skip-gram training is deterministic and lowers the objective") {
  const auto adj = from_edges(8, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6},
                                  {6, 7}, {7, 0}, {0, 4}});
  WalkParams wp;
  wp.seed = 5;
  wp.walks_per_node = 6;
  wp.walk_length = 20;
  const WalkCorpus corpus = node2vec_walks(adj, wp);
  REQUIRE(corpus.total_steps() >= 100);

  SkipGramParams sp;
  sp.dim = 12;
  sp.epochs = 3;
  sp.window = 3;
  sp.seed = 8;
  const SkipGramResult a = train_skipgram(corpus, sp);
  const SkipGramResult b = train_skipgram(corpus, sp);
  CHECK(a.final_objective < a.initial_objective);
  CHECK(a.final_objective == b.final_objective);
  for (const auto& [node, row] : a.embeddings.rows) {
    CHECK(b.embeddings.rows.at(node) == row);
  }

  CHECK_THROWS_AS(train_skipgram(corpus, [] {
                    SkipGramParams bad;
                    bad.dim = 0;
                    return bad;
                  }()),
                  ConfigError);
}

TEST_CASE("embeddings separate two cliques joined by a bridge") {
  // Two 4-cliques, one bridge edge.
  std::vector<Edge> edges;
  for (int base : {0, 4}) {
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) edges.push_back({base + i, base + j});
    }
  }
  edges.push_back({0, 4});
  const auto adj = from_edges(8, edges);

  WalkParams wp;
  wp.seed = 20;
  wp.walks_per_node = 20;
  wp.walk_length = 20;
  SkipGramParams sp;
  sp.dim = 16;
  sp.epochs = 6;
  sp.window = 3;
  sp.seed = 21;
  const SkipGramResult result = train_skipgram(node2vec_walks(adj, wp), sp);

  auto cosine = [&result](NodeId a, NodeId b) {
    const auto& x = result.embeddings.rows.at(a);
    const auto& y = result.embeddings.rows.at(b);
    return static_cast<double>(x.dot(y)) / (x.norm() * y.norm());
  };
  double within = 0.0;
  double across = 0.0;
  int wn = 0;
  int an = 0;
  for (NodeId a = 0; a < 8; ++a) {
    for (NodeId b = a + 1; b < 8; ++b) {
      if ((a < 4) == (b < 4)) {
        within += cosine(a, b);
        ++wn;
      } else {
        across += cosine(a, b);
        ++an;
      }
    }
  }
  CHECK(within / wn > across / an);
}
