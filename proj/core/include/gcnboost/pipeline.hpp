#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gcnboost/dataset.hpp"
#include "gcnboost/features.hpp"
#include "gcnboost/gcn.hpp"
#include "gcnboost/node2vec.hpp"

namespace gcnboost {

struct PipelineConfig {
  WalkParams walks;
  SkipGramParams skipgram;
  TrainConfig training;
  int hidden_dim = 16;
  InitScheme scheme = InitScheme::n2v_plus_random;
  // 0 means "derive from the run seed"; a nonzero value pins the feature
  // initialization stream directly.
  std::uint64_t init_seed_override = 0;
  PseudoSource pseudo_source = PseudoSource::baseline_model;
  int refresh_every = 0;  // 0 keeps pseudo labels fixed for the whole run
  std::optional<std::pair<std::string, int>> degree_filter;  // category, min degree
  std::vector<std::string> tasks;  // categories to train/evaluate; empty = all
  std::uint64_t seed = 1;
  int baseline_iterations = 300;
  double baseline_learning_rate = 0.5;
  // Upper bound on concurrent strategy runs (the ablation rows are
  // independent); results are identical at any thread count.
  int max_threads = 1;
};

struct BaselineResult {
  std::vector<int> predictions;      // class index per test row
  std::vector<int> absent_classes;   // classes with no training example
};

// Multinomial logistic regression on standardized features, trained by
// full-batch gradient descent. Stands in for an externally trained
// pseudo-labeling classifier; classes absent from the training set can never
// be predicted and are reported back.
BaselineResult baseline_pseudo_labeler(const Eigen::MatrixXf& train_features,
                                       const std::vector<int>& train_classes,
                                       int num_classes,
                                       const Eigen::MatrixXf& test_features,
                                       int iterations, double learning_rate,
                                       std::uint64_t seed);

// Uniform draw over the observed label values of each strategy category,
// from a per-(node, category) derived stream.
PseudoLabelAssignment random_pseudo_labels(
    const std::vector<std::int64_t>& test_ids, const Strategy& strategy,
    const std::vector<std::vector<std::string>>& values_by_category,
    std::uint64_t seed);

// Pseudo labels for one strategy from the configured source: random draws,
// the baseline classifier per category, or the dataset's ingested file.
PseudoLabelAssignment make_pseudo_labels(const Dataset& dataset, const Strategy& strategy,
                                         PseudoSource source, const PipelineConfig& config,
                                         std::vector<std::string>* warnings = nullptr);

struct Metrics {
  struct Entry {
    std::optional<double> accuracy;  // absent when no node was evaluated
    int evaluated = 0;
    int correct = 0;
    bool operator==(const Entry&) const = default;
  };
  std::map<CategoryId, Entry> per_category;
  std::vector<std::string> warnings;

  bool operator==(const Metrics&) const = default;
};

// Top-1 accuracy per category over non-excluded test artworks. Ground-truth
// values that never appeared in training still count (necessarily wrong) and
// produce a coverage warning.
Metrics evaluate(
    const Dataset& dataset,
    const std::map<CategoryId, std::map<std::int64_t, std::string>>& predictions,
    const std::map<CategoryId, std::set<std::int64_t>>& excluded);

// Task construction shared by the trainer, the oracle, and the tests:
// class indices follow class_values order; train/validation masks come from
// surviving assignment edges, test targets from dataset truth where the value
// is part of the class space.
TaskLabels make_task(const ExtendedKG& ekg, const Dataset& dataset, CategoryId category,
                     const std::vector<std::string>& class_values);

struct RunStrategyResult {
  Metrics metrics;
  ExtendedKG ekg;
  NormalizedAdjacency adjacency;
  EmbeddingTable embeddings;  // node2vec table the features were built from
  FeatureMatrix h0;
  // Per dataset category; disengaged for categories outside config.tasks.
  std::vector<std::optional<TrainResult>> tasks;
  std::vector<std::vector<std::string>> class_values;  // per category
  std::map<CategoryId, std::map<std::int64_t, std::string>> predictions;
  std::map<CategoryId, std::set<std::int64_t>> excluded_test;
  std::set<std::string> excluded_values;  // degree filter report
};

// One full pass: pseudo labels, extended graph, embeddings, one trained
// model per task category, evaluation on the test split.
RunStrategyResult run_strategy(const Dataset& dataset, const Strategy& strategy,
                               PseudoSource source, const PipelineConfig& config);

// Swaps the pseudo edges of the given categories for newly predicted values
// and rebuilds the normalized adjacency. Values must resolve to existing
// label nodes and must cover every test node of each refreshed category.
std::pair<ExtendedKG, NormalizedAdjacency> refresh_pseudo_labels(
    const ExtendedKG& ekg,
    const std::map<CategoryId, std::map<NodeId, std::string>>& new_values);

struct AblationRow {
  Strategy strategy;
  PseudoSource source = PseudoSource::baseline_model;
  std::string categories_label;  // sorted category names joined with '+'
  bool duplicate_of_earlier = false;
  std::uint64_t seed = 0;
  Metrics metrics;
};

struct AblationReport {
  std::vector<AblationRow> rows;
  std::vector<std::string> category_names;
  std::string config_fingerprint;
  std::uint64_t seed = 0;
};

// Called once per completed row (serialized when rows run concurrently), so
// callers can persist per-strategy artifacts without the report retaining
// every graph and model.
using RowObserver =
    std::function<void(std::size_t index, const AblationRow&, const RunStrategyResult&)>;

// The ablation grid: S0 with random labels, every S1 singleton, S2 pairs and
// S3 triples (all of them by default when there are at most four categories),
// then S_all. Duplicate category subsets are still emitted, flagged. Rows run
// independently with per-row derived seeds; order is fixed by the grid.
AblationReport ablation_suite(const Dataset& dataset, const PipelineConfig& config,
                              std::string config_fingerprint,
                              const std::vector<std::vector<CategoryId>>& pairs = {},
                              const std::vector<std::vector<CategoryId>>& triples = {},
                              const RowObserver& observer = {});

std::string report_to_json(const AblationReport& report);
std::string report_to_csv(const AblationReport& report);

}  // namespace gcnboost
