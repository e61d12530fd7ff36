#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gcnboost/adjacency.hpp"
#include "gcnboost/features.hpp"

namespace gcnboost {

// Two-layer graph convolution: hidden = ReLU(A H0 W1 + b1), logits =
// A hidden W2 + b2 with A the normalized adjacency; the second layer emits
// class logits directly.
struct GcnModel {
  Eigen::MatrixXd w1;  // input_dim x hidden_dim
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // hidden_dim x class_count
  Eigen::VectorXd b2;

  int input_dim() const { return static_cast<int>(w1.rows()); }
  int hidden_dim() const { return static_cast<int>(w1.cols()); }
  int class_count() const { return static_cast<int>(w2.cols()); }
};

// Seeded uniform Glorot init, bounds +-sqrt(6/(fan_in+fan_out)), zero biases.
GcnModel glorot_init(int input_dim, int hidden_dim, int class_count, std::uint64_t seed);

struct TrainConfig {
  double learning_rate = 0.001;
  int max_iterations = 2000;
  int patience = 100;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
};

// Ground-truth class indices for one category's task, plus the node masks the
// loss is evaluated over. Nodes outside the masks never influence training.
struct TaskLabels {
  CategoryId category = -1;
  int num_classes = 0;
  std::map<NodeId, int> targets;
  std::vector<NodeId> train_mask;
  std::vector<NodeId> validation_mask;

  void validate() const;  // masks disjoint, every masked node has a target
};

struct ForwardPass {
  Eigen::MatrixXd hidden;
  Eigen::MatrixXd logits;
  Eigen::MatrixXd probs;  // row-softmax of logits
};

ForwardPass forward(const GcnModel& model, const NormalizedAdjacency& adj,
                    const FeatureMatrix& h0);

// Summed cross-entropy -sum_i log probs[i, target_i] over the mask; zero for
// an empty mask.
double masked_loss(const Eigen::MatrixXd& probs, const TaskLabels& task,
                   std::span<const NodeId> mask);

struct Gradients {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;
};

Gradients backward(const GcnModel& model, const NormalizedAdjacency& adj,
                   const FeatureMatrix& h0, const TaskLabels& task,
                   std::span<const NodeId> mask);

// Same gradients from an already computed forward pass.
Gradients backward_from(const GcnModel& model, const NormalizedAdjacency& adj,
                        const FeatureMatrix& h0, const ForwardPass& fwd,
                        const TaskLabels& task, std::span<const NodeId> mask);

struct AdamState {
  Gradients m;
  Gradients v;
  long step = 0;

  static AdamState zeros_like(const GcnModel& model);
};

// Standard bias-corrected Adam update, in place. Rejects non-finite
// gradients so a diverged run aborts with a diagnostic instead of silently
// producing NaN parameters.
void adam_step(GcnModel& model, AdamState& state, const Gradients& grads,
               const TrainConfig& config);

struct TrainHistory {
  std::vector<double> train_loss;       // row per iteration, 1-based
  std::vector<double> validation_loss;  // NaN entries when no validation mask
  int stopped_at = 0;
  double best_validation_loss = 0.0;  // NaN when no validation mask
};

struct TrainResult {
  GcnModel model;
  TrainHistory history;
};

// Full-batch training. Stops at max_iterations, or once the validation loss
// has not strictly improved its running best for `patience` consecutive
// iterations; returns the parameters snapshotted at the best validation loss
// (final parameters when there is no validation mask, which disables early
// stopping).
TrainResult train(const NormalizedAdjacency& adj, const FeatureMatrix& h0,
                  const TaskLabels& task, const TrainConfig& config,
                  int hidden_dim = 16);

// Argmax class per requested node; ties break to the lowest class index.
std::map<NodeId, int> predict(const GcnModel& model, const NormalizedAdjacency& adj,
                              const FeatureMatrix& h0, std::span<const NodeId> nodes);

std::map<NodeId, int> predict_from(const ForwardPass& fwd, std::span<const NodeId> nodes);

// Checkpoint file: magic "GBMD", u32 dims (input, hidden, classes), then
// w1, b1, w2, b2 row-major little-endian f32.
void write_checkpoint(const std::filesystem::path& path, const GcnModel& model);
GcnModel read_checkpoint(const std::filesystem::path& path);

std::string history_to_csv(const TrainHistory& history);

}  // namespace gcnboost
