#include "gcnboost/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "gcnboost/errors.hpp"
#include "gcnboost/io.hpp"
#include "gcnboost/rng.hpp"

namespace gcnboost {

GcnModel glorot_init(int input_dim, int hidden_dim, int class_count,
                     std::uint64_t seed) {
  if (input_dim < 1 || hidden_dim < 1 || class_count < 1) {
    throw ConfigError("model dimensions must be >= 1");
  }
  GcnModel model;
  auto fill = [](Eigen::MatrixXd& w, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-bound, bound);
    }
  };
  Rng rng1(mix_seed(seed, "glorot", 1));
  Rng rng2(mix_seed(seed, "glorot", 2));
  model.w1.resize(input_dim, hidden_dim);
  model.w2.resize(hidden_dim, class_count);
  fill(model.w1, rng1);
  fill(model.w2, rng2);
  model.b1.setZero(hidden_dim);
  model.b2.setZero(class_count);
  return model;
}

void TaskLabels::validate() const {
  std::set<NodeId> train(train_mask.begin(), train_mask.end());
  for (const NodeId node : validation_mask) {
    if (train.count(node) > 0) {
      throw DataError("node " + std::to_string(node) +
                      " appears in both train and validation masks");
    }
  }
  auto check_targets = [this](const std::vector<NodeId>& mask) {
    for (const NodeId node : mask) {
      auto it = targets.find(node);
      if (it == targets.end()) {
        throw DataError("masked node " + std::to_string(node) + " has no target");
      }
      if (it->second < 0 || it->second >= num_classes) {
        throw DataError("node " + std::to_string(node) + " target " +
                        std::to_string(it->second) + " outside [0, " +
                        std::to_string(num_classes) + ")");
      }
    }
  };
  check_targets(train_mask);
  check_targets(validation_mask);
}

ForwardPass forward(const GcnModel& model, const NormalizedAdjacency& adj,
                    const FeatureMatrix& h0) {
  if (h0.rows() != adj.dim()) {
    throw ConfigError("feature rows (" + std::to_string(h0.rows()) +
                      ") do not match graph size (" + std::to_string(adj.dim()) + ")");
  }
  if (h0.cols() != model.input_dim()) {
    throw ConfigError("feature width " + std::to_string(h0.cols()) +
                      " does not match model input dim " +
                      std::to_string(model.input_dim()));
  }

  ForwardPass fwd;
  Eigen::MatrixXd pre1 = adj.matrix() * (h0 * model.w1);
  pre1.rowwise() += model.b1.transpose();
  fwd.hidden = pre1.cwiseMax(0.0);

  fwd.logits = adj.matrix() * (fwd.hidden * model.w2);
  fwd.logits.rowwise() += model.b2.transpose();

  fwd.probs.resizeLike(fwd.logits);
  for (Eigen::Index i = 0; i < fwd.logits.rows(); ++i) {
    const Eigen::RowVectorXd shifted =
        fwd.logits.row(i).array() - fwd.logits.row(i).maxCoeff();
    const Eigen::RowVectorXd exps = shifted.array().exp();
    fwd.probs.row(i) = exps / exps.sum();
  }
  return fwd;
}

double masked_loss(const Eigen::MatrixXd& probs, const TaskLabels& task,
                   std::span<const NodeId> mask) {
  double total = 0.0;
  for (const NodeId node : mask) {
    if (node < 0 || node >= probs.rows()) {
      throw DataError("masked node " + std::to_string(node) + " outside graph");
    }
    auto it = task.targets.find(node);
    if (it == task.targets.end()) {
      throw DataError("masked node " + std::to_string(node) + " has no target");
    }
    if (it->second < 0 || it->second >= probs.cols()) {
      throw DataError("target index " + std::to_string(it->second) +
                      " outside class range");
    }
    total -= std::log(probs(node, it->second));
  }
  return total;
}

Gradients backward_from(const GcnModel& model, const NormalizedAdjacency& adj,
                        const FeatureMatrix& h0, const ForwardPass& fwd,
                        const TaskLabels& task, std::span<const NodeId> mask) {
  Eigen::MatrixXd dlogits = Eigen::MatrixXd::Zero(fwd.probs.rows(), fwd.probs.cols());
  for (const NodeId node : mask) {
    auto it = task.targets.find(node);
    if (it == task.targets.end()) {
      throw DataError("masked node " + std::to_string(node) + " has no target");
    }
    dlogits.row(node) = fwd.probs.row(node);
    dlogits(node, it->second) -= 1.0;
  }

  Gradients grads;
  const Eigen::MatrixXd a_dlogits = adj.matrix() * dlogits;
  grads.w2 = fwd.hidden.transpose() * a_dlogits;
  grads.b2 = dlogits.colwise().sum();

  Eigen::MatrixXd dpre1 =
      (a_dlogits * model.w2.transpose()).array() * (fwd.hidden.array() > 0.0).cast<double>();
  const Eigen::MatrixXd a_dpre1 = adj.matrix() * dpre1;
  grads.w1 = h0.transpose() * a_dpre1;
  grads.b1 = dpre1.colwise().sum();
  return grads;
}

Gradients backward(const GcnModel& model, const NormalizedAdjacency& adj,
                   const FeatureMatrix& h0, const TaskLabels& task,
                   std::span<const NodeId> mask) {
  return backward_from(model, adj, h0, forward(model, adj, h0), task, mask);
}

AdamState AdamState::zeros_like(const GcnModel& model) {
  AdamState state;
  auto zero = [](Gradients& g, const GcnModel& m) {
    g.w1 = Eigen::MatrixXd::Zero(m.w1.rows(), m.w1.cols());
    g.b1 = Eigen::VectorXd::Zero(m.b1.size());
    g.w2 = Eigen::MatrixXd::Zero(m.w2.rows(), m.w2.cols());
    g.b2 = Eigen::VectorXd::Zero(m.b2.size());
  };
  zero(state.m, model);
  zero(state.v, model);
  state.step = 0;
  return state;
}

void adam_step(GcnModel& model, AdamState& state, const Gradients& grads,
               const TrainConfig& config) {
  if (!grads.w1.allFinite() || !grads.b1.allFinite() || !grads.w2.allFinite() ||
      !grads.b2.allFinite()) {
    throw NumericError("non-finite gradient in optimizer step", state.step + 1);
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(config.adam_beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(config.adam_beta2, static_cast<double>(state.step));

  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = config.adam_beta1 * m + (1.0 - config.adam_beta1) * g;
    v = config.adam_beta2 * v + (1.0 - config.adam_beta2) * g.cwiseProduct(g);
    const auto m_hat = m.array() / bc1;
    const auto v_hat = v.array() / bc2;
    param.array() -= config.learning_rate * m_hat / (v_hat.sqrt() + config.adam_epsilon);
  };
  update(model.w1, state.m.w1, state.v.w1, grads.w1);
  update(model.b1, state.m.b1, state.v.b1, grads.b1);
  update(model.w2, state.m.w2, state.v.w2, grads.w2);
  update(model.b2, state.m.b2, state.v.b2, grads.b2);
}

TrainResult train(const NormalizedAdjacency& adj, const FeatureMatrix& h0,
                  const TaskLabels& task, const TrainConfig& config, int hidden_dim) {
  task.validate();
  if (task.train_mask.empty()) throw DataError("training mask is empty");
  if (config.max_iterations < 1 || config.patience < 1) {
    throw ConfigError("max_iterations and patience must be >= 1");
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const bool has_validation = !task.validation_mask.empty();

  GcnModel model = glorot_init(static_cast<int>(h0.cols()), hidden_dim,
                               task.num_classes, config.seed);
  AdamState state = AdamState::zeros_like(model);

  TrainResult result;
  TrainHistory& history = result.history;
  history.best_validation_loss = nan;
  GcnModel best = model;
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int iteration = 1; iteration <= config.max_iterations; ++iteration) {
    const ForwardPass fwd = forward(model, adj, h0);
    const double train_loss = masked_loss(fwd.probs, task, task.train_mask);
    const double val_loss =
        has_validation ? masked_loss(fwd.probs, task, task.validation_mask) : nan;
    history.train_loss.push_back(train_loss);
    history.validation_loss.push_back(val_loss);
    history.stopped_at = iteration;

    if (!std::isfinite(train_loss) || (has_validation && !std::isfinite(val_loss))) {
      throw NumericError("non-finite loss at iteration " + std::to_string(iteration),
                         iteration);
    }

    if (has_validation) {
      if (val_loss < best_val) {
        best_val = val_loss;
        best = model;
        since_best = 0;
      } else {
        ++since_best;
      }
      if (since_best >= config.patience) break;
    }

    const Gradients grads = backward_from(model, adj, h0, fwd, task, task.train_mask);
    adam_step(model, state, grads, config);
  }

  if (has_validation) {
    history.best_validation_loss = best_val;
    result.model = std::move(best);
  } else {
    result.model = std::move(model);
  }
  return result;
}

std::map<NodeId, int> predict_from(const ForwardPass& fwd, std::span<const NodeId> nodes) {
  std::map<NodeId, int> out;
  for (const NodeId node : nodes) {
    if (node < 0 || node >= fwd.probs.rows()) {
      throw DataError("node " + std::to_string(node) + " outside graph");
    }
    int best = 0;
    for (int c = 1; c < fwd.probs.cols(); ++c) {
      if (fwd.probs(node, c) > fwd.probs(node, best)) best = c;
    }
    out.emplace(node, best);
  }
  return out;
}

std::map<NodeId, int> predict(const GcnModel& model, const NormalizedAdjacency& adj,
                              const FeatureMatrix& h0, std::span<const NodeId> nodes) {
  return predict_from(forward(model, adj, h0), nodes);
}

void write_checkpoint(const std::filesystem::path& path, const GcnModel& model) {
  std::string bytes;
  bytes += "GBMD";
  append_u32(bytes, static_cast<std::uint32_t>(model.input_dim()));
  append_u32(bytes, static_cast<std::uint32_t>(model.hidden_dim()));
  append_u32(bytes, static_cast<std::uint32_t>(model.class_count()));
  auto dump_matrix = [&bytes](const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        append_f32(bytes, static_cast<float>(m(r, c)));
      }
    }
  };
  auto dump_vector = [&bytes](const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) append_f32(bytes, static_cast<float>(v(i)));
  };
  dump_matrix(model.w1);
  dump_vector(model.b1);
  dump_matrix(model.w2);
  dump_vector(model.b2);
  atomic_write_file(path, bytes);
}

GcnModel read_checkpoint(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() < 16 || bytes.compare(0, 4, "GBMD") != 0) {
    throw DataError("'" + path.string() + "' is not a model checkpoint");
  }
  const int d = static_cast<int>(read_u32(bytes, 4));
  const int h = static_cast<int>(read_u32(bytes, 8));
  const int k = static_cast<int>(read_u32(bytes, 12));
  const std::size_t param_count = static_cast<std::size_t>(d) * h + h +
                                  static_cast<std::size_t>(h) * k + k;
  if (bytes.size() != 16 + param_count * 4) {
    throw DataError("'" + path.string() + "' has unexpected size");
  }

  GcnModel model;
  model.w1.resize(d, h);
  model.b1.resize(h);
  model.w2.resize(h, k);
  model.b2.resize(k);
  std::size_t offset = 16;
  auto load_matrix = [&](Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        m(r, c) = static_cast<double>(read_f32(bytes, offset));
        offset += 4;
      }
    }
  };
  auto load_vector = [&](Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      v(i) = static_cast<double>(read_f32(bytes, offset));
      offset += 4;
    }
  };
  load_matrix(model.w1);
  load_vector(model.b1);
  load_matrix(model.w2);
  load_vector(model.b2);
  return model;
}

std::string history_to_csv(const TrainHistory& history) {
  std::string csv = "iteration,train_loss,val_loss\n";
  char buf[96];
  for (std::size_t i = 0; i < history.train_loss.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g\n", i + 1, history.train_loss[i],
                  history.validation_loss[i]);
    csv += buf;
  }
  return csv;
}

}  // namespace gcnboost
