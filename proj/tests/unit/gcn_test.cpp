#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <set>

#include "gcnboost/errors.hpp"
#include "gcnboost/gcn.hpp"
#include "gcnboost/rng.hpp"
#include "support/test_helpers.hpp"

using namespace gcnboost;

namespace {

GcnModel zero_model(int d, int h, int k) {
  GcnModel m;
  m.w1 = Eigen::MatrixXd::Zero(d, h);
  m.b1 = Eigen::VectorXd::Zero(h);
  m.w2 = Eigen::MatrixXd::Zero(h, k);
  m.b2 = Eigen::VectorXd::Zero(k);
  return m;
}

}  // namespace

TEST_CASE("zero weights produce uniform class probabilities") {
  const NormalizedAdjacency adj(3, std::vector<Edge>{{0, 1}, {1, 2}});
  Eigen::MatrixXd h0 = Eigen::MatrixXd::Random(3, 4);
  const ForwardPass fwd = forward(zero_model(4, 2, 5), adj, h0);
  CHECK(fwd.logits.cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 5; ++j) {
      CHECK(fwd.probs(i, j) == doctest::Approx(0.2).epsilon(1e-12));
    }
  }
}

TEST_CASE("identity weights on an isolated node pass the feature row through") {
  const NormalizedAdjacency adj(1, std::vector<Edge>{});
  Eigen::MatrixXd h0(1, 3);
  h0 << 0.3, 0.0, 1.7;
  GcnModel m = zero_model(3, 3, 2);
  m.w1 = Eigen::MatrixXd::Identity(3, 3);
  const ForwardPass fwd = forward(m, adj, h0);
  CHECK((fwd.hidden.row(0) - h0.row(0)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("forward matches a hand-rolled dense oracle on a 3-node path") {
  const NormalizedAdjacency adj(3, std::vector<Edge>{{0, 1}, {1, 2}});
  Rng rng(404);
  Eigen::MatrixXd h0(3, 2);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) h0(i, j) = rng.uniform(-2.0, 2.0);
  }
  GcnModel model = glorot_init(2, 2, 2, 17);
  model.b1 << 0.1, -0.2;
  model.b2 << -0.05, 0.3;

  const ForwardPass got = forward(model, adj, h0);
  const auto expected = testing::dense_forward_oracle(model, testing::dense_from(adj), h0);
  CHECK((got.logits - expected.logits).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((got.probs - expected.probs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("softmax rows sum to one") {
  Rng rng(2222);
  const NormalizedAdjacency adj(6, testing::random_graph_edges(rng, 6, 0.5));
  Eigen::MatrixXd h0 = Eigen::MatrixXd::Random(6, 3);
  const ForwardPass fwd = forward(glorot_init(3, 4, 5, 1), adj, h0);
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(fwd.probs.row(i).sum() - 1.0) < 1e-9);
    CHECK(fwd.probs.row(i).minCoeff() >= 0.0);
  }
}

TEST_CASE("masked loss closed forms") {
  TaskLabels task;
  task.num_classes = 2;
  task.targets = {{0, 0}, {1, 1}};

  Eigen::MatrixXd probs(2, 2);
  probs << 0.5, 0.5, 0.5, 0.5;
  const std::vector<NodeId> one = {0};
  CHECK(masked_loss(probs, task, one) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  probs << 1.0, 0.0, 0.0, 1.0;
  const std::vector<NodeId> both = {0, 1};
  CHECK(masked_loss(probs, task, both) == 0.0);

  probs << 0.5, 0.5, 0.75, 0.25;
  CHECK(masked_loss(probs, task, both) ==
        doctest::Approx(std::log(2.0) + std::log(4.0)).epsilon(1e-12));

  CHECK(masked_loss(probs, task, std::vector<NodeId>{}) == 0.0);

  TaskLabels bad = task;
  bad.targets[0] = 7;
  CHECK_THROWS_AS(masked_loss(probs, bad, one), DataError);
}

TEST_CASE("zero-weight model has the closed-form bias gradient") {
  Rng rng(31);
  const int n = 5;
  const int k = 3;
  const NormalizedAdjacency adj(n, testing::random_graph_edges(rng, n, 0.6));
  Eigen::MatrixXd h0 = Eigen::MatrixXd::Random(n, 2);
  TaskLabels task;
  task.num_classes = k;
  std::vector<NodeId> mask;
  for (int i = 0; i < n; ++i) {
    task.targets[i] = static_cast<int>(rng.uniform_int(k));
    if (i != 2) mask.push_back(i);
  }
  const Gradients grads = backward(zero_model(2, 2, k), adj, h0, task, mask);
  for (int j = 0; j < k; ++j) {
    double expected = 0.0;
    for (const NodeId i : mask) {
      expected += 1.0 / k - (task.targets[i] == j ? 1.0 : 0.0);
    }
    CHECK(grads.b2(j) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("analytic gradients match central finite differences") {
  for (std::uint64_t seed = 1; seed <= 22; ++seed) {
    const auto inst = testing::random_small_instance(1000 + seed);
    const Gradients analytic =
        backward(inst.model, inst.adj, inst.h0, inst.task, inst.task.train_mask);
    const Gradients numeric = testing::finite_difference_gradients(
        inst.model, inst.adj, inst.h0, inst.task, inst.task.train_mask);
    CHECK(testing::max_gradient_relative_error(analytic, numeric) < 1e-4);
  }
}

TEST_CASE("empty mask yields exactly zero gradients") {
  const auto inst = testing::random_small_instance(5);
  const Gradients grads = backward(inst.model, inst.adj, inst.h0, inst.task, {});
  CHECK(grads.w1.cwiseAbs().maxCoeff() == 0.0);
  CHECK(grads.b1.cwiseAbs().maxCoeff() == 0.0);
  CHECK(grads.w2.cwiseAbs().maxCoeff() == 0.0);
  CHECK(grads.b2.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("targets outside the mask never influence loss or gradients") {
  for (std::uint64_t seed = 50; seed < 60; ++seed) {
    auto inst = testing::random_small_instance(seed);
    const ForwardPass fwd = forward(inst.model, inst.adj, inst.h0);
    const double loss_before = masked_loss(fwd.probs, inst.task, inst.task.train_mask);
    const Gradients grads_before =
        backward(inst.model, inst.adj, inst.h0, inst.task, inst.task.train_mask);

    // Perturb every unmasked target.
    std::set<NodeId> masked(inst.task.train_mask.begin(), inst.task.train_mask.end());
    for (auto& [node, target] : inst.task.targets) {
      if (masked.count(node) == 0) target = (target + 1) % inst.task.num_classes;
    }
    const double loss_after =
        masked_loss(forward(inst.model, inst.adj, inst.h0).probs, inst.task,
                    inst.task.train_mask);
    const Gradients grads_after =
        backward(inst.model, inst.adj, inst.h0, inst.task, inst.task.train_mask);

    CHECK(loss_before == loss_after);
    CHECK(grads_before.w1 == grads_after.w1);
    CHECK(grads_before.b1 == grads_after.b1);
    CHECK(grads_before.w2 == grads_after.w2);
    CHECK(grads_before.b2 == grads_after.b2);
  }
}

TEST_CASE("adam first step moves a zero scalar to -lr") {
  GcnModel m = zero_model(1, 1, 1);
  AdamState state = AdamState::zeros_like(m);
  Gradients g;
  g.w1 = Eigen::MatrixXd::Constant(1, 1, 1.0);
  g.b1 = Eigen::VectorXd::Zero(1);
  g.w2 = Eigen::MatrixXd::Zero(1, 1);
  g.b2 = Eigen::VectorXd::Zero(1);
  TrainConfig config;
  adam_step(m, state, g, config);
  CHECK(std::abs(m.w1(0, 0) - (-0.001)) < 1e-9);
  CHECK(state.step == 1);

  SUBCASE("zero gradient with zero moments leaves parameters unchanged") {
    GcnModel fresh = zero_model(1, 1, 1);
    fresh.w1(0, 0) = 0.75;
    AdamState zero_state = AdamState::zeros_like(fresh);
    Gradients zero = g;
    zero.w1.setZero();
    adam_step(fresh, zero_state, zero, config);
    CHECK(fresh.w1(0, 0) == 0.75);
    CHECK(zero_state.step == 1);
  }

  SUBCASE("non-finite gradients are rejected") {
    g.w1(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(adam_step(m, state, g, config), NumericError);
  }
}

TEST_CASE("identical adam runs from the same state coincide") {
  auto run = [] {
    GcnModel m = glorot_init(3, 2, 2, 77);
    AdamState state = AdamState::zeros_like(m);
    TrainConfig config;
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
      Gradients g;
      g.w1 = Eigen::MatrixXd::NullaryExpr(3, 2, [&rng](Eigen::Index, Eigen::Index) {
        return rng.uniform(-1.0, 1.0);
      });
      g.b1 = Eigen::VectorXd::NullaryExpr(2, [&rng](Eigen::Index) { return rng.normal(); });
      g.w2 = Eigen::MatrixXd::NullaryExpr(2, 2, [&rng](Eigen::Index, Eigen::Index) {
        return rng.uniform(-1.0, 1.0);
      });
      g.b2 = Eigen::VectorXd::NullaryExpr(2, [&rng](Eigen::Index) { return rng.normal(); });
      adam_step(m, state, g, config);
    }
    return m;
  };
  const GcnModel a = run();
  const GcnModel b = run();
  CHECK(a.w1 == b.w1);
  CHECK(a.b2 == b.b2);
}

TEST_CASE("training descends on a separable two-class graph") {
  // Two feature clusters, 40 nodes, no edges between clusters.
  const int n = 40;
  Rng rng(808);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if ((i < n / 2) == (j < n / 2) && rng.next_double() < 0.2) edges.push_back({i, j});
    }
  }
  const NormalizedAdjacency adj(n, edges);
  Eigen::MatrixXd h0(n, 4);
  TaskLabels task;
  task.num_classes = 2;
  for (int i = 0; i < n; ++i) {
    const int cls = i < n / 2 ? 0 : 1;
    for (int j = 0; j < 4; ++j) {
      h0(i, j) = (cls == 0 ? 1.0 : -1.0) + 0.3 * rng.normal();
    }
    task.targets[i] = cls;
    task.train_mask.push_back(i);
  }
  TrainConfig config;
  config.learning_rate = 0.01;
  config.max_iterations = 300;
  config.seed = 3;
  const TrainResult result = train(adj, h0, task, config, 8);
  CHECK(result.history.train_loss.back() < 0.1 * result.history.train_loss.front());
  CHECK(result.history.stopped_at == 300);
}

TEST_CASE("patience one with a constant validation loss stops at iteration two") {
  const auto inst = testing::random_small_instance(7, 6, 3, 2, 2);
  TaskLabels task = inst.task;
  // Move one masked node over to validation.
  REQUIRE(task.train_mask.size() >= 1);
  task.validation_mask.push_back(task.train_mask.back());
  task.train_mask.pop_back();
  if (task.train_mask.empty()) task.train_mask.push_back(task.validation_mask.front() == 0 ? 1 : 0);

  TrainConfig config;
  config.learning_rate = 0.0;  // parameters frozen, losses constant
  config.patience = 1;
  config.max_iterations = 50;
  const TrainResult result = train(inst.adj, inst.h0, task, config, 2);
  CHECK(result.history.stopped_at == 2);
  CHECK(result.history.train_loss.size() == 2);
}

TEST_CASE("training twice with one seed gives identical histories and models") {
  const auto inst = testing::random_small_instance(9, 6, 3, 2, 2);
  TaskLabels task = inst.task;
  task.validation_mask.push_back(task.train_mask.back());
  task.train_mask.pop_back();
  if (task.train_mask.empty()) task.train_mask.push_back(task.validation_mask.front() == 0 ? 1 : 0);

  TrainConfig config;
  config.max_iterations = 40;
  config.seed = 21;
  const TrainResult a = train(inst.adj, inst.h0, task, config, 4);
  const TrainResult b = train(inst.adj, inst.h0, task, config, 4);
  CHECK(a.history.train_loss == b.history.train_loss);
  CHECK(a.history.validation_loss == b.history.validation_loss);
  CHECK(a.model.w1 == b.model.w1);
  CHECK(a.model.w2 == b.model.w2);
}

TEST_CASE("predict breaks ties toward the lowest class and ignores row shifts") {
  const NormalizedAdjacency adj(2, std::vector<Edge>{{0, 1}});
  Eigen::MatrixXd h0 = Eigen::MatrixXd::Ones(2, 2);
  const std::vector<NodeId> nodes = {0, 1};

  // Zero model: uniform probabilities everywhere -> class 0.
  const auto uniform = predict(zero_model(2, 2, 4), adj, h0, nodes);
  CHECK(uniform.at(0) == 0);
  CHECK(uniform.at(1) == 0);

  ForwardPass fwd;
  fwd.probs.resize(1, 3);
  fwd.probs << 0.1, 0.7, 0.2;
  CHECK(predict_from(fwd, std::vector<NodeId>{0}).at(0) == 1);

  // Adding a constant to a whole logit row cannot change the argmax.
  const auto inst = testing::random_small_instance(123);
  ForwardPass base = forward(inst.model, inst.adj, inst.h0);
  std::vector<NodeId> all;
  for (NodeId i = 0; i < base.probs.rows(); ++i) all.push_back(i);
  const auto before = predict_from(base, all);
  ForwardPass shifted = base;
  shifted.logits.array() += 3.25;
  for (Eigen::Index i = 0; i < shifted.logits.rows(); ++i) {
    const Eigen::RowVectorXd row =
        (shifted.logits.row(i).array() - shifted.logits.row(i).maxCoeff()).exp();
    shifted.probs.row(i) = row / row.sum();
  }
  CHECK(predict_from(shifted, all) == before);
}

TEST_CASE("checkpoints round-trip through the binary format") {
  const GcnModel model = glorot_init(5, 3, 4, 99);
  const auto path = std::filesystem::temp_directory_path() / "gcnboost_ckpt_test.gbmd";
  write_checkpoint(path, model);
  const GcnModel loaded = read_checkpoint(path);
  CHECK(loaded.input_dim() == 5);
  CHECK(loaded.hidden_dim() == 3);
  CHECK(loaded.class_count() == 4);
  // f32 storage: agreement to float precision.
  CHECK((loaded.w1 - model.w1).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((loaded.b2 - model.b2).cwiseAbs().maxCoeff() < 1e-6);
  std::filesystem::remove(path);
}
