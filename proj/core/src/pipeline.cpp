#include "gcnboost/pipeline.hpp"

#include <algorithm>
#include <future>
#include <limits>
#include <mutex>
#include <numeric>

#include <json.hpp>

#include "gcnboost/adjacency.hpp"
#include "gcnboost/errors.hpp"
#include "gcnboost/io.hpp"
#include "gcnboost/rng.hpp"

namespace gcnboost {

BaselineResult baseline_pseudo_labeler(const Eigen::MatrixXf& train_features,
                                       const std::vector<int>& train_classes,
                                       int num_classes,
                                       const Eigen::MatrixXf& test_features,
                                       int iterations, double learning_rate,
                                       std::uint64_t seed) {
  if (num_classes < 1) throw ConfigError("baseline needs at least one class");
  if (train_features.rows() == 0) throw DataError("baseline needs training rows");
  if (static_cast<std::size_t>(train_features.rows()) != train_classes.size()) {
    throw DataError("baseline feature/label row mismatch");
  }
  if (test_features.cols() != train_features.cols()) {
    throw DataError("baseline train/test feature width mismatch");
  }

  const Eigen::Index n = train_features.rows();
  const Eigen::Index f = train_features.cols();

  // Standardize with train statistics; a zero-variance column stays centered.
  Eigen::VectorXd mean = train_features.cast<double>().colwise().mean();
  Eigen::VectorXd stddev(f);
  for (Eigen::Index c = 0; c < f; ++c) {
    const double var =
        (train_features.col(c).cast<double>().array() - mean(c)).square().sum() /
        static_cast<double>(n);
    stddev(c) = std::max(std::sqrt(var), 1e-8);
  }
  auto standardize = [&](const Eigen::MatrixXf& rows) {
    Eigen::MatrixXd out = rows.cast<double>();
    out.rowwise() -= mean.transpose();
    out.array().rowwise() /= stddev.transpose().array();
    return out;
  };
  const Eigen::MatrixXd xs = standardize(train_features);

  Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(n, num_classes);
  std::vector<char> present(static_cast<std::size_t>(num_classes), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int cls = train_classes[static_cast<std::size_t>(i)];
    if (cls < 0 || cls >= num_classes) throw DataError("baseline class index out of range");
    onehot(i, cls) = 1.0;
    present[static_cast<std::size_t>(cls)] = 1;
  }

  Rng rng(mix_seed(seed, "baseline_init"));
  Eigen::MatrixXd w(f, num_classes);
  for (Eigen::Index r = 0; r < f; ++r) {
    for (int c = 0; c < num_classes; ++c) w(r, c) = rng.uniform(-1e-3, 1e-3);
  }
  Eigen::RowVectorXd b = Eigen::RowVectorXd::Zero(num_classes);

  Eigen::MatrixXd probs(n, num_classes);
  for (int it = 0; it < iterations; ++it) {
    Eigen::MatrixXd logits = xs * w;
    logits.rowwise() += b;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::RowVectorXd e =
          (logits.row(i).array() - logits.row(i).maxCoeff()).exp();
      probs.row(i) = e / e.sum();
    }
    const Eigen::MatrixXd g = (probs - onehot) / static_cast<double>(n);
    w -= learning_rate * (xs.transpose() * g);
    b -= learning_rate * g.colwise().sum();
  }

  BaselineResult result;
  for (int cls = 0; cls < num_classes; ++cls) {
    if (!present[static_cast<std::size_t>(cls)]) result.absent_classes.push_back(cls);
  }
  const Eigen::MatrixXd test_logits =
      (standardize(test_features) * w).rowwise() + b;
  result.predictions.reserve(static_cast<std::size_t>(test_features.rows()));
  for (Eigen::Index i = 0; i < test_features.rows(); ++i) {
    int best = 0;
    for (int c = 1; c < num_classes; ++c) {
      if (test_logits(i, c) > test_logits(i, best)) best = c;
    }
    result.predictions.push_back(best);
  }
  return result;
}

PseudoLabelAssignment random_pseudo_labels(
    const std::vector<std::int64_t>& test_ids, const Strategy& strategy,
    const std::vector<std::vector<std::string>>& values_by_category,
    std::uint64_t seed) {
  PseudoLabelAssignment out;
  out.strategy = strategy;
  out.source = PseudoSource::random;
  for (const CategoryId cat : strategy.categories) {
    const auto& values = values_by_category.at(static_cast<std::size_t>(cat));
    if (values.empty()) {
      throw DataError("category " + std::to_string(cat) + " has no observed label values");
    }
    for (const std::int64_t id : test_ids) {
      Rng rng(mix_seed(seed, "random_label", static_cast<std::uint64_t>(id),
                       static_cast<std::uint64_t>(cat)));
      out.per_node[id][cat] =
          values[static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(values.size())))];
    }
  }
  return out;
}

namespace {

std::vector<std::int64_t> test_external_ids(const Dataset& ds) {
  std::vector<std::int64_t> ids;
  for (const ArtworkInput& a : ds.artworks) {
    if (a.split == Split::test) ids.push_back(a.external_id);
  }
  return ids;
}

}  // namespace

PseudoLabelAssignment make_pseudo_labels(const Dataset& ds, const Strategy& strategy,
                                         PseudoSource source, const PipelineConfig& cfg,
                                         std::vector<std::string>* warnings) {
  const std::vector<std::int64_t> test_ids = test_external_ids(ds);

  if (source == PseudoSource::random) {
    std::vector<std::vector<std::string>> values;
    values.reserve(ds.categories.size());
    for (const std::string& name : ds.categories) values.push_back(ds.observed_values(name));
    return random_pseudo_labels(test_ids, strategy, values, mix_seed(cfg.seed, "pseudo"));
  }

  PseudoLabelAssignment out;
  out.strategy = strategy;
  out.source = source;

  if (source == PseudoSource::ingested_file) {
    for (const std::int64_t id : test_ids) {
      for (const CategoryId cat : strategy.categories) {
        const std::string& name = ds.categories.at(static_cast<std::size_t>(cat));
        auto node = ds.ingested_pseudo.find(id);
        if (node == ds.ingested_pseudo.end() || node->second.count(name) == 0) {
          throw DataError("ingested pseudo labels missing node " + std::to_string(id) +
                          ", category '" + name + "'");
        }
        out.per_node[id][cat] = node->second.at(name);
      }
    }
    return out;
  }

  // baseline_model: one softmax regression per strategy category, trained on
  // the train split's raw features.
  for (const CategoryId cat : strategy.categories) {
    const std::string& name = ds.categories.at(static_cast<std::size_t>(cat));
    const std::vector<std::string> values = ds.observed_values(name);
    if (values.empty()) throw DataError("category '" + name + "' has no observed label values");
    std::map<std::string, int> class_of;
    for (std::size_t i = 0; i < values.size(); ++i) class_of[values[i]] = static_cast<int>(i);

    std::map<std::int64_t, int> train_class;
    for (const AssignmentInput& a : ds.assignments) {
      if (a.category == name) {
        auto cls = class_of.find(a.value);
        if (cls != class_of.end()) train_class[a.artwork_external_id] = cls->second;
      }
    }

    std::vector<Eigen::Index> train_rows;
    std::vector<int> train_classes;
    std::vector<Eigen::Index> test_rows;
    for (const ArtworkInput& a : ds.artworks) {
      if (a.feature_ref < 0) {
        if (a.split == Split::test || a.split == Split::train) {
          throw DataError("artwork " + std::to_string(a.external_id) +
                          " has no feature row for the baseline classifier");
        }
        continue;
      }
      if (a.split == Split::train) {
        auto cls = train_class.find(a.external_id);
        if (cls == train_class.end()) continue;
        train_rows.push_back(a.feature_ref);
        train_classes.push_back(cls->second);
      } else if (a.split == Split::test) {
        test_rows.push_back(a.feature_ref);
      }
    }

    Eigen::MatrixXf train_x(static_cast<Eigen::Index>(train_rows.size()), ds.features.cols());
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
      train_x.row(static_cast<Eigen::Index>(i)) = ds.features.row(train_rows[i]);
    }
    Eigen::MatrixXf test_x(static_cast<Eigen::Index>(test_rows.size()), ds.features.cols());
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      test_x.row(static_cast<Eigen::Index>(i)) = ds.features.row(test_rows[i]);
    }

    const BaselineResult br = baseline_pseudo_labeler(
        train_x, train_classes, static_cast<int>(values.size()), test_x,
        cfg.baseline_iterations, cfg.baseline_learning_rate,
        mix_seed(cfg.seed, "baseline", static_cast<std::uint64_t>(cat)));

    if (!br.absent_classes.empty() && warnings != nullptr) {
      std::string w = "baseline for '" + name + "' can never predict:";
      for (const int cls : br.absent_classes) w += " " + values[static_cast<std::size_t>(cls)];
      warnings->push_back(std::move(w));
    }
    for (std::size_t i = 0; i < test_ids.size(); ++i) {
      out.per_node[test_ids[i]][cat] =
          values[static_cast<std::size_t>(br.predictions[i])];
    }
  }
  return out;
}

TaskLabels make_task(const ExtendedKG& ekg, const Dataset& dataset, CategoryId category,
                     const std::vector<std::string>& class_values) {
  TaskLabels task;
  task.category = category;
  task.num_classes = static_cast<int>(class_values.size());
  std::map<std::string, int> class_of;
  for (std::size_t i = 0; i < class_values.size(); ++i) {
    class_of[class_values[i]] = static_cast<int>(i);
  }
  const std::string& name = dataset.categories.at(static_cast<std::size_t>(category));

  for (const ArtworkNode& art : ekg.base.artworks) {
    const auto label = ekg.base.assigned_label(art.id, category);
    if (!label) continue;
    const auto cls = class_of.find(ekg.base.label_at(*label).value);
    if (cls == class_of.end()) continue;
    task.targets[art.id] = cls->second;
    (art.split == Split::train ? task.train_mask : task.validation_mask).push_back(art.id);
  }
  for (const ArtworkNode& test : ekg.test_artworks) {
    const auto node = dataset.truth.find(test.external_id);
    if (node == dataset.truth.end()) continue;
    const auto value = node->second.find(name);
    if (value == node->second.end()) continue;
    const auto cls = class_of.find(value->second);
    if (cls != class_of.end()) task.targets[test.id] = cls->second;
  }
  return task;
}

Metrics evaluate(
    const Dataset& dataset,
    const std::map<CategoryId, std::map<std::int64_t, std::string>>& predictions,
    const std::map<CategoryId, std::set<std::int64_t>>& excluded) {
  Metrics metrics;
  static const std::set<std::int64_t> kNone;
  for (const auto& [cat, preds] : predictions) {
    const std::string& name = dataset.categories.at(static_cast<std::size_t>(cat));
    const auto excl_it = excluded.find(cat);
    const std::set<std::int64_t>& excl = excl_it == excluded.end() ? kNone : excl_it->second;
    const std::vector<std::string> observed = dataset.observed_values(name);
    const std::set<std::string> observed_set(observed.begin(), observed.end());

    Metrics::Entry entry;
    int unseen = 0;
    for (const ArtworkInput& art : dataset.artworks) {
      if (art.split != Split::test || excl.count(art.external_id) > 0) continue;
      const auto truth_node = dataset.truth.find(art.external_id);
      if (truth_node == dataset.truth.end() ||
          truth_node->second.count(name) == 0) {
        metrics.warnings.push_back("category '" + name + "': no ground truth for node " +
                                   std::to_string(art.external_id) + ", skipped");
        continue;
      }
      const std::string& truth = truth_node->second.at(name);
      const auto pred = preds.find(art.external_id);
      if (pred == preds.end()) {
        throw DataError("category '" + name + "': missing prediction for node " +
                        std::to_string(art.external_id));
      }
      ++entry.evaluated;
      if (pred->second == truth) ++entry.correct;
      if (observed_set.count(truth) == 0) ++unseen;
    }
    if (entry.evaluated > 0) {
      entry.accuracy = static_cast<double>(entry.correct) / entry.evaluated;
    }
    if (unseen > 0) {
      metrics.warnings.push_back("category '" + name + "': " + std::to_string(unseen) +
                                 " test nodes carry ground-truth values unseen in "
                                 "training (counted as wrong)");
    }
    metrics.per_category.emplace(cat, entry);
  }
  return metrics;
}

std::pair<ExtendedKG, NormalizedAdjacency> refresh_pseudo_labels(
    const ExtendedKG& ekg,
    const std::map<CategoryId, std::map<NodeId, std::string>>& new_values) {
  ExtendedKG out = ekg;
  for (const auto& [cat, values] : new_values) {
    for (auto it = out.pseudo_edges.begin(); it != out.pseudo_edges.end();) {
      it = it->category == cat ? out.pseudo_edges.erase(it) : std::next(it);
    }
    for (const ArtworkNode& test : out.test_artworks) {
      const auto value = values.find(test.id);
      if (value == values.end()) {
        throw DataError("refresh is missing a value for test node " +
                        std::to_string(test.id));
      }
      const auto label = out.find_label(cat, value->second);
      if (!label) {
        throw DataError("refresh value '" + value->second + "' names an unknown label");
      }
      out.pseudo_edges.insert(PseudoEdge{test.id, *label, cat});
    }
  }
  NormalizedAdjacency adj(out);
  return {std::move(out), std::move(adj)};
}

namespace {

struct TaskTrainer {
  TaskLabels task;
  GcnModel model;
  AdamState state;
  TrainHistory history;
  GcnModel best;
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;
  bool has_validation = false;
  bool stopped = false;

  TrainResult finish() {
    TrainResult out;
    if (has_validation) {
      history.best_validation_loss = best_val;
      out.model = std::move(best);
    } else {
      history.best_validation_loss = std::numeric_limits<double>::quiet_NaN();
      out.model = std::move(model);
    }
    out.history = std::move(history);
    return out;
  }
};

// Trains all tasks in lockstep so pseudo edges can be refreshed from the
// current models while every optimizer keeps its state.
void train_with_refresh(RunStrategyResult& result, ExtendedKG& ekg,
                        std::vector<std::optional<TaskTrainer>>& trainers,
                        const Strategy& strategy, const PipelineConfig& cfg) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (auto& trainer : trainers) {
    if (!trainer) continue;
    trainer->model = glorot_init(
        static_cast<int>(result.h0.cols()), cfg.hidden_dim, trainer->task.num_classes,
        mix_seed(cfg.seed, "train", static_cast<std::uint64_t>(trainer->task.category)));
    trainer->state = AdamState::zeros_like(trainer->model);
    trainer->best = trainer->model;
    trainer->has_validation = !trainer->task.validation_mask.empty();
  }

  std::vector<NodeId> test_nodes;
  for (const ArtworkNode& t : ekg.test_artworks) test_nodes.push_back(t.id);

  for (int iteration = 1; iteration <= cfg.training.max_iterations; ++iteration) {
    bool all_stopped = true;
    for (auto& trainer : trainers) {
      if (!trainer || trainer->stopped) continue;
      TaskTrainer& t = *trainer;
      const ForwardPass fwd = forward(t.model, result.adjacency, result.h0);
      const double train_loss = masked_loss(fwd.probs, t.task, t.task.train_mask);
      const double val_loss = t.has_validation
                                  ? masked_loss(fwd.probs, t.task, t.task.validation_mask)
                                  : nan;
      t.history.train_loss.push_back(train_loss);
      t.history.validation_loss.push_back(val_loss);
      t.history.stopped_at = iteration;
      if (!std::isfinite(train_loss) || (t.has_validation && !std::isfinite(val_loss))) {
        throw NumericError("non-finite loss at iteration " + std::to_string(iteration),
                           iteration);
      }
      if (t.has_validation) {
        if (val_loss < t.best_val) {
          t.best_val = val_loss;
          t.best = t.model;
          t.since_best = 0;
        } else {
          ++t.since_best;
        }
        if (t.since_best >= cfg.training.patience) {
          t.stopped = true;
          continue;
        }
      }
      all_stopped = false;
      const Gradients grads =
          backward_from(t.model, result.adjacency, result.h0, fwd, t.task, t.task.train_mask);
      adam_step(t.model, t.state, grads, cfg.training);
    }
    if (all_stopped) break;

    if (iteration % cfg.refresh_every == 0 && iteration < cfg.training.max_iterations) {
      std::map<CategoryId, std::map<NodeId, std::string>> new_values;
      for (const CategoryId cat : strategy.categories) {
        const auto& trainer = trainers[static_cast<std::size_t>(cat)];
        if (!trainer) continue;  // category not trained in this run, keep its edges
        const auto classes =
            predict(trainer->model, result.adjacency, result.h0, test_nodes);
        auto& values = new_values[cat];
        for (const auto& [node, cls] : classes) {
          values[node] =
              result.class_values[static_cast<std::size_t>(cat)][static_cast<std::size_t>(cls)];
        }
      }
      if (!new_values.empty()) {
        auto [refreshed, adj] = refresh_pseudo_labels(ekg, new_values);
        ekg = std::move(refreshed);
        result.adjacency = std::move(adj);
      }
    }
  }
}

std::string join_sorted_names(const std::vector<std::string>& all,
                              const std::vector<CategoryId>& cats) {
  std::vector<std::string> names;
  for (const CategoryId c : cats) names.push_back(all.at(static_cast<std::size_t>(c)));
  std::sort(names.begin(), names.end());
  std::string out;
  for (const std::string& n : names) {
    if (!out.empty()) out += '+';
    out += n;
  }
  return out;
}

}  // namespace

RunStrategyResult run_strategy(const Dataset& dataset, const Strategy& strategy,
                               PseudoSource source, const PipelineConfig& config) {
  const int num_cats = static_cast<int>(dataset.categories.size());
  for (const CategoryId cat : strategy.categories) {
    if (cat < 0 || cat >= num_cats) {
      throw ConfigError("strategy references unknown category id " + std::to_string(cat));
    }
  }

  std::vector<std::string> warnings;
  const PseudoLabelAssignment pseudo =
      make_pseudo_labels(dataset, strategy, source, config, &warnings);

  std::vector<ArtworkInput> base_artworks;
  std::vector<ArtworkInput> test_artworks;
  for (const ArtworkInput& a : dataset.artworks) {
    (a.split == Split::test ? test_artworks : base_artworks).push_back(a);
  }

  ExtendedKG ekg = extend_kg(
      build_kg(dataset.categories, base_artworks, dataset.assignments, dataset.links,
               dataset.label_declarations()),
      test_artworks, pseudo);

  RunStrategyResult result;
  std::optional<CategoryId> filtered_category;
  if (config.degree_filter) {
    const CategoryId cat = dataset.category_id(config.degree_filter->first);
    filtered_category = cat;
    FilterResult fr = filter_low_degree(ekg, cat, config.degree_filter->second);
    result.excluded_values = fr.excluded_values;
    ekg = std::move(fr.ekg);
    const std::string& name = dataset.categories.at(static_cast<std::size_t>(cat));
    for (const ArtworkInput& a : test_artworks) {
      const auto node = dataset.truth.find(a.external_id);
      if (node == dataset.truth.end()) continue;
      const auto value = node->second.find(name);
      if (value != node->second.end() && result.excluded_values.count(value->second) > 0) {
        result.excluded_test[cat].insert(a.external_id);
      }
    }
  }

  result.adjacency = NormalizedAdjacency(ekg);

  WalkParams wp = config.walks;
  wp.seed = mix_seed(config.seed, "walks");
  SkipGramParams sp = config.skipgram;
  sp.seed = mix_seed(config.seed, "skipgram");
  result.embeddings = train_skipgram(node2vec_walks(ekg, wp), sp).embeddings;

  const FeatureSources sources{&result.embeddings, &dataset.features};
  const std::uint64_t init_seed = config.init_seed_override != 0
                                      ? config.init_seed_override
                                      : mix_seed(config.seed, "init");
  result.h0 = assemble_initial_features(ekg, config.scheme, sources, init_seed);

  result.class_values.resize(static_cast<std::size_t>(num_cats));
  for (CategoryId cat = 0; cat < num_cats; ++cat) {
    std::vector<std::string> values =
        dataset.observed_values(dataset.categories[static_cast<std::size_t>(cat)]);
    if (filtered_category && *filtered_category == cat) {
      std::erase_if(values, [&result](const std::string& v) {
        return result.excluded_values.count(v) > 0;
      });
    }
    result.class_values[static_cast<std::size_t>(cat)] = std::move(values);
  }

  std::vector<bool> active(static_cast<std::size_t>(num_cats), config.tasks.empty());
  for (const std::string& name : config.tasks) {
    active[static_cast<std::size_t>(dataset.category_id(name))] = true;
  }

  std::vector<std::optional<TaskTrainer>> trainers(static_cast<std::size_t>(num_cats));
  result.tasks.resize(static_cast<std::size_t>(num_cats));
  for (CategoryId cat = 0; cat < num_cats; ++cat) {
    if (!active[static_cast<std::size_t>(cat)]) continue;
    TaskLabels task =
        make_task(ekg, dataset, cat, result.class_values[static_cast<std::size_t>(cat)]);
    if (task.train_mask.empty()) {
      warnings.push_back("category '" +
                         dataset.categories[static_cast<std::size_t>(cat)] +
                         "' has no training nodes, task skipped");
      continue;
    }
    trainers[static_cast<std::size_t>(cat)].emplace();
    trainers[static_cast<std::size_t>(cat)]->task = std::move(task);
  }

  if (config.refresh_every > 0) {
    train_with_refresh(result, ekg, trainers, strategy, config);
    for (CategoryId cat = 0; cat < num_cats; ++cat) {
      auto& trainer = trainers[static_cast<std::size_t>(cat)];
      if (trainer) result.tasks[static_cast<std::size_t>(cat)] = trainer->finish();
    }
  } else {
    for (CategoryId cat = 0; cat < num_cats; ++cat) {
      auto& trainer = trainers[static_cast<std::size_t>(cat)];
      if (!trainer) continue;
      TrainConfig tc = config.training;
      tc.seed = mix_seed(config.seed, "train", static_cast<std::uint64_t>(cat));
      result.tasks[static_cast<std::size_t>(cat)] =
          train(result.adjacency, result.h0, trainer->task, tc, config.hidden_dim);
    }
  }

  for (CategoryId cat = 0; cat < num_cats; ++cat) {
    const auto& outcome = result.tasks[static_cast<std::size_t>(cat)];
    if (!outcome) continue;
    const auto excl = result.excluded_test.find(cat);
    std::vector<NodeId> nodes;
    for (const ArtworkNode& t : ekg.test_artworks) {
      if (excl != result.excluded_test.end() && excl->second.count(t.external_id) > 0) {
        continue;
      }
      nodes.push_back(t.id);
    }
    const auto classes = predict(outcome->model, result.adjacency, result.h0, nodes);
    auto& preds = result.predictions[cat];
    for (const auto& [node, cls] : classes) {
      preds[ekg.artwork_at(node).external_id] =
          result.class_values[static_cast<std::size_t>(cat)][static_cast<std::size_t>(cls)];
    }
  }

  result.metrics = evaluate(dataset, result.predictions, result.excluded_test);
  result.metrics.warnings.insert(result.metrics.warnings.begin(), warnings.begin(),
                                 warnings.end());
  result.ekg = std::move(ekg);
  return result;
}

AblationReport ablation_suite(const Dataset& dataset, const PipelineConfig& config,
                              std::string config_fingerprint,
                              const std::vector<std::vector<CategoryId>>& pairs,
                              const std::vector<std::vector<CategoryId>>& triples,
                              const RowObserver& observer) {
  const int n = static_cast<int>(dataset.categories.size());
  if (n < 2) throw ConfigError("the ablation grid requires at least two categories");

  std::vector<CategoryId> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);

  struct Item {
    StrategyTag tag;
    std::vector<CategoryId> cats;
    PseudoSource source;
  };
  std::vector<Item> grid;
  grid.push_back({StrategyTag::S0, all, PseudoSource::random});
  for (CategoryId c = 0; c < n; ++c) {
    grid.push_back({StrategyTag::S1, {c}, config.pseudo_source});
  }
  auto add_subsets = [&](StrategyTag tag, const std::vector<std::vector<CategoryId>>& given,
                         int size) {
    if (!given.empty()) {
      for (const auto& cats : given) {
        if (static_cast<int>(cats.size()) != size) {
          throw ConfigError("configured subset size does not match strategy tier");
        }
        grid.push_back({tag, cats, config.pseudo_source});
      }
      return;
    }
    if (n > 4 || n < size) return;  // full enumeration only for small grids
    std::vector<CategoryId> subset;
    auto recurse = [&](auto&& self, CategoryId start) -> void {
      if (static_cast<int>(subset.size()) == size) {
        grid.push_back({tag, subset, config.pseudo_source});
        return;
      }
      for (CategoryId c = start; c < n; ++c) {
        subset.push_back(c);
        self(self, c + 1);
        subset.pop_back();
      }
    };
    recurse(recurse, 0);
  };
  add_subsets(StrategyTag::S2, pairs, 2);
  add_subsets(StrategyTag::S3, triples, 3);
  grid.push_back({StrategyTag::Sall, all, config.pseudo_source});

  AblationReport report;
  report.category_names = dataset.categories;
  report.config_fingerprint = std::move(config_fingerprint);
  report.seed = config.seed;
  report.rows.resize(grid.size());

  std::mutex observer_mutex;
  auto run_row = [&](std::size_t index) {
    const Item& item = grid[index];
    PipelineConfig row_config = config;
    row_config.seed = mix_seed(config.seed, "ablation_row", index);
    const Strategy strategy =
        make_strategy(item.tag, item.cats, static_cast<std::size_t>(n));
    RunStrategyResult run = run_strategy(dataset, strategy, item.source, row_config);
    AblationRow& row = report.rows[index];
    row.strategy = strategy;
    row.source = item.source;
    row.categories_label = join_sorted_names(dataset.categories, item.cats);
    row.seed = row_config.seed;
    row.metrics = run.metrics;
    if (observer) {
      const std::lock_guard<std::mutex> lock(observer_mutex);
      observer(index, row, run);
    }
  };

  const int threads = std::max(1, config.max_threads);
  if (threads == 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) run_row(i);
  } else {
    for (std::size_t begin = 0; begin < grid.size();
         begin += static_cast<std::size_t>(threads)) {
      std::vector<std::future<void>> wave;
      const std::size_t end =
          std::min(grid.size(), begin + static_cast<std::size_t>(threads));
      for (std::size_t i = begin; i < end; ++i) {
        wave.push_back(std::async(std::launch::async, run_row, i));
      }
      for (auto& f : wave) f.get();
    }
  }

  std::set<std::pair<std::string, PseudoSource>> seen;
  for (AblationRow& row : report.rows) {
    row.duplicate_of_earlier = !seen.insert({row.categories_label, row.source}).second;
  }
  return report;
}

std::string report_to_json(const AblationReport& report) {
  nlohmann::json doc;
  doc["seed"] = report.seed;
  doc["config_fingerprint"] = report.config_fingerprint;
  doc["categories"] = report.category_names;
  nlohmann::json rows = nlohmann::json::array();
  for (const AblationRow& row : report.rows) {
    nlohmann::json r;
    r["strategy"] = to_string(row.strategy.tag);
    r["source"] = to_string(row.source);
    r["categories"] = row.categories_label;
    r["duplicate_of_earlier"] = row.duplicate_of_earlier;
    r["seed"] = row.seed;
    nlohmann::json metrics;
    for (const auto& [cat, entry] : row.metrics.per_category) {
      nlohmann::json e;
      if (entry.accuracy) {
        e["accuracy"] = *entry.accuracy;
      } else {
        e["accuracy"] = nullptr;
      }
      e["evaluated"] = entry.evaluated;
      e["correct"] = entry.correct;
      metrics[report.category_names.at(static_cast<std::size_t>(cat))] = e;
    }
    r["metrics"] = metrics;
    r["warnings"] = row.metrics.warnings;
    rows.push_back(r);
  }
  doc["rows"] = rows;
  return doc.dump(2) + "\n";
}

std::string report_to_csv(const AblationReport& report) {
  std::string csv =
      "row,strategy,categories,category,accuracy,evaluated,correct,seed,"
      "config_fingerprint\n";
  char buf[64];
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const AblationRow& row = report.rows[i];
    for (const auto& [cat, entry] : row.metrics.per_category) {
      csv += std::to_string(i) + ',' + to_string(row.strategy.tag) + ',' +
             csv_escape(row.categories_label) + ',' +
             csv_escape(report.category_names.at(static_cast<std::size_t>(cat))) + ',';
      if (entry.accuracy) {
        std::snprintf(buf, sizeof(buf), "%.6f", *entry.accuracy);
        csv += buf;
      }
      csv += ',' + std::to_string(entry.evaluated) + ',' + std::to_string(entry.correct) +
             ',' + std::to_string(row.seed) + ',' + report.config_fingerprint + '\n';
    }
  }
  return csv;
}

}  // namespace gcnboost
