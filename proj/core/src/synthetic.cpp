#include "gcnboost/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "gcnboost/errors.hpp"
#include "gcnboost/rng.hpp"

namespace gcnboost {

void SyntheticSpec::validate() const {
  if (train_count < 0) throw ConfigError("split.train: must be >= 0");
  if (validation_count < 0) throw ConfigError("split.validation: must be >= 0");
  if (test_count < 0) throw ConfigError("split.test: must be >= 0");
  if (categories.empty()) throw ConfigError("category.0.name: at least one category required");
  std::set<std::string> names;
  for (std::size_t i = 0; i < categories.size(); ++i) {
    const CategorySpec& cat = categories[i];
    const std::string key = "category." + std::to_string(i);
    if (cat.name.empty()) throw ConfigError(key + ".name: must not be empty");
    if (!names.insert(cat.name).second) {
      throw ConfigError(key + ".name: duplicate category '" + cat.name + "'");
    }
    if (cat.classes < 2) throw ConfigError(key + ".classes: must be >= 2");
    if (cat.dist == SizeDist::zipf && cat.zipf_exponent <= 0.0) {
      throw ConfigError(key + ".dist: zipf exponent must be > 0");
    }
  }
  if (feature_dim < 1) throw ConfigError("feature.dim: must be >= 1");
  if (separation <= 0.0) throw ConfigError("feature.separation: must be > 0");
  if (noise_scale < 0.0) throw ConfigError("feature.noise: must be >= 0");

  auto class_count = [this](const std::string& name) -> int {
    for (const CategorySpec& cat : categories) {
      if (cat.name == name) return cat.classes;
    }
    return -1;
  };
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const CorrelationRule& rule = rules[i];
    const std::string key = "rule." + std::to_string(i);
    const int from = class_count(rule.from);
    const int to = class_count(rule.to);
    if (from < 0) throw ConfigError(key + ": unknown category '" + rule.from + "'");
    if (to < 0) throw ConfigError(key + ": unknown category '" + rule.to + "'");
    if (rule.from == rule.to) throw ConfigError(key + ": source and target must differ");
    if (rule.coverage < 0.0 || rule.coverage > 1.0) {
      throw ConfigError(key + ": coverage must be in [0, 1]");
    }
    if (rule.coverage == 1.0 && to < from) {
      throw ConfigError(key + ": target class count " + std::to_string(to) +
                        " cannot host all " + std::to_string(from) +
                        " source classes at coverage 1");
    }
  }
  for (const auto& [name, rate] : pseudo_corruption) {
    if (class_count(name) < 0) {
      throw ConfigError("pseudo_corruption." + name + ": unknown category");
    }
    if (rate < 0.0 || rate > 1.0) {
      throw ConfigError("pseudo_corruption." + name + ": rate must be in [0, 1]");
    }
  }
}

namespace {

std::string value_name(const CategorySpec& cat, int cls) {
  return cat.name + "_" + std::to_string(cls);
}

std::vector<double> class_cdf(const CategorySpec& cat) {
  std::vector<double> cdf(static_cast<std::size_t>(cat.classes));
  double total = 0.0;
  for (int c = 0; c < cat.classes; ++c) {
    const double mass = cat.dist == SizeDist::uniform
                            ? 1.0
                            : 1.0 / std::pow(static_cast<double>(c + 1), cat.zipf_exponent);
    total += mass;
    cdf[static_cast<std::size_t>(c)] = total;
  }
  for (double& v : cdf) v /= total;
  return cdf;
}

int draw_from_cdf(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.next_double();
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(),
                                                   static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

}  // namespace

Dataset generate_synthetic(SyntheticSpec spec, std::uint64_t seed) {
  spec.seed = seed;
  return generate_synthetic(spec);
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const std::uint64_t seed = spec.seed;
  const int total = spec.train_count + spec.validation_count + spec.test_count;
  const int num_cats = static_cast<int>(spec.categories.size());

  // Per-artwork class per category, then correlation rewrites in rule order.
  std::vector<std::vector<int>> cls(static_cast<std::size_t>(num_cats));
  for (int c = 0; c < num_cats; ++c) {
    const auto cdf = class_cdf(spec.categories[static_cast<std::size_t>(c)]);
    Rng rng(mix_seed(seed, "classes", static_cast<std::uint64_t>(c)));
    auto& column = cls[static_cast<std::size_t>(c)];
    column.resize(static_cast<std::size_t>(total));
    for (int x = 0; x < total; ++x) column[static_cast<std::size_t>(x)] = draw_from_cdf(cdf, rng);
  }

  auto cat_index = [&spec](const std::string& name) -> int {
    for (std::size_t i = 0; i < spec.categories.size(); ++i) {
      if (spec.categories[i].name == name) return static_cast<int>(i);
    }
    return -1;
  };

  std::vector<std::vector<int>> rule_maps;  // class map per rule
  for (std::size_t r = 0; r < spec.rules.size(); ++r) {
    const CorrelationRule& rule = spec.rules[r];
    const int from = cat_index(rule.from);
    const int to = cat_index(rule.to);
    const int k_from = spec.categories[static_cast<std::size_t>(from)].classes;
    const int k_to = spec.categories[static_cast<std::size_t>(to)].classes;

    Rng map_rng(mix_seed(seed, "rule_map", static_cast<std::uint64_t>(r)));
    std::vector<int> map(static_cast<std::size_t>(k_from));
    if (k_to >= k_from) {
      // Distinct target per source class, so linked values stay one-to-one.
      std::vector<int> perm(static_cast<std::size_t>(k_to));
      std::iota(perm.begin(), perm.end(), 0);
      for (int i = k_to - 1; i > 0; --i) {
        std::swap(perm[static_cast<std::size_t>(i)],
                  perm[static_cast<std::size_t>(map_rng.uniform_int(i + 1))]);
      }
      for (int a = 0; a < k_from; ++a) map[static_cast<std::size_t>(a)] = perm[static_cast<std::size_t>(a)];
    } else {
      for (int a = 0; a < k_from; ++a) {
        map[static_cast<std::size_t>(a)] = static_cast<int>(map_rng.uniform_int(k_to));
      }
    }
    rule_maps.push_back(map);

    Rng cov_rng(mix_seed(seed, "rule_coverage", static_cast<std::uint64_t>(r)));
    for (int x = 0; x < total; ++x) {
      if (cov_rng.next_double() < rule.coverage) {
        cls[static_cast<std::size_t>(to)][static_cast<std::size_t>(x)] =
            map[static_cast<std::size_t>(cls[static_cast<std::size_t>(from)][static_cast<std::size_t>(x)])];
      }
    }
  }

  // Class centers: seeded Gaussian draws, rescaled so the minimum pairwise
  // distance within each category meets the separation.
  std::vector<Eigen::MatrixXd> centers;
  for (int c = 0; c < num_cats; ++c) {
    const int k = spec.categories[static_cast<std::size_t>(c)].classes;
    Eigen::MatrixXd m(k, spec.feature_dim);
    Rng rng(mix_seed(seed, "centers", static_cast<std::uint64_t>(c)));
    for (int row = 0; row < k; ++row) {
      for (int col = 0; col < spec.feature_dim; ++col) m(row, col) = rng.normal();
    }
    double min_dist = std::numeric_limits<double>::infinity();
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b) {
        min_dist = std::min(min_dist, (m.row(a) - m.row(b)).norm());
      }
    }
    if (min_dist < spec.separation) m *= spec.separation / min_dist;
    centers.push_back(std::move(m));
  }

  Dataset ds;
  for (const CategorySpec& cat : spec.categories) ds.categories.push_back(cat.name);

  auto split_of = [&spec](int x) {
    if (x < spec.train_count) return Split::train;
    if (x < spec.train_count + spec.validation_count) return Split::validation;
    return Split::test;
  };
  for (int x = 0; x < total; ++x) {
    ds.artworks.push_back(ArtworkInput{x, split_of(x), x});
  }

  ds.features.resize(total, spec.feature_dim);
  for (int x = 0; x < total; ++x) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(spec.feature_dim);
    for (int c = 0; c < num_cats; ++c) {
      row += centers[static_cast<std::size_t>(c)]
                 .row(cls[static_cast<std::size_t>(c)][static_cast<std::size_t>(x)])
                 .transpose();
    }
    Rng rng(mix_seed(seed, "noise", static_cast<std::uint64_t>(x)));
    for (int col = 0; col < spec.feature_dim; ++col) {
      row(col) += spec.noise_scale * rng.normal();
    }
    ds.features.row(x) = row.cast<float>();
  }

  // Label nodes exist for values observed on train/validation artworks only;
  // test-only values stay out of the graph and are counted against coverage
  // at evaluation time.
  const int labeled = spec.train_count + spec.validation_count;
  std::int64_t next_id = total;
  std::set<std::pair<int, int>> observed;  // (category, class)
  for (int c = 0; c < num_cats; ++c) {
    const CategorySpec& cat = spec.categories[static_cast<std::size_t>(c)];
    for (int k = 0; k < cat.classes; ++k) {
      bool seen = false;
      for (int x = 0; x < labeled && !seen; ++x) {
        seen = cls[static_cast<std::size_t>(c)][static_cast<std::size_t>(x)] == k;
      }
      if (seen) {
        ds.label_rows.push_back(DatasetLabelRow{next_id++, cat.name, value_name(cat, k)});
        observed.insert({c, k});
      }
    }
  }

  for (int x = 0; x < labeled; ++x) {
    for (int c = 0; c < num_cats; ++c) {
      const CategorySpec& cat = spec.categories[static_cast<std::size_t>(c)];
      ds.assignments.push_back(AssignmentInput{
          x, cat.name,
          value_name(cat, cls[static_cast<std::size_t>(c)][static_cast<std::size_t>(x)])});
    }
  }

  for (std::size_t r = 0; r < spec.rules.size(); ++r) {
    const CorrelationRule& rule = spec.rules[r];
    const int from = cat_index(rule.from);
    const int to = cat_index(rule.to);
    const CategorySpec& from_cat = spec.categories[static_cast<std::size_t>(from)];
    const CategorySpec& to_cat = spec.categories[static_cast<std::size_t>(to)];
    for (int a = 0; a < from_cat.classes; ++a) {
      const int b = rule_maps[r][static_cast<std::size_t>(a)];
      if (observed.count({from, a}) > 0 && observed.count({to, b}) > 0) {
        ds.links.push_back(LabelLinkInput{value_name(from_cat, a), value_name(to_cat, b)});
      }
    }
  }

  for (int x = labeled; x < total; ++x) {
    for (int c = 0; c < num_cats; ++c) {
      const CategorySpec& cat = spec.categories[static_cast<std::size_t>(c)];
      ds.truth[x][cat.name] =
          value_name(cat, cls[static_cast<std::size_t>(c)][static_cast<std::size_t>(x)]);
    }
  }

  for (int c = 0; c < num_cats; ++c) {
    const CategorySpec& cat = spec.categories[static_cast<std::size_t>(c)];
    double rate = 0.0;
    if (auto it = spec.pseudo_corruption.find(cat.name); it != spec.pseudo_corruption.end()) {
      rate = it->second;
    }
    Rng rng(mix_seed(seed, "corruption", static_cast<std::uint64_t>(c)));
    for (int x = labeled; x < total; ++x) {
      int value = cls[static_cast<std::size_t>(c)][static_cast<std::size_t>(x)];
      if (rng.next_double() < rate) {
        value = static_cast<int>((value + 1 + rng.uniform_int(cat.classes - 1)) % cat.classes);
      }
      ds.ingested_pseudo[x][cat.name] = value_name(cat, value);
    }
  }

  return ds;
}

SyntheticSpec easy_preset() {
  SyntheticSpec spec;
  spec.train_count = 300;
  spec.validation_count = 75;
  spec.test_count = 75;
  spec.categories = {
      {"Type", 6, SizeDist::uniform, 1.5},
      {"School", 8, SizeDist::uniform, 1.5},
      {"TimeFrame", 6, SizeDist::uniform, 1.5},
      {"Author", 10, SizeDist::uniform, 1.5},
  };
  spec.feature_dim = 64;
  spec.separation = 9.0;
  spec.noise_scale = 1.0;
  for (const CategorySpec& cat : spec.categories) spec.pseudo_corruption[cat.name] = 0.1;
  spec.seed = 1;
  return spec;
}

SyntheticSpec correlated_preset() {
  SyntheticSpec spec;
  spec.train_count = 400;
  spec.validation_count = 100;
  spec.test_count = 100;
  spec.categories = {
      {"Type", 6, SizeDist::uniform, 1.5},
      {"School", 8, SizeDist::uniform, 1.5},
      {"TimeFrame", 6, SizeDist::uniform, 1.5},
      {"Author", 8, SizeDist::uniform, 1.5},
  };
  spec.rules = {
      {"Author", "School", 1.0},
      {"Type", "TimeFrame", 0.8},
  };
  spec.feature_dim = 64;
  spec.separation = 5.0;
  spec.noise_scale = 1.0;
  for (const CategorySpec& cat : spec.categories) spec.pseudo_corruption[cat.name] = 0.15;
  spec.seed = 1;
  return spec;
}

SyntheticSpec longtail_preset() {
  SyntheticSpec spec;
  spec.train_count = 350;
  spec.validation_count = 75;
  spec.test_count = 75;
  spec.categories = {
      {"Author", 50, SizeDist::zipf, 1.5},
      {"Type", 6, SizeDist::uniform, 1.5},
  };
  spec.feature_dim = 64;
  spec.separation = 4.0;
  spec.noise_scale = 1.2;
  spec.pseudo_corruption["Author"] = 0.25;
  spec.pseudo_corruption["Type"] = 0.1;
  spec.seed = 1;
  return spec;
}

std::optional<SyntheticSpec> preset_by_name(const std::string& name) {
  if (name == "easy") return easy_preset();
  if (name == "correlated") return correlated_preset();
  if (name == "longtail") return longtail_preset();
  return std::nullopt;
}

std::map<NodeId, int> oracle_label_propagation(const ExtendedKG& ekg,
                                               const TaskLabels& task, int max_rounds) {
  if (task.train_mask.empty()) throw DataError("oracle requires a nonempty train mask");
  const auto adj = adjacency_lists(ekg);
  const NodeId n = ekg.node_count();
  const int k = task.num_classes;

  std::vector<int> assigned(static_cast<std::size_t>(n), -1);
  std::vector<char> fixed(static_cast<std::size_t>(n), 0);
  for (const NodeId node : task.train_mask) {
    assigned[static_cast<std::size_t>(node)] = task.targets.at(node);
    fixed[static_cast<std::size_t>(node)] = 1;
  }

  std::vector<std::vector<long>> transmit(static_cast<std::size_t>(n));
  std::vector<long> votes(static_cast<std::size_t>(k));

  for (int round = 0; round < max_rounds; ++round) {
    for (NodeId node = 0; node < n; ++node) {
      if (!ekg.is_label(node)) continue;
      auto& counts = transmit[static_cast<std::size_t>(node)];
      counts.assign(static_cast<std::size_t>(k), 0);
      for (const NodeId nb : adj[static_cast<std::size_t>(node)]) {
        if (!ekg.is_artwork(nb)) continue;
        const int cls = assigned[static_cast<std::size_t>(nb)];
        if (cls >= 0) ++counts[static_cast<std::size_t>(cls)];
      }
    }

    std::vector<int> next = assigned;
    bool changed = false;
    for (NodeId node = 0; node < n; ++node) {
      if (!ekg.is_artwork(node) || fixed[static_cast<std::size_t>(node)]) continue;
      std::fill(votes.begin(), votes.end(), 0);
      long total = 0;
      for (const NodeId nb : adj[static_cast<std::size_t>(node)]) {
        if (!ekg.is_label(nb)) continue;
        const auto& counts = transmit[static_cast<std::size_t>(nb)];
        for (int c = 0; c < k; ++c) {
          votes[static_cast<std::size_t>(c)] += counts[static_cast<std::size_t>(c)];
          total += counts[static_cast<std::size_t>(c)];
        }
      }
      if (total == 0) continue;
      int winner = 0;
      for (int c = 1; c < k; ++c) {
        if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(winner)]) {
          winner = c;
        }
      }
      if (winner != assigned[static_cast<std::size_t>(node)]) changed = true;
      next[static_cast<std::size_t>(node)] = winner;
    }
    assigned.swap(next);
    if (!changed) break;
  }

  std::map<NodeId, int> out;
  for (NodeId node = 0; node < n; ++node) {
    if (!ekg.is_artwork(node)) continue;
    out.emplace(node, assigned[static_cast<std::size_t>(node)] < 0
                          ? 0
                          : assigned[static_cast<std::size_t>(node)]);
  }
  return out;
}

}  // namespace gcnboost
