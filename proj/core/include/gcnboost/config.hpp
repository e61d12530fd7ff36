#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gcnboost/pipeline.hpp"
#include "gcnboost/synthetic.hpp"

namespace gcnboost {

// Flat key=value lines, '#' comments; throws ConfigError on malformed lines.
std::map<std::string, std::string> parse_key_values(const std::string& text);

// Resolved run configuration. Unknown keys are rejected rather than ignored,
// so typos fail loudly.
struct RunConfig {
  std::string dataset;
  std::string out;
  std::uint64_t seed = 1;
  std::string strategy = "Sall";
  std::string pseudo_source = "baseline";
  int refresh_every = 0;
  std::string filter_category;
  int filter_min_degree = 5;
  std::string tasks;  // comma-separated category names, empty = all

  std::string init_scheme = "n2v_random";
  std::uint64_t init_seed = 0;
  double n2v_p = 1.0;
  double n2v_q = 1.0;
  int n2v_walk_length = 40;
  int n2v_walks_per_node = 10;
  int sg_dim = 128;
  int sg_window = 5;
  int sg_negatives = 5;
  int sg_epochs = 5;
  double sg_lr = 0.025;
  int gcn_hidden = 16;
  double train_learning_rate = 0.001;
  int train_max_iterations = 2000;
  int train_patience = 100;
  double train_adam_beta1 = 0.9;
  double train_adam_beta2 = 0.999;
  double train_adam_epsilon = 1e-8;
  bool train_full_batch = true;  // the only supported mode
  int baseline_iterations = 300;
  double baseline_learning_rate = 0.5;
  std::string ablate_pairs;    // e.g. "School+Type,Author+TimeFrame"
  std::string ablate_triples;

  void set(const std::string& key, const std::string& value);  // throws ConfigError
  void apply(const std::map<std::string, std::string>& entries);

  // Canonical sorted key=value dump of the resolved configuration; the
  // fingerprint hashes it so report rows from different configs never merge
  // silently.
  std::string canonical() const;
  std::string fingerprint() const;

  PipelineConfig to_pipeline() const;
};

RunConfig run_config_from_text(const std::string& text);
RunConfig run_config_from_file(const std::filesystem::path& path);

Strategy resolve_strategy(const std::string& spec,
                          const std::vector<std::string>& categories);
PseudoSource parse_pseudo_source(const std::string& value);

// "A+B,C+D" against the category table.
std::vector<std::vector<CategoryId>> parse_category_subsets(
    const std::string& spec, const std::vector<std::string>& categories);

// Generator spec files use the same key=value format; a `preset` key loads a
// named preset first and the remaining keys override it.
SyntheticSpec parse_synthetic_spec(const std::string& text);
SyntheticSpec synthetic_spec_from_file(const std::filesystem::path& path);

}  // namespace gcnboost
