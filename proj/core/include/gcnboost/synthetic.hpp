#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gcnboost/dataset.hpp"
#include "gcnboost/gcn.hpp"

namespace gcnboost {

enum class SizeDist { uniform, zipf };

struct CategorySpec {
  std::string name;
  int classes = 2;
  SizeDist dist = SizeDist::uniform;
  double zipf_exponent = 1.5;
};

struct CorrelationRule {
  std::string from;
  std::string to;
  // Fraction of artworks whose `to` label is overwritten by a deterministic
  // function of their `from` label.
  double coverage = 1.0;
};

struct SyntheticSpec {
  int train_count = 300;
  int validation_count = 75;
  int test_count = 75;
  std::vector<CategorySpec> categories;
  std::vector<CorrelationRule> rules;
  int feature_dim = 64;
  double separation = 6.0;   // minimum distance between class centers
  double noise_scale = 1.0;  // isotropic Gaussian noise around the centers
  std::map<std::string, double> pseudo_corruption;  // per category, default 0
  std::uint64_t seed = 1;

  // Throws ConfigError naming the offending spec key.
  void validate() const;
};

SyntheticSpec easy_preset();
SyntheticSpec correlated_preset();
SyntheticSpec longtail_preset();
std::optional<SyntheticSpec> preset_by_name(const std::string& name);

// Fully seeded: identical spec yields a bit-identical dataset. Artwork
// features are class-conditioned Gaussians (one center per category/class,
// summed across categories); correlation rules rewrite covered labels and
// emit one label-link edge per observed source value; pseudo labels are the
// test ground truth flipped to a uniformly random wrong class at the
// category's corruption rate.
Dataset generate_synthetic(const SyntheticSpec& spec);
Dataset generate_synthetic(SyntheticSpec spec, std::uint64_t seed);

// Independent majority-vote baseline. Label nodes relay the class counts of
// their currently assigned artwork neighbors; each unassigned artwork adopts
// the plurality class of the relayed votes, ties to the lowest class index,
// iterated synchronously to a fixpoint or max_rounds. Artworks that never
// receive a vote default to class 0.
std::map<NodeId, int> oracle_label_propagation(const ExtendedKG& ekg,
                                               const TaskLabels& task, int max_rounds);

}  // namespace gcnboost
