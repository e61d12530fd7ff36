#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace gcnboost {

// Node ids are dense and contiguous within one graph; artwork ids and label
// ids share the same index space and never collide.
using NodeId = std::int32_t;
using CategoryId = std::int32_t;

enum class Split { train, validation, test };

const char* to_string(Split split);
Split split_from_string(const std::string& s);

struct ArtworkNode {
  NodeId id = -1;
  Split split = Split::train;
  // Identifier used in dataset files and reports; internal node ids are
  // allocated independently of it.
  std::int64_t external_id = -1;
  // Row index into the raw feature store, -1 when the artwork has none.
  std::int32_t feature_ref = -1;
};

struct LabelNode {
  NodeId id = -1;
  CategoryId category = -1;
  std::string value;
};

enum class StrategyTag { S0, S1, S2, S3, Sall };

const char* to_string(StrategyTag tag);

// A pseudo-label strategy: which categories receive pseudo edges. S0 and
// Sall span all categories; S1/S2/S3 use exactly 1/2/3.
struct Strategy {
  StrategyTag tag = StrategyTag::Sall;
  std::vector<CategoryId> categories;
};

Strategy make_strategy(StrategyTag tag, std::vector<CategoryId> categories,
                       std::size_t total_categories);

enum class PseudoSource { random, baseline_model, ingested_file };

const char* to_string(PseudoSource source);

// Per-test-node label guesses, keyed by external artwork id, carrying the
// strategy they were produced for.
struct PseudoLabelAssignment {
  Strategy strategy;
  PseudoSource source = PseudoSource::random;
  std::map<std::int64_t, std::map<CategoryId, std::string>> per_node;
};

}  // namespace gcnboost
