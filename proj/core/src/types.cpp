#include "gcnboost/types.hpp"

#include "gcnboost/errors.hpp"

namespace gcnboost {

const char* to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
  }
  return "?";
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "validation") return Split::validation;
  if (s == "test") return Split::test;
  throw DataError("unknown split '" + s + "'");
}

const char* to_string(StrategyTag tag) {
  switch (tag) {
    case StrategyTag::S0: return "S0";
    case StrategyTag::S1: return "S1";
    case StrategyTag::S2: return "S2";
    case StrategyTag::S3: return "S3";
    case StrategyTag::Sall: return "Sall";
  }
  return "?";
}

const char* to_string(PseudoSource source) {
  switch (source) {
    case PseudoSource::random: return "random";
    case PseudoSource::baseline_model: return "baseline_model";
    case PseudoSource::ingested_file: return "ingested_file";
  }
  return "?";
}

Strategy make_strategy(StrategyTag tag, std::vector<CategoryId> categories,
                       std::size_t total_categories) {
  const std::size_t n = categories.size();
  bool ok = false;
  switch (tag) {
    case StrategyTag::S0:
    case StrategyTag::Sall:
      ok = n == total_categories;
      break;
    case StrategyTag::S1: ok = n == 1; break;
    case StrategyTag::S2: ok = n == 2; break;
    case StrategyTag::S3: ok = n == 3; break;
  }
  if (!ok) {
    throw ConfigError(std::string("strategy ") + to_string(tag) + " requires " +
                      (tag == StrategyTag::S0 || tag == StrategyTag::Sall
                           ? "all categories"
                           : "a category subset of matching size") +
                      ", got " + std::to_string(n));
  }
  return Strategy{tag, std::move(categories)};
}

}  // namespace gcnboost
