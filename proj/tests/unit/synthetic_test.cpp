#include <doctest.h>

#include <algorithm>
#include <map>

#include "gcnboost/errors.hpp"
#include "gcnboost/synthetic.hpp"

using namespace gcnboost;

TEST_CASE("generation is bit-identical for one spec and seed") {
  const SyntheticSpec spec = correlated_preset();
  const Dataset a = generate_synthetic(spec, 5);
  const Dataset b = generate_synthetic(spec, 5);
  CHECK(a.features == b.features);
  CHECK(a.truth == b.truth);
  CHECK(a.ingested_pseudo == b.ingested_pseudo);
  REQUIRE(a.assignments.size() == b.assignments.size());
  for (std::size_t i = 0; i < a.assignments.size(); ++i) {
    CHECK(a.assignments[i].value == b.assignments[i].value);
  }
  const Dataset c = generate_synthetic(spec, 6);
  CHECK(a.features != c.features);
}

TEST_CASE("zipf sizes are top-heavy and rank-monotone") {
  SyntheticSpec spec = longtail_preset();
  spec.train_count = 350;
  spec.validation_count = 75;
  spec.test_count = 75;
  const Dataset ds = generate_synthetic(spec, 9);

  std::map<std::string, int> counts;
  for (const AssignmentInput& a : ds.assignments) {
    if (a.category == "Author") ++counts[a.value];
  }
  // value names are Author_<rank>; expected sizes decrease with rank.
  std::vector<int> by_rank(50, 0);
  for (const auto& [value, count] : counts) {
    by_rank[static_cast<std::size_t>(std::stoi(value.substr(7)))] = count;
  }
  std::vector<int> sorted_desc = by_rank;
  std::sort(sorted_desc.begin(), sorted_desc.end(), std::greater<>());
  const int largest = sorted_desc.front();
  const int median = sorted_desc[sorted_desc.size() / 2];
  CHECK(largest >= 10 * std::max(1, median));

  // Empirical rank plot: monotone apart from sampling noise; check the
  // smoothed prefix maximum never grows after rank 0.
  for (std::size_t r = 1; r < 10; ++r) {
    CHECK(by_rank[r] <= by_rank[0]);
  }
}

TEST_CASE("corruption zero makes ingested pseudo labels equal the truth") {
  SyntheticSpec spec = easy_preset();
  for (auto& [name, rate] : spec.pseudo_corruption) rate = 0.0;
  const Dataset ds = generate_synthetic(spec, 3);
  CHECK(ds.ingested_pseudo == ds.truth);
}

TEST_CASE("coverage-1 rules make the target a function of the source") {
  const Dataset ds = generate_synthetic(correlated_preset(), 12);

  std::map<std::int64_t, std::string> author;
  std::map<std::int64_t, std::string> school;
  for (const AssignmentInput& a : ds.assignments) {
    if (a.category == "Author") author[a.artwork_external_id] = a.value;
    if (a.category == "School") school[a.artwork_external_id] = a.value;
  }
  std::map<std::string, std::string> mapping;
  for (const auto& [id, value] : author) {
    const auto [it, inserted] = mapping.emplace(value, school.at(id));
    if (!inserted) CHECK(it->second == school.at(id));
  }
  // Test truth follows the same function.
  for (const auto& [id, by_cat] : ds.truth) {
    const auto mapped = mapping.find(by_cat.at("Author"));
    if (mapped != mapping.end()) CHECK(by_cat.at("School") == mapped->second);
  }

  // One link per observed author value, each pointing at its mapped school.
  std::map<std::string, std::string> links;
  for (const LabelLinkInput& link : ds.links) {
    if (link.value_a.rfind("Author_", 0) == 0) {
      CHECK(links.emplace(link.value_a, link.value_b).second);
    }
  }
  for (const auto& [value, target] : links) {
    CHECK(mapping.at(value) == target);
  }
  CHECK(links.size() == mapping.size());
}

TEST_CASE("spec validation names the offending key") {
  SyntheticSpec spec = easy_preset();
  spec.pseudo_corruption["Type"] = 1.5;
  CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("pseudo_corruption.Type"),
                       ConfigError);

  SyntheticSpec bad_rule = correlated_preset();
  bad_rule.rules.push_back({"Author", "Type", 1.0});  // Type has fewer classes
  CHECK_THROWS_WITH_AS(bad_rule.validate(), doctest::Contains("rule.2"), ConfigError);

  SyntheticSpec bad_classes = easy_preset();
  bad_classes.categories[1].classes = 1;
  CHECK_THROWS_WITH_AS(bad_classes.validate(), doctest::Contains("category.1.classes"),
                       ConfigError);

  SyntheticSpec bad_sep = easy_preset();
  bad_sep.separation = 0.0;
  CHECK_THROWS_WITH_AS(bad_sep.validate(), doctest::Contains("feature.separation"),
                       ConfigError);
}

TEST_CASE("presets resolve by name") {
  CHECK(preset_by_name("easy").has_value());
  CHECK(preset_by_name("correlated").has_value());
  CHECK(preset_by_name("longtail").has_value());
  CHECK_FALSE(preset_by_name("nope").has_value());
}
