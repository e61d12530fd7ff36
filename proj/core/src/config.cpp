#include "gcnboost/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

#include "gcnboost/errors.hpp"
#include "gcnboost/io.hpp"
#include "gcnboost/rng.hpp"

namespace gcnboost {

namespace {

std::string trim(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return std::string(s.substr(begin, end - begin));
}

long long to_int(const std::string& key, const std::string& value) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
  }
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t consumed = 0;
    const double out = std::stod(value, &consumed);
    if (consumed != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_list(const std::string& value, char sep) {
  std::vector<std::string> out;
  std::string current;
  std::istringstream in(value);
  while (std::getline(in, current, sep)) {
    current = trim(current);
    if (!current.empty()) out.push_back(current);
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    const std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_number) +
                        ": expected key = value, got '" + trimmed + "'");
    }
    const std::string key = trim(trimmed.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_number) + ": empty key");
    }
    if (!out.emplace(key, trim(trimmed.substr(eq + 1))).second) {
      throw ConfigError("duplicate key '" + key + "'");
    }
  }
  return out;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto positive_int = [&key, &value](int minimum) {
    const long long v = to_int(key, value);
    if (v < minimum) {
      throw ConfigError(key + ": must be >= " + std::to_string(minimum));
    }
    return static_cast<int>(v);
  };
  auto positive_double = [&key, &value]() {
    const double v = to_double(key, value);
    if (v <= 0.0) throw ConfigError(key + ": must be > 0");
    return v;
  };

  if (key == "dataset") dataset = value;
  else if (key == "out") out = value;
  else if (key == "seed") seed = to_u64(key, value);
  else if (key == "strategy") strategy = value;
  else if (key == "pseudo.source") { parse_pseudo_source(value); pseudo_source = value; }
  else if (key == "refresh.every") refresh_every = positive_int(0);
  else if (key == "filter.category") filter_category = value;
  else if (key == "filter.min_degree") filter_min_degree = positive_int(0);
  else if (key == "tasks") tasks = value;
  else if (key == "init.scheme") { init_scheme_from_string(value); init_scheme = value; }
  else if (key == "init.seed") init_seed = to_u64(key, value);
  else if (key == "n2v.p") n2v_p = positive_double();
  else if (key == "n2v.q") n2v_q = positive_double();
  else if (key == "n2v.walk_length") n2v_walk_length = positive_int(2);
  else if (key == "n2v.walks_per_node") n2v_walks_per_node = positive_int(1);
  else if (key == "sg.dim") sg_dim = positive_int(1);
  else if (key == "sg.window") sg_window = positive_int(1);
  else if (key == "sg.negatives") sg_negatives = positive_int(1);
  else if (key == "sg.epochs") sg_epochs = positive_int(0);
  else if (key == "sg.lr") sg_lr = positive_double();
  else if (key == "gcn.hidden") gcn_hidden = positive_int(1);
  else if (key == "train.learning_rate") train_learning_rate = positive_double();
  else if (key == "train.max_iterations") train_max_iterations = positive_int(1);
  else if (key == "train.patience") train_patience = positive_int(1);
  else if (key == "train.adam_beta1") train_adam_beta1 = to_double(key, value);
  else if (key == "train.adam_beta2") train_adam_beta2 = to_double(key, value);
  else if (key == "train.adam_epsilon") train_adam_epsilon = positive_double();
  else if (key == "train.full_batch") {
    if (!to_bool(key, value)) {
      throw ConfigError(key + ": mini-batch training is not supported");
    }
    train_full_batch = true;
  }
  else if (key == "baseline.iterations") baseline_iterations = positive_int(1);
  else if (key == "baseline.learning_rate") baseline_learning_rate = positive_double();
  else if (key == "ablate.pairs") ablate_pairs = value;
  else if (key == "ablate.triples") ablate_triples = value;
  else throw ConfigError("unknown config key '" + key + "'");
}

void RunConfig::apply(const std::map<std::string, std::string>& entries) {
  for (const auto& [key, value] : entries) set(key, value);
}

// dataset/out are I/O locations, not experiment parameters; they stay out of
// the canonical dump so identical experiments fingerprint identically
// wherever they read and write.
std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["seed"] = std::to_string(seed);
  kv["strategy"] = strategy;
  kv["pseudo.source"] = pseudo_source;
  kv["refresh.every"] = std::to_string(refresh_every);
  kv["filter.category"] = filter_category;
  kv["filter.min_degree"] = std::to_string(filter_min_degree);
  kv["tasks"] = tasks;
  kv["init.scheme"] = init_scheme;
  kv["init.seed"] = std::to_string(init_seed);
  kv["n2v.p"] = format_double(n2v_p);
  kv["n2v.q"] = format_double(n2v_q);
  kv["n2v.walk_length"] = std::to_string(n2v_walk_length);
  kv["n2v.walks_per_node"] = std::to_string(n2v_walks_per_node);
  kv["sg.dim"] = std::to_string(sg_dim);
  kv["sg.window"] = std::to_string(sg_window);
  kv["sg.negatives"] = std::to_string(sg_negatives);
  kv["sg.epochs"] = std::to_string(sg_epochs);
  kv["sg.lr"] = format_double(sg_lr);
  kv["gcn.hidden"] = std::to_string(gcn_hidden);
  kv["train.learning_rate"] = format_double(train_learning_rate);
  kv["train.max_iterations"] = std::to_string(train_max_iterations);
  kv["train.patience"] = std::to_string(train_patience);
  kv["train.adam_beta1"] = format_double(train_adam_beta1);
  kv["train.adam_beta2"] = format_double(train_adam_beta2);
  kv["train.adam_epsilon"] = format_double(train_adam_epsilon);
  kv["train.full_batch"] = train_full_batch ? "true" : "false";
  kv["baseline.iterations"] = std::to_string(baseline_iterations);
  kv["baseline.learning_rate"] = format_double(baseline_learning_rate);
  kv["ablate.pairs"] = ablate_pairs;
  kv["ablate.triples"] = ablate_triples;

  std::string out_text;
  for (const auto& [key, value] : kv) out_text += key + "=" + value + "\n";
  return out_text;
}

std::string RunConfig::fingerprint() const {
  const std::string text = canonical();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

PipelineConfig RunConfig::to_pipeline() const {
  PipelineConfig p;
  p.walks.return_bias_p = n2v_p;
  p.walks.inout_bias_q = n2v_q;
  p.walks.walk_length = n2v_walk_length;
  p.walks.walks_per_node = n2v_walks_per_node;
  p.skipgram.dim = sg_dim;
  p.skipgram.window = sg_window;
  p.skipgram.negatives_per_positive = sg_negatives;
  p.skipgram.epochs = sg_epochs;
  p.skipgram.learning_rate = sg_lr;
  p.training.learning_rate = train_learning_rate;
  p.training.max_iterations = train_max_iterations;
  p.training.patience = train_patience;
  p.training.adam_beta1 = train_adam_beta1;
  p.training.adam_beta2 = train_adam_beta2;
  p.training.adam_epsilon = train_adam_epsilon;
  p.hidden_dim = gcn_hidden;
  p.scheme = init_scheme_from_string(init_scheme);
  p.init_seed_override = init_seed;
  p.pseudo_source = parse_pseudo_source(pseudo_source);
  p.refresh_every = refresh_every;
  if (!filter_category.empty()) {
    p.degree_filter = std::pair{filter_category, filter_min_degree};
  }
  p.tasks = split_list(tasks, ',');
  p.seed = seed;
  p.baseline_iterations = baseline_iterations;
  p.baseline_learning_rate = baseline_learning_rate;
  return p;
}

RunConfig run_config_from_text(const std::string& text) {
  RunConfig config;
  config.apply(parse_key_values(text));
  return config;
}

RunConfig run_config_from_file(const std::filesystem::path& path) {
  return run_config_from_text(read_file(path));
}

PseudoSource parse_pseudo_source(const std::string& value) {
  if (value == "baseline") return PseudoSource::baseline_model;
  if (value == "random") return PseudoSource::random;
  if (value == "ingested") return PseudoSource::ingested_file;
  throw ConfigError("pseudo.source: expected baseline, random, or ingested, got '" +
                    value + "'");
}

Strategy resolve_strategy(const std::string& spec,
                          const std::vector<std::string>& categories) {
  const std::size_t colon = spec.find(':');
  const std::string tag_text = colon == std::string::npos ? spec : spec.substr(0, colon);

  StrategyTag tag;
  if (tag_text == "S0") tag = StrategyTag::S0;
  else if (tag_text == "S1") tag = StrategyTag::S1;
  else if (tag_text == "S2") tag = StrategyTag::S2;
  else if (tag_text == "S3") tag = StrategyTag::S3;
  else if (tag_text == "Sall") tag = StrategyTag::Sall;
  else throw ConfigError("strategy: unknown tag '" + tag_text + "'");

  std::vector<CategoryId> cats;
  if (tag == StrategyTag::S0 || tag == StrategyTag::Sall) {
    if (colon != std::string::npos) {
      throw ConfigError("strategy: " + tag_text + " always spans all categories");
    }
    cats.resize(categories.size());
    for (std::size_t i = 0; i < categories.size(); ++i) cats[i] = static_cast<CategoryId>(i);
  } else {
    if (colon == std::string::npos) {
      throw ConfigError("strategy: " + tag_text + " needs categories, e.g. " + tag_text +
                        ":School,Author");
    }
    std::set<std::string> seen;
    for (const std::string& name : split_list(spec.substr(colon + 1), ',')) {
      if (!seen.insert(name).second) {
        throw ConfigError("strategy: duplicate category '" + name + "'");
      }
      const auto it = std::find(categories.begin(), categories.end(), name);
      if (it == categories.end()) {
        throw ConfigError("strategy: unknown category '" + name + "'");
      }
      cats.push_back(static_cast<CategoryId>(it - categories.begin()));
    }
  }
  return make_strategy(tag, std::move(cats), categories.size());
}

std::vector<std::vector<CategoryId>> parse_category_subsets(
    const std::string& spec, const std::vector<std::string>& categories) {
  std::vector<std::vector<CategoryId>> out;
  for (const std::string& group : split_list(spec, ',')) {
    std::vector<CategoryId> subset;
    for (const std::string& name : split_list(group, '+')) {
      const auto it = std::find(categories.begin(), categories.end(), name);
      if (it == categories.end()) {
        throw ConfigError("ablate subsets: unknown category '" + name + "'");
      }
      subset.push_back(static_cast<CategoryId>(it - categories.begin()));
    }
    if (!subset.empty()) out.push_back(std::move(subset));
  }
  return out;
}

namespace {

CategorySpec& category_slot(SyntheticSpec& spec, std::size_t index,
                            const std::string& key) {
  if (index > spec.categories.size()) {
    throw ConfigError(key + ": category indices must be contiguous");
  }
  if (index == spec.categories.size()) spec.categories.emplace_back();
  return spec.categories[index];
}

void apply_synthetic_key(SyntheticSpec& spec, const std::string& key,
                         const std::string& value) {
  if (key == "seed") { spec.seed = to_u64(key, value); return; }
  if (key == "split.train") { spec.train_count = static_cast<int>(to_int(key, value)); return; }
  if (key == "split.validation") {
    spec.validation_count = static_cast<int>(to_int(key, value));
    return;
  }
  if (key == "split.test") { spec.test_count = static_cast<int>(to_int(key, value)); return; }
  if (key == "feature.dim") { spec.feature_dim = static_cast<int>(to_int(key, value)); return; }
  if (key == "feature.separation") { spec.separation = to_double(key, value); return; }
  if (key == "feature.noise") { spec.noise_scale = to_double(key, value); return; }

  if (key.rfind("pseudo_corruption.", 0) == 0) {
    spec.pseudo_corruption[key.substr(18)] = to_double(key, value);
    return;
  }

  if (key.rfind("category.", 0) == 0) {
    const std::string rest = key.substr(9);
    const std::size_t dot = rest.find('.');
    if (dot == std::string::npos) throw ConfigError("unknown spec key '" + key + "'");
    const std::size_t index = static_cast<std::size_t>(to_int(key, rest.substr(0, dot)));
    const std::string field = rest.substr(dot + 1);
    CategorySpec& cat = category_slot(spec, index, key);
    if (field == "name") cat.name = value;
    else if (field == "classes") cat.classes = static_cast<int>(to_int(key, value));
    else if (field == "dist") {
      if (value == "uniform") cat.dist = SizeDist::uniform;
      else if (value.rfind("zipf", 0) == 0) {
        cat.dist = SizeDist::zipf;
        const std::size_t colon = value.find(':');
        if (colon != std::string::npos) {
          cat.zipf_exponent = to_double(key, value.substr(colon + 1));
        }
      } else {
        throw ConfigError(key + ": expected uniform or zipf[:exponent], got '" + value +
                          "'");
      }
    } else {
      throw ConfigError("unknown spec key '" + key + "'");
    }
    return;
  }

  if (key.rfind("rule.", 0) == 0) {
    const std::size_t index = static_cast<std::size_t>(to_int(key, key.substr(5)));
    const std::size_t arrow = value.find("->");
    if (arrow == std::string::npos) {
      throw ConfigError(key + ": expected From->To[:coverage], got '" + value + "'");
    }
    CorrelationRule rule;
    rule.from = trim(value.substr(0, arrow));
    std::string rest = value.substr(arrow + 2);
    const std::size_t colon = rest.find(':');
    if (colon != std::string::npos) {
      rule.coverage = to_double(key, trim(rest.substr(colon + 1)));
      rest.erase(colon);
    }
    rule.to = trim(rest);
    if (index > spec.rules.size()) {
      throw ConfigError(key + ": rule indices must be contiguous");
    }
    if (index == spec.rules.size()) spec.rules.push_back(rule);
    else spec.rules[index] = rule;
    return;
  }

  throw ConfigError("unknown spec key '" + key + "'");
}

}  // namespace

SyntheticSpec parse_synthetic_spec(const std::string& text) {
  const auto entries = parse_key_values(text);

  SyntheticSpec spec;
  if (const auto preset = entries.find("preset"); preset != entries.end()) {
    const auto base = preset_by_name(preset->second);
    if (!base) throw ConfigError("preset: unknown preset '" + preset->second + "'");
    spec = *base;
  } else {
    spec.categories.clear();
  }

  // category.* and rule.* keys must apply in index order; the map's
  // lexicographic order would put "10" before "2".
  std::vector<std::pair<std::string, std::string>> ordered(entries.begin(), entries.end());
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    auto index_of = [](const std::string& key) -> long long {
      for (const char* prefix : {"category.", "rule."}) {
        if (key.rfind(prefix, 0) == 0) {
          const std::string rest = key.substr(std::string(prefix).size());
          const std::size_t end = rest.find('.');
          try {
            return std::stoll(rest.substr(0, end));
          } catch (const std::exception&) {
            return -1;
          }
        }
      }
      return -1;
    };
    return index_of(a.first) < index_of(b.first);
  });

  for (const auto& [key, value] : ordered) {
    if (key == "preset") continue;
    apply_synthetic_key(spec, key, value);
  }
  spec.validate();
  return spec;
}

SyntheticSpec synthetic_spec_from_file(const std::filesystem::path& path) {
  return parse_synthetic_spec(read_file(path));
}

}  // namespace gcnboost
