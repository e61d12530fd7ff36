// Command-line front end: generate synthetic datasets, run single training
// strategies, run the full ablation grid, and emit dataset reports.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric
// failure during training. GCNBOOST_THREADS caps how many ablation rows run
// concurrently.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <thread>

#include "gcnboost/adjacency.hpp"
#include "gcnboost/config.hpp"
#include "gcnboost/dataset.hpp"
#include "gcnboost/errors.hpp"
#include "gcnboost/gcn.hpp"
#include "gcnboost/io.hpp"
#include "gcnboost/pipeline.hpp"
#include "gcnboost/synthetic.hpp"

namespace {

using namespace gcnboost;

// Rows run hardware-wide by default; GCNBOOST_THREADS caps that.
int thread_budget() {
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("GCNBOOST_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap < 1) throw std::invalid_argument(env);
      return std::min(hw, cap);
    } catch (const std::exception&) {
      throw ConfigError("GCNBOOST_THREADS: expected a positive integer");
    }
  }
  return hw;
}

struct CliOverrides {
  std::string config_path;
  std::string dataset;
  std::string out;
  std::string strategy;
  std::string filter;
  std::int64_t seed = -1;
  int refresh_every = -1;
};

RunConfig resolve_config(const CliOverrides& cli) {
  RunConfig config;
  if (!cli.config_path.empty()) config = run_config_from_file(cli.config_path);
  if (!cli.dataset.empty()) config.set("dataset", cli.dataset);
  if (!cli.out.empty()) config.set("out", cli.out);
  if (cli.seed >= 0) config.set("seed", std::to_string(cli.seed));
  if (!cli.strategy.empty()) config.set("strategy", cli.strategy);
  if (cli.refresh_every >= 0) config.set("refresh.every", std::to_string(cli.refresh_every));
  if (!cli.filter.empty()) {
    const std::size_t colon = cli.filter.rfind(':');
    if (colon == std::string::npos) {
      throw ConfigError("--filter expects CATEGORY:MIN_DEGREE");
    }
    config.set("filter.category", cli.filter.substr(0, colon));
    config.set("filter.min_degree", cli.filter.substr(colon + 1));
  }
  if (config.dataset.empty()) throw ConfigError("no dataset given (config key or --dataset)");
  if (config.out.empty()) throw ConfigError("no output directory given (config key or --out)");
  return config;
}

std::string sanitize(std::string name) {
  for (char& c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  return name;
}

// GCN hidden representations per trained task plus a sidecar describing the
// row order, for external plotting.
void dump_embeddings(const std::filesystem::path& dir, const std::string& stem,
                     const RunStrategyResult& run, const Dataset& dataset) {
  std::filesystem::create_directories(dir);

  std::string sidecar = "row,kind,external_id,category,value\n";
  const ExtendedKG& ekg = run.ekg;
  for (NodeId node = 0; node < ekg.node_count(); ++node) {
    if (ekg.is_artwork(node)) {
      sidecar += std::to_string(node) + ",artwork," +
                 std::to_string(ekg.artwork_at(node).external_id) + ",,\n";
    } else {
      const LabelNode& label = ekg.label_at(node);
      sidecar += std::to_string(node) + ",label,," +
                 csv_escape(dataset.categories.at(static_cast<std::size_t>(label.category))) +
                 "," + csv_escape(label.value) + "\n";
    }
  }
  atomic_write_file(dir / (stem + "__nodes.csv"), sidecar);

  Eigen::MatrixXf initial(ekg.node_count(), run.embeddings.dim);
  for (NodeId node = 0; node < ekg.node_count(); ++node) {
    initial.row(node) = run.embeddings.rows.at(node).transpose();
  }
  write_feature_matrix(dir / (stem + "__node2vec.bin"), initial);

  for (std::size_t cat = 0; cat < run.tasks.size(); ++cat) {
    if (!run.tasks[cat]) continue;
    const ForwardPass fwd = forward(run.tasks[cat]->model, run.adjacency, run.h0);
    write_feature_matrix(dir / (stem + "__" + sanitize(dataset.categories[cat]) + ".bin"),
                         fwd.hidden.cast<float>());
  }
}

nlohmann::json metrics_to_json(const Metrics& metrics, const Dataset& dataset) {
  nlohmann::json out;
  for (const auto& [cat, entry] : metrics.per_category) {
    nlohmann::json e;
    if (entry.accuracy) e["accuracy"] = *entry.accuracy;
    else e["accuracy"] = nullptr;
    e["evaluated"] = entry.evaluated;
    e["correct"] = entry.correct;
    out[dataset.categories.at(static_cast<std::size_t>(cat))] = e;
  }
  return out;
}

int cmd_generate(const std::string& spec_path, const std::string& out_dir) {
  if (spec_path.empty()) throw ConfigError("generate needs --spec FILE");
  if (out_dir.empty()) throw ConfigError("generate needs --out DIR");
  const SyntheticSpec spec = synthetic_spec_from_file(spec_path);
  const Dataset dataset = generate_synthetic(spec);
  save_dataset(dataset, out_dir);
  std::cout << "wrote dataset with " << dataset.artworks.size() << " artworks, "
            << dataset.label_rows.size() << " labels to " << out_dir << "\n";
  return 0;
}

int cmd_ablate(const CliOverrides& cli) {
  const RunConfig config = resolve_config(cli);
  const Dataset dataset = load_dataset(config.dataset);

  PipelineConfig pipeline = config.to_pipeline();
  pipeline.max_threads = thread_budget();

  const auto pairs = parse_category_subsets(config.ablate_pairs, dataset.categories);
  const auto triples = parse_category_subsets(config.ablate_triples, dataset.categories);

  const std::filesystem::path out_dir(config.out);
  std::filesystem::create_directories(out_dir);

  std::string histograms;
  const auto observer = [&](std::size_t index, const AblationRow& row,
                            const RunStrategyResult& run) {
    const std::string stem = "row" + std::to_string(index) + "_" +
                             to_string(row.strategy.tag) + "_" +
                             sanitize(row.categories_label);
    dump_embeddings(out_dir / "embeddings", stem, run, dataset);
    if (row.strategy.tag == StrategyTag::Sall) {
      histograms = degree_histograms_csv(run.ekg);
    }
  };

  const AblationReport report = ablation_suite(dataset, pipeline, config.fingerprint(),
                                               pairs, triples, observer);
  atomic_write_file(out_dir / "report.json", report_to_json(report));
  atomic_write_file(out_dir / "report.csv", report_to_csv(report));
  atomic_write_file(out_dir / "degree_histograms.csv", histograms);

  std::cout << "ablation finished: " << report.rows.size() << " rows -> "
            << (out_dir / "report.csv").string() << "\n";
  return 0;
}

int cmd_train(const CliOverrides& cli) {
  const RunConfig config = resolve_config(cli);
  const Dataset dataset = load_dataset(config.dataset);

  PipelineConfig pipeline = config.to_pipeline();
  pipeline.max_threads = thread_budget();
  const Strategy strategy = resolve_strategy(config.strategy, dataset.categories);
  const PseudoSource source = strategy.tag == StrategyTag::S0
                                  ? PseudoSource::random
                                  : parse_pseudo_source(config.pseudo_source);

  const RunStrategyResult run = run_strategy(dataset, strategy, source, pipeline);

  const std::filesystem::path out_dir(config.out);
  std::filesystem::create_directories(out_dir);
  for (std::size_t cat = 0; cat < run.tasks.size(); ++cat) {
    if (!run.tasks[cat]) continue;
    const std::string name = sanitize(dataset.categories[cat]);
    write_checkpoint(out_dir / ("model_" + name + ".gbmd"), run.tasks[cat]->model);
    atomic_write_file(out_dir / ("history_" + name + ".csv"),
                      history_to_csv(run.tasks[cat]->history));
  }

  nlohmann::json doc;
  doc["strategy"] = to_string(strategy.tag);
  doc["categories"] = dataset.categories;
  doc["seed"] = config.seed;
  doc["config_fingerprint"] = config.fingerprint();
  doc["metrics"] = metrics_to_json(run.metrics, dataset);
  doc["warnings"] = run.metrics.warnings;
  if (!run.excluded_values.empty()) {
    doc["excluded_values"] =
        std::vector<std::string>(run.excluded_values.begin(), run.excluded_values.end());
  }
  atomic_write_file(out_dir / "metrics.json", doc.dump(2) + "\n");
  dump_embeddings(out_dir / "embeddings", "train_" + std::string(to_string(strategy.tag)),
                  run, dataset);

  std::cout << "training finished -> " << (out_dir / "metrics.json").string() << "\n";
  return 0;
}

int cmd_report(const CliOverrides& cli) {
  const RunConfig config = resolve_config(cli);
  const Dataset dataset = load_dataset(config.dataset);

  std::vector<ArtworkInput> base;
  std::vector<ArtworkInput> test;
  for (const ArtworkInput& a : dataset.artworks) {
    (a.split == Split::test ? test : base).push_back(a);
  }

  PseudoLabelAssignment pseudo;
  if (!dataset.ingested_pseudo.empty()) {
    std::vector<CategoryId> all(dataset.categories.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<CategoryId>(i);
    pseudo.strategy = make_strategy(StrategyTag::Sall, all, dataset.categories.size());
    pseudo.source = PseudoSource::ingested_file;
    for (const auto& [id, by_category] : dataset.ingested_pseudo) {
      for (const auto& [name, value] : by_category) {
        pseudo.per_node[id][dataset.category_id(name)] = value;
      }
    }
  }

  const ExtendedKG ekg =
      extend_kg(build_kg(dataset.categories, base, dataset.assignments, dataset.links,
                         dataset.label_declarations()),
                test, pseudo);

  const std::filesystem::path out_dir(config.out);
  std::filesystem::create_directories(out_dir);
  atomic_write_file(out_dir / "degree_histograms.csv", degree_histograms_csv(ekg));

  nlohmann::json doc;
  doc["artworks"] = dataset.artworks.size();
  doc["labels"] = dataset.label_rows.size();
  doc["train"] = dataset.artworks_of(Split::train).size();
  doc["validation"] = dataset.artworks_of(Split::validation).size();
  doc["test"] = dataset.artworks_of(Split::test).size();
  doc["assignment_edges"] = ekg.base.assignment_edges.size();
  doc["label_link_edges"] = ekg.base.label_link_edges.size();
  doc["pseudo_edges"] = ekg.pseudo_edges.size();
  nlohmann::json cats;
  for (const std::string& name : dataset.categories) {
    cats[name] = dataset.observed_values(name).size();
  }
  doc["categories"] = cats;
  atomic_write_file(out_dir / "summary.json", doc.dump(2) + "\n");

  std::cout << "report written -> " << (out_dir / "summary.json").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transductive multi-label artwork classification over a knowledge graph"};
  app.require_subcommand(1);

  CliOverrides cli;
  std::string spec_path;

  auto add_common = [&cli](CLI::App* cmd) {
    cmd->add_option("--config", cli.config_path, "key=value configuration file");
    cmd->add_option("--dataset", cli.dataset, "dataset directory");
    cmd->add_option("--out", cli.out, "output directory");
    cmd->add_option("--seed", cli.seed, "global seed (overrides config)");
  };

  CLI::App* generate = app.add_subcommand("generate", "write a synthetic dataset");
  generate->add_option("--spec", spec_path, "generator spec file (key=value)");
  generate->add_option("--config", spec_path, "alias for --spec");
  generate->add_option("--out", cli.out, "output dataset directory");

  CLI::App* ablate = app.add_subcommand("ablate", "run the pseudo-label ablation grid");
  add_common(ablate);
  ablate->add_option("--refresh-every", cli.refresh_every,
                     "refresh pseudo labels every K iterations (0 = off)");
  ablate->add_option("--filter", cli.filter, "degree filter CATEGORY:MIN_DEGREE");

  CLI::App* train = app.add_subcommand("train", "train one strategy");
  add_common(train);
  train->add_option("--strategy", cli.strategy, "strategy TAG[:cat1,cat2]");
  train->add_option("--refresh-every", cli.refresh_every,
                    "refresh pseudo labels every K iterations (0 = off)");
  train->add_option("--filter", cli.filter, "degree filter CATEGORY:MIN_DEGREE");

  CLI::App* report = app.add_subcommand("report", "dataset summary and degree histograms");
  add_common(report);

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(spec_path, cli.out);
    if (ablate->parsed()) return cmd_ablate(cli);
    if (train->parsed()) return cmd_train(cli);
    if (report->parsed()) return cmd_report(cli);
  } catch (const gcnboost::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const gcnboost::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const gcnboost::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
