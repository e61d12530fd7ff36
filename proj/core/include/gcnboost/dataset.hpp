#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gcnboost/graph.hpp"

namespace gcnboost {

struct DatasetLabelRow {
  std::int64_t id = -1;
  std::string category;
  std::string value;
};

// On-disk dataset directory:
//   nodes.csv     id,kind,split,category,value,feature_ref
//   edges.csv     src_id,dst_id,kind            (assignment | link)
//   features.bin  raw artwork features, rows addressed by feature_ref
//   truth.csv     node_id,category,value        (test ground truth)
//   pseudo.csv    node_id,category,value        (optional ingested pseudo labels)
// Assignment edges cover train and validation artworks only; test artworks
// carry no edges and their labels live in truth.csv.
struct Dataset {
  std::vector<std::string> categories;  // order of first appearance in nodes.csv
  std::vector<ArtworkInput> artworks;   // all splits, external ids
  std::vector<DatasetLabelRow> label_rows;
  std::vector<AssignmentInput> assignments;
  std::vector<LabelLinkInput> links;
  Eigen::MatrixXf features;
  std::map<std::int64_t, std::map<std::string, std::string>> truth;
  std::map<std::int64_t, std::map<std::string, std::string>> ingested_pseudo;

  std::vector<ArtworkInput> artworks_of(Split split) const;
  std::vector<LabelDeclaration> label_declarations() const;
  // Label values of one category in file order; this is the canonical class
  // index space for that category's task.
  std::vector<std::string> observed_values(const std::string& category) const;
  CategoryId category_id(const std::string& name) const;  // throws DataError
};

Dataset load_dataset(const std::filesystem::path& dir);
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

}  // namespace gcnboost
