#include "gcnboost/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "gcnboost/errors.hpp"
#include "gcnboost/io.hpp"

namespace gcnboost {

namespace {

std::int64_t parse_int(const std::string& s, const std::string& context) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw DataError(context + ": expected an integer, got '" + s + "'");
  }
  return value;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               const std::string& expected_header) {
  const std::string text = read_file(path);
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      if (line != expected_header) {
        throw DataError(path.filename().string() + ": expected header '" +
                        expected_header + "', got '" + line + "'");
      }
      first = false;
      continue;
    }
    rows.push_back(csv_split(line));
  }
  if (first) throw DataError(path.filename().string() + ": missing header");
  return rows;
}

}  // namespace

std::vector<ArtworkInput> Dataset::artworks_of(Split split) const {
  std::vector<ArtworkInput> out;
  for (const ArtworkInput& a : artworks) {
    if (a.split == split) out.push_back(a);
  }
  return out;
}

std::vector<LabelDeclaration> Dataset::label_declarations() const {
  std::vector<LabelDeclaration> out;
  out.reserve(label_rows.size());
  for (const DatasetLabelRow& row : label_rows) {
    out.push_back(LabelDeclaration{row.category, row.value});
  }
  return out;
}

std::vector<std::string> Dataset::observed_values(const std::string& category) const {
  std::vector<std::string> out;
  for (const DatasetLabelRow& row : label_rows) {
    if (row.category == category) out.push_back(row.value);
  }
  return out;
}

CategoryId Dataset::category_id(const std::string& name) const {
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (categories[i] == name) return static_cast<CategoryId>(i);
  }
  throw DataError("unknown category '" + name + "'");
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset ds;

  std::map<std::int64_t, ArtworkInput> artwork_by_id;
  std::map<std::int64_t, const DatasetLabelRow*> label_by_id;
  std::set<std::pair<std::string, std::string>> seen_labels;

  for (const auto& row : read_csv(dir / "nodes.csv", "id,kind,split,category,value,feature_ref")) {
    if (row.size() != 6) throw DataError("nodes.csv: malformed row");
    const std::int64_t id = parse_int(row[0], "nodes.csv id");
    if (id < 0) throw DataError("nodes.csv: negative node id");
    if (row[1] == "artwork") {
      ArtworkInput art;
      art.external_id = id;
      art.split = split_from_string(row[2]);
      art.feature_ref = row[5].empty()
                            ? -1
                            : static_cast<std::int32_t>(parse_int(row[5], "feature_ref"));
      if (!artwork_by_id.emplace(id, art).second || label_by_id.count(id) > 0) {
        throw DataError("nodes.csv: duplicate node id " + std::to_string(id));
      }
      ds.artworks.push_back(art);
    } else if (row[1] == "label") {
      if (row[3].empty() || row[4].empty()) {
        throw DataError("nodes.csv: label node " + std::to_string(id) +
                        " needs category and value");
      }
      if (!seen_labels.emplace(row[3], row[4]).second) {
        throw DataError("nodes.csv: duplicate label (" + row[3] + ", " + row[4] + ")");
      }
      if (std::find(ds.categories.begin(), ds.categories.end(), row[3]) ==
          ds.categories.end()) {
        ds.categories.push_back(row[3]);
      }
      ds.label_rows.push_back(DatasetLabelRow{id, row[3], row[4]});
      if (artwork_by_id.count(id) > 0 || !label_by_id.emplace(id, &ds.label_rows.back()).second) {
        throw DataError("nodes.csv: duplicate node id " + std::to_string(id));
      }
    } else {
      throw DataError("nodes.csv: unknown kind '" + row[1] + "'");
    }
  }
  // label_rows may reallocate while loading; rebuild the pointer map.
  label_by_id.clear();
  for (const DatasetLabelRow& row : ds.label_rows) label_by_id[row.id] = &row;

  for (const auto& row : read_csv(dir / "edges.csv", "src_id,dst_id,kind")) {
    if (row.size() != 3) throw DataError("edges.csv: malformed row");
    const std::int64_t src = parse_int(row[0], "edges.csv src_id");
    const std::int64_t dst = parse_int(row[1], "edges.csv dst_id");
    if (row[2] == "assignment") {
      const bool src_is_artwork = artwork_by_id.count(src) > 0;
      const std::int64_t artwork = src_is_artwork ? src : dst;
      const std::int64_t label = src_is_artwork ? dst : src;
      auto art = artwork_by_id.find(artwork);
      auto lab = label_by_id.find(label);
      if (art == artwork_by_id.end() || lab == label_by_id.end()) {
        throw DataError("edges.csv: assignment must join an artwork and a label (" +
                        std::to_string(src) + ", " + std::to_string(dst) + ")");
      }
      if (art->second.split == Split::test) {
        throw DataError("edges.csv: test artwork " + std::to_string(artwork) +
                        " must not carry assignment edges");
      }
      ds.assignments.push_back(
          AssignmentInput{artwork, lab->second->category, lab->second->value});
    } else if (row[2] == "link") {
      auto a = label_by_id.find(src);
      auto b = label_by_id.find(dst);
      if (a == label_by_id.end() || b == label_by_id.end()) {
        throw DataError("edges.csv: link must join two labels (" + std::to_string(src) +
                        ", " + std::to_string(dst) + ")");
      }
      ds.links.push_back(LabelLinkInput{a->second->value, b->second->value});
    } else {
      throw DataError("edges.csv: unknown kind '" + row[2] + "'");
    }
  }

  ds.features = read_feature_matrix(dir / "features.bin");
  for (const ArtworkInput& a : ds.artworks) {
    if (a.feature_ref >= ds.features.rows()) {
      throw DataError("artwork " + std::to_string(a.external_id) +
                      ": feature_ref " + std::to_string(a.feature_ref) +
                      " out of range");
    }
  }

  auto read_label_map = [&](const char* name, bool test_only)
      -> std::map<std::int64_t, std::map<std::string, std::string>> {
    std::map<std::int64_t, std::map<std::string, std::string>> out;
    for (const auto& row : read_csv(dir / name, "node_id,category,value")) {
      if (row.size() != 3) throw DataError(std::string(name) + ": malformed row");
      const std::int64_t id = parse_int(row[0], std::string(name) + " node_id");
      auto art = artwork_by_id.find(id);
      if (art == artwork_by_id.end() || (test_only && art->second.split != Split::test)) {
        throw DataError(std::string(name) + ": node " + std::to_string(id) +
                        " is not a test artwork");
      }
      if (std::find(ds.categories.begin(), ds.categories.end(), row[1]) ==
          ds.categories.end()) {
        throw DataError(std::string(name) + ": unknown category '" + row[1] + "'");
      }
      if (!out[id].emplace(row[1], row[2]).second) {
        throw DataError(std::string(name) + ": duplicate entry for node " +
                        std::to_string(id) + ", category '" + row[1] + "'");
      }
    }
    return out;
  };

  ds.truth = read_label_map("truth.csv", true);
  if (std::filesystem::exists(dir / "pseudo.csv")) {
    ds.ingested_pseudo = read_label_map("pseudo.csv", true);
  }

  return ds;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  std::string nodes = "id,kind,split,category,value,feature_ref\n";
  for (const ArtworkInput& a : dataset.artworks) {
    nodes += std::to_string(a.external_id) + ",artwork," + to_string(a.split) + ",,,";
    if (a.feature_ref >= 0) nodes += std::to_string(a.feature_ref);
    nodes += '\n';
  }
  for (const DatasetLabelRow& row : dataset.label_rows) {
    nodes += std::to_string(row.id) + ",label,," + csv_escape(row.category) + "," +
             csv_escape(row.value) + ",\n";
  }
  atomic_write_file(dir / "nodes.csv", nodes);

  std::map<std::pair<std::string, std::string>, std::int64_t> label_id;
  std::map<std::string, std::vector<std::int64_t>> ids_by_value;
  for (const DatasetLabelRow& row : dataset.label_rows) {
    label_id[{row.category, row.value}] = row.id;
    ids_by_value[row.value].push_back(row.id);
  }
  auto unique_value_id = [&](const std::string& value) -> std::int64_t {
    auto it = ids_by_value.find(value);
    if (it == ids_by_value.end()) throw DataError("link references unknown value '" + value + "'");
    if (it->second.size() != 1) {
      throw DataError("link value '" + value + "' is ambiguous across categories");
    }
    return it->second.front();
  };

  std::string edges = "src_id,dst_id,kind\n";
  for (const AssignmentInput& a : dataset.assignments) {
    auto it = label_id.find({a.category, a.value});
    if (it == label_id.end()) {
      throw DataError("assignment references unknown label (" + a.category + ", " +
                      a.value + ")");
    }
    edges += std::to_string(a.artwork_external_id) + "," + std::to_string(it->second) +
             ",assignment\n";
  }
  for (const LabelLinkInput& link : dataset.links) {
    edges += std::to_string(unique_value_id(link.value_a)) + "," +
             std::to_string(unique_value_id(link.value_b)) + ",link\n";
  }
  atomic_write_file(dir / "edges.csv", edges);

  write_feature_matrix(dir / "features.bin", dataset.features);

  auto write_label_map =
      [&dir](const char* name,
             const std::map<std::int64_t, std::map<std::string, std::string>>& entries) {
        std::string text = "node_id,category,value\n";
        for (const auto& [id, by_category] : entries) {
          for (const auto& [category, value] : by_category) {
            text += std::to_string(id) + "," + csv_escape(category) + "," +
                    csv_escape(value) + '\n';
          }
        }
        atomic_write_file(dir / name, text);
      };
  write_label_map("truth.csv", dataset.truth);
  if (!dataset.ingested_pseudo.empty()) {
    write_label_map("pseudo.csv", dataset.ingested_pseudo);
  }
}

}  // namespace gcnboost
