#include "gcnboost/graph.hpp"

#include <algorithm>

#include "gcnboost/errors.hpp"

namespace gcnboost {

Edge make_edge(NodeId a, NodeId b) {
  return a < b ? Edge{a, b} : Edge{b, a};
}

const LabelNode& KnowledgeGraph::label_at(NodeId id) const {
  if (!is_label(id)) throw DataError("node " + std::to_string(id) + " is not a label");
  return labels[static_cast<std::size_t>(id) - artworks.size()];
}

std::optional<NodeId> KnowledgeGraph::find_label(CategoryId category,
                                                 const std::string& value) const {
  auto it = label_index.find({category, value});
  if (it == label_index.end()) return std::nullopt;
  return it->second;
}

std::optional<NodeId> KnowledgeGraph::assigned_label(NodeId artwork,
                                                     CategoryId category) const {
  auto it = assignment_index.find({artwork, category});
  if (it == assignment_index.end()) return std::nullopt;
  return it->second;
}

CategoryId KnowledgeGraph::category_id(const std::string& name) const {
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (categories[i] == name) return static_cast<CategoryId>(i);
  }
  throw DataError("unknown category '" + name + "'");
}

KnowledgeGraph build_kg(std::vector<std::string> categories,
                        std::span<const ArtworkInput> artworks,
                        std::span<const AssignmentInput> assignments,
                        std::span<const LabelLinkInput> links,
                        std::span<const LabelDeclaration> declared_labels) {
  KnowledgeGraph kg;
  kg.categories = std::move(categories);

  kg.artworks.reserve(artworks.size());
  for (const ArtworkInput& in : artworks) {
    if (in.split == Split::test) {
      throw DataError("artwork " + std::to_string(in.external_id) +
                      ": test artworks do not belong in the base graph");
    }
    if (!kg.artwork_index.emplace(in.external_id, kg.node_count()).second) {
      throw DataError("duplicate artwork id " + std::to_string(in.external_id));
    }
    kg.artworks.push_back(
        ArtworkNode{kg.node_count(), in.split, in.external_id, in.feature_ref});
  }

  auto intern_label = [&kg](CategoryId category, const std::string& value) -> NodeId {
    if (auto existing = kg.find_label(category, value)) return *existing;
    const NodeId id = kg.node_count();
    kg.labels.push_back(LabelNode{id, category, value});
    kg.label_index.emplace(std::pair{category, value}, id);
    return id;
  };

  for (const LabelDeclaration& in : declared_labels) {
    intern_label(kg.category_id(in.category), in.value);
  }

  for (const AssignmentInput& in : assignments) {
    auto art = kg.artwork_index.find(in.artwork_external_id);
    if (art == kg.artwork_index.end()) {
      throw DataError("assignment references undeclared artwork " +
                      std::to_string(in.artwork_external_id));
    }
    const CategoryId cat = kg.category_id(in.category);
    const NodeId artwork = art->second;
    if (auto prior = kg.assigned_label(artwork, cat)) {
      if (kg.label_at(*prior).value != in.value) {
        throw DataError("artwork " + std::to_string(in.artwork_external_id) +
                        ": conflicting '" + in.category + "' assignments ('" +
                        kg.label_at(*prior).value + "' vs '" + in.value + "')");
      }
      continue;  // exact duplicate, collapse
    }
    const NodeId label = intern_label(cat, in.value);
    kg.assignment_edges.insert(make_edge(artwork, label));
    kg.assignment_index.emplace(std::pair{artwork, cat}, label);
  }

  // Links name labels by bare value; the reference must resolve to exactly
  // one known label node.
  auto resolve_value = [&kg](const std::string& value) -> NodeId {
    NodeId found = -1;
    for (const LabelNode& label : kg.labels) {
      if (label.value != value) continue;
      if (found != -1) {
        throw DataError("label link value '" + value +
                        "' is ambiguous across categories");
      }
      found = label.id;
    }
    if (found == -1) throw DataError("label link references unknown value '" + value + "'");
    return found;
  };

  for (const LabelLinkInput& in : links) {
    const NodeId a = resolve_value(in.value_a);
    const NodeId b = resolve_value(in.value_b);
    if (a == b) {
      throw DataError("label link (" + in.value_a + ", " + in.value_b +
                      ") would form a self-edge");
    }
    kg.label_link_edges.insert(make_edge(a, b));
  }

  return kg;
}

bool ExtendedKG::is_label(NodeId id) const {
  if (base.is_label(id)) return true;
  const NodeId extra_begin = base.node_count() + static_cast<NodeId>(test_artworks.size());
  return id >= extra_begin && id < node_count();
}

const LabelNode& ExtendedKG::label_at(NodeId id) const {
  if (base.is_label(id)) return base.label_at(id);
  const NodeId extra_begin = base.node_count() + static_cast<NodeId>(test_artworks.size());
  if (id >= extra_begin && id < node_count()) {
    return extra_labels[static_cast<std::size_t>(id - extra_begin)];
  }
  throw DataError("node " + std::to_string(id) + " is not a label");
}

const ArtworkNode& ExtendedKG::artwork_at(NodeId id) const {
  if (base.is_artwork(id)) return base.artworks[static_cast<std::size_t>(id)];
  if (is_test_artwork(id)) {
    return test_artworks[static_cast<std::size_t>(id - base.node_count())];
  }
  throw DataError("node " + std::to_string(id) + " is not an artwork");
}

std::optional<NodeId> ExtendedKG::find_label(CategoryId category,
                                             const std::string& value) const {
  if (auto in_base = base.find_label(category, value)) return in_base;
  const NodeId extra_begin = base.node_count() + static_cast<NodeId>(test_artworks.size());
  for (std::size_t i = 0; i < extra_labels.size(); ++i) {
    if (extra_labels[i].category == category && extra_labels[i].value == value) {
      return extra_begin + static_cast<NodeId>(i);
    }
  }
  return std::nullopt;
}

std::optional<NodeId> ExtendedKG::find_artwork(std::int64_t external_id) const {
  if (auto it = base.artwork_index.find(external_id); it != base.artwork_index.end()) {
    return it->second;
  }
  if (auto it = test_index.find(external_id); it != test_index.end()) return it->second;
  return std::nullopt;
}

ExtendedKG extend_kg(KnowledgeGraph kg, std::span<const ArtworkInput> test_artworks,
                     const PseudoLabelAssignment& pseudo) {
  ExtendedKG ekg;
  ekg.base = std::move(kg);

  ekg.test_artworks.reserve(test_artworks.size());
  for (const ArtworkInput& in : test_artworks) {
    if (ekg.base.artwork_index.count(in.external_id) > 0) {
      throw DataError("test artwork id " + std::to_string(in.external_id) +
                      " collides with a base artwork");
    }
    const NodeId id = ekg.base.node_count() + static_cast<NodeId>(ekg.test_artworks.size());
    if (!ekg.test_index.emplace(in.external_id, id).second) {
      throw DataError("duplicate test artwork id " + std::to_string(in.external_id));
    }
    ekg.test_artworks.push_back(ArtworkNode{id, Split::test, in.external_id, in.feature_ref});
  }

  auto intern_label = [&ekg](CategoryId category, const std::string& value) -> NodeId {
    if (auto existing = ekg.find_label(category, value)) return *existing;
    const NodeId id = ekg.node_count();
    ekg.extra_labels.push_back(LabelNode{id, category, value});
    return id;
  };

  static const std::map<CategoryId, std::string> kNoLabels;
  for (const ArtworkNode& test : ekg.test_artworks) {
    auto entry = pseudo.per_node.find(test.external_id);
    const auto& given = entry == pseudo.per_node.end() ? kNoLabels : entry->second;
    if (given.size() != pseudo.strategy.categories.size()) {
      throw DataError("pseudo labels for test artwork " +
                      std::to_string(test.external_id) + " cover " +
                      std::to_string(given.size()) + " categories, strategy needs " +
                      std::to_string(pseudo.strategy.categories.size()));
    }
    for (const CategoryId cat : pseudo.strategy.categories) {
      auto value = given.find(cat);
      if (value == given.end()) {
        throw DataError("missing pseudo label for test artwork " +
                        std::to_string(test.external_id) + ", category '" +
                        ekg.base.categories.at(static_cast<std::size_t>(cat)) + "'");
      }
      const NodeId label = intern_label(cat, value->second);
      ekg.pseudo_edges.insert(PseudoEdge{test.id, label, cat});
    }
  }

  return ekg;
}

std::vector<std::vector<NodeId>> adjacency_lists(const ExtendedKG& ekg) {
  std::vector<std::vector<NodeId>> adj(static_cast<std::size_t>(ekg.node_count()));
  auto add = [&adj](NodeId a, NodeId b) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  };
  for (const Edge& e : ekg.base.assignment_edges) add(e.first, e.second);
  for (const Edge& e : ekg.base.label_link_edges) add(e.first, e.second);
  for (const PseudoEdge& e : ekg.pseudo_edges) add(e.artwork, e.label);
  for (auto& neighbors : adj) std::sort(neighbors.begin(), neighbors.end());
  return adj;
}

const char* to_string(DegreeSource source) {
  return source == DegreeSource::train_only ? "train_only" : "train_plus_pseudo";
}

DegreeDistribution degree_histogram(const ExtendedKG& ekg, CategoryId category,
                                    DegreeSource sources) {
  if (category < 0 || category >= static_cast<CategoryId>(ekg.base.categories.size())) {
    throw DataError("unknown category id " + std::to_string(category));
  }
  std::vector<int> degree(static_cast<std::size_t>(ekg.node_count()), 0);
  for (const Edge& e : ekg.base.assignment_edges) {
    const NodeId label = ekg.base.is_label(e.first) ? e.first : e.second;
    ++degree[static_cast<std::size_t>(label)];
  }
  if (sources == DegreeSource::train_plus_pseudo) {
    for (const PseudoEdge& e : ekg.pseudo_edges) ++degree[static_cast<std::size_t>(e.label)];
  }

  DegreeDistribution dist;
  dist.category = category;
  dist.sources = sources;
  auto bucket = [&](const LabelNode& label) {
    if (label.category == category) ++dist.buckets[degree[static_cast<std::size_t>(label.id)]];
  };
  for (const LabelNode& label : ekg.base.labels) bucket(label);
  for (const LabelNode& label : ekg.extra_labels) bucket(label);
  return dist;
}

std::string degree_histograms_csv(const ExtendedKG& ekg) {
  std::string csv = "category,degree,count,sources\n";
  for (CategoryId cat = 0; cat < static_cast<CategoryId>(ekg.base.categories.size());
       ++cat) {
    for (const DegreeSource source :
         {DegreeSource::train_only, DegreeSource::train_plus_pseudo}) {
      const DegreeDistribution dist = degree_histogram(ekg, cat, source);
      for (const auto& [degree, count] : dist.buckets) {
        csv += ekg.base.categories[static_cast<std::size_t>(cat)] + "," +
               std::to_string(degree) + "," + std::to_string(count) + "," +
               to_string(source) + "\n";
      }
    }
  }
  return csv;
}

FilterResult filter_low_degree(const ExtendedKG& ekg, CategoryId category,
                               int min_train_degree) {
  if (min_train_degree < 0) throw ConfigError("min_train_degree must be >= 0");
  if (category < 0 || category >= static_cast<CategoryId>(ekg.base.categories.size())) {
    throw DataError("unknown category id " + std::to_string(category));
  }

  std::vector<int> train_degree(static_cast<std::size_t>(ekg.node_count()), 0);
  for (const Edge& e : ekg.base.assignment_edges) {
    const NodeId artwork = ekg.base.is_artwork(e.first) ? e.first : e.second;
    const NodeId label = e.first == artwork ? e.second : e.first;
    if (ekg.base.artworks[static_cast<std::size_t>(artwork)].split == Split::train) {
      ++train_degree[static_cast<std::size_t>(label)];
    }
  }

  std::vector<bool> removed(static_cast<std::size_t>(ekg.node_count()), false);
  FilterResult result;
  auto consider = [&](const LabelNode& label) {
    if (label.category == category &&
        train_degree[static_cast<std::size_t>(label.id)] < min_train_degree) {
      removed[static_cast<std::size_t>(label.id)] = true;
      result.excluded_values.insert(label.value);
    }
  };
  for (const LabelNode& label : ekg.base.labels) consider(label);
  for (const LabelNode& label : ekg.extra_labels) consider(label);

  result.old_to_new.assign(static_cast<std::size_t>(ekg.node_count()), -1);
  ExtendedKG out;
  out.base.categories = ekg.base.categories;

  NodeId next = 0;
  for (const ArtworkNode& a : ekg.base.artworks) {
    result.old_to_new[static_cast<std::size_t>(a.id)] = next;
    ArtworkNode copy = a;
    copy.id = next++;
    out.base.artwork_index.emplace(copy.external_id, copy.id);
    out.base.artworks.push_back(copy);
  }
  for (const LabelNode& l : ekg.base.labels) {
    if (removed[static_cast<std::size_t>(l.id)]) continue;
    result.old_to_new[static_cast<std::size_t>(l.id)] = next;
    LabelNode copy = l;
    copy.id = next++;
    out.base.label_index.emplace(std::pair{copy.category, copy.value}, copy.id);
    out.base.labels.push_back(copy);
  }
  for (const ArtworkNode& a : ekg.test_artworks) {
    result.old_to_new[static_cast<std::size_t>(a.id)] = next;
    ArtworkNode copy = a;
    copy.id = next++;
    out.test_index.emplace(copy.external_id, copy.id);
    out.test_artworks.push_back(copy);
  }
  for (const LabelNode& l : ekg.extra_labels) {
    if (removed[static_cast<std::size_t>(l.id)]) continue;
    result.old_to_new[static_cast<std::size_t>(l.id)] = next;
    LabelNode copy = l;
    copy.id = next++;
    out.extra_labels.push_back(copy);
  }

  const auto& remap = result.old_to_new;
  for (const Edge& e : ekg.base.assignment_edges) {
    const NodeId a = remap[static_cast<std::size_t>(e.first)];
    const NodeId b = remap[static_cast<std::size_t>(e.second)];
    if (a == -1 || b == -1) continue;
    out.base.assignment_edges.insert(make_edge(a, b));
    const NodeId artwork = out.base.is_artwork(a) ? a : b;
    const NodeId label = artwork == a ? b : a;
    out.base.assignment_index.emplace(std::pair{artwork, out.base.label_at(label).category},
                                      label);
  }
  for (const Edge& e : ekg.base.label_link_edges) {
    const NodeId a = remap[static_cast<std::size_t>(e.first)];
    const NodeId b = remap[static_cast<std::size_t>(e.second)];
    if (a == -1 || b == -1) continue;
    out.base.label_link_edges.insert(make_edge(a, b));
  }
  for (const PseudoEdge& e : ekg.pseudo_edges) {
    const NodeId label = remap[static_cast<std::size_t>(e.label)];
    if (label == -1) continue;
    out.pseudo_edges.insert(
        PseudoEdge{remap[static_cast<std::size_t>(e.artwork)], label, e.category});
  }

  result.ekg = std::move(out);
  return result;
}

}  // namespace gcnboost
