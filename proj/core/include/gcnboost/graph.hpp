#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gcnboost/types.hpp"

namespace gcnboost {

struct ArtworkInput {
  std::int64_t external_id = -1;
  Split split = Split::train;
  std::int32_t feature_ref = -1;
};

struct AssignmentInput {
  std::int64_t artwork_external_id = -1;
  std::string category;
  std::string value;
};

struct LabelLinkInput {
  std::string value_a;
  std::string value_b;
};

struct LabelDeclaration {
  std::string category;
  std::string value;
};

// Undirected simple edge, stored normalized (first < second).
using Edge = std::pair<NodeId, NodeId>;

Edge make_edge(NodeId a, NodeId b);

// Knowledge graph over labeled artworks: nodes are the train/validation
// artworks plus one node per distinct (category, value) label; edges are
// label assignments plus explicit label-label links. Treat as immutable
// after build_kg.
struct KnowledgeGraph {
  std::vector<std::string> categories;  // fixed at dataset load
  std::vector<ArtworkNode> artworks;    // node ids [0, artworks.size())
  std::vector<LabelNode> labels;        // node ids [artworks.size(), node_count())
  std::set<Edge> assignment_edges;      // artwork-label
  std::set<Edge> label_link_edges;      // label-label

  std::map<std::pair<CategoryId, std::string>, NodeId> label_index;
  std::map<std::pair<NodeId, CategoryId>, NodeId> assignment_index;
  std::map<std::int64_t, NodeId> artwork_index;  // external id -> node

  NodeId node_count() const {
    return static_cast<NodeId>(artworks.size() + labels.size());
  }
  std::size_t edge_count() const {
    return assignment_edges.size() + label_link_edges.size();
  }
  bool is_artwork(NodeId id) const {
    return id >= 0 && id < static_cast<NodeId>(artworks.size());
  }
  bool is_label(NodeId id) const {
    return id >= static_cast<NodeId>(artworks.size()) && id < node_count();
  }
  const LabelNode& label_at(NodeId id) const;
  std::optional<NodeId> find_label(CategoryId category, const std::string& value) const;
  std::optional<NodeId> assigned_label(NodeId artwork, CategoryId category) const;
  CategoryId category_id(const std::string& name) const;  // throws DataError
};

// Label nodes come from explicit declarations plus first mention in an
// assignment; links name labels by bare value and must resolve to exactly one
// existing label node.
KnowledgeGraph build_kg(std::vector<std::string> categories,
                        std::span<const ArtworkInput> artworks,
                        std::span<const AssignmentInput> assignments,
                        std::span<const LabelLinkInput> links,
                        std::span<const LabelDeclaration> declared_labels = {});

struct PseudoEdge {
  NodeId artwork = -1;
  NodeId label = -1;
  CategoryId category = -1;
  auto operator<=>(const PseudoEdge&) const = default;
};

// The knowledge graph extended with test artworks, connected through one
// pseudo-label edge per strategy category. Pseudo label values never seen
// in the base graph get fresh label nodes (extra_labels). Node id layout:
// base nodes, then test artworks, then extra labels.
struct ExtendedKG {
  KnowledgeGraph base;
  std::vector<ArtworkNode> test_artworks;
  std::vector<LabelNode> extra_labels;
  std::set<PseudoEdge> pseudo_edges;

  NodeId node_count() const {
    return base.node_count() + static_cast<NodeId>(test_artworks.size()) +
           static_cast<NodeId>(extra_labels.size());
  }
  std::size_t edge_count() const { return base.edge_count() + pseudo_edges.size(); }
  bool is_test_artwork(NodeId id) const {
    return id >= base.node_count() &&
           id < base.node_count() + static_cast<NodeId>(test_artworks.size());
  }
  bool is_artwork(NodeId id) const { return base.is_artwork(id) || is_test_artwork(id); }
  bool is_label(NodeId id) const;
  const LabelNode& label_at(NodeId id) const;
  const ArtworkNode& artwork_at(NodeId id) const;
  std::optional<NodeId> find_label(CategoryId category, const std::string& value) const;
  std::optional<NodeId> find_artwork(std::int64_t external_id) const;

  std::map<std::int64_t, NodeId> test_index;  // external id -> node
};

ExtendedKG extend_kg(KnowledgeGraph kg, std::span<const ArtworkInput> test_artworks,
                     const PseudoLabelAssignment& pseudo);

// Sorted neighbor lists over the full extended edge set.
std::vector<std::vector<NodeId>> adjacency_lists(const ExtendedKG& ekg);

enum class DegreeSource { train_only, train_plus_pseudo };

const char* to_string(DegreeSource source);

struct DegreeDistribution {
  CategoryId category = -1;
  DegreeSource sources = DegreeSource::train_only;
  std::map<int, int> buckets;  // degree -> label node count
};

// Histogram of label-node degrees for one category. train_only counts
// assignment edges; train_plus_pseudo additionally counts pseudo edges.
// Label-link edges are never counted.
DegreeDistribution degree_histogram(const ExtendedKG& ekg, CategoryId category,
                                    DegreeSource sources);

// All categories x both sources as "category,degree,count,sources" rows.
std::string degree_histograms_csv(const ExtendedKG& ekg);

struct FilterResult {
  ExtendedKG ekg;
  std::set<std::string> excluded_values;
  // old node id -> new node id, -1 for removed label nodes.
  std::vector<NodeId> old_to_new;
};

// Removes label nodes of the category whose count of incident train-split
// assignment edges is below the threshold, together with all their edges.
// Artworks stay in the graph; exclusion from the category's task is derived
// downstream from excluded_values.
FilterResult filter_low_degree(const ExtendedKG& ekg, CategoryId category,
                               int min_train_degree);

}  // namespace gcnboost
