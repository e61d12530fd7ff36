#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "gcnboost/graph.hpp"
#include "gcnboost/node2vec.hpp"

namespace gcnboost {

// Initial node feature stack, row i for node i of the extended graph.
using FeatureMatrix = Eigen::MatrixXd;

enum class ProjectionMethod { seeded_random_projection, truncate };

// Brings embedding rows to target_dim. Random projection multiplies by a
// seeded Gaussian matrix with entries scaled by 1/sqrt(target_dim), which
// approximately preserves pairwise distances; truncate keeps the leading
// coordinates and requires the input to be at least target_dim wide.
EmbeddingTable project_features(const EmbeddingTable& raw, int target_dim,
                                ProjectionMethod method, std::uint64_t seed);

enum class InitScheme { n2v_plus_random, visual_plus_n2v };

const char* to_string(InitScheme scheme);
InitScheme init_scheme_from_string(const std::string& s);

struct FeatureSources {
  // Embeddings trained over the extended graph; must cover train/validation
  // artworks and every label node.
  const EmbeddingTable* node_embeddings = nullptr;
  // Raw visual feature rows addressed by ArtworkNode::feature_ref.
  const Eigen::MatrixXf* visual = nullptr;
};

// n2v_plus_random: train/validation artwork rows and label rows come from the
// embedding table; test artwork rows are drawn uniform on [-0.5/d, 0.5/d]
// from a per-node stream derived from (seed, external id).
// visual_plus_n2v: artwork rows (all splits) are the seeded random projection
// of their raw visual features (used as-is when widths already match); label
// rows come from the embedding table.
FeatureMatrix assemble_initial_features(const ExtendedKG& ekg, InitScheme scheme,
                                        const FeatureSources& sources,
                                        std::uint64_t seed);

}  // namespace gcnboost
