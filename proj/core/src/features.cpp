#include "gcnboost/features.hpp"

#include <cmath>

#include "gcnboost/errors.hpp"
#include "gcnboost/rng.hpp"

namespace gcnboost {

const char* to_string(InitScheme scheme) {
  return scheme == InitScheme::n2v_plus_random ? "n2v_random" : "visual_n2v";
}

InitScheme init_scheme_from_string(const std::string& s) {
  if (s == "n2v_random") return InitScheme::n2v_plus_random;
  if (s == "visual_n2v") return InitScheme::visual_plus_n2v;
  throw ConfigError("unknown init scheme '" + s + "'");
}

EmbeddingTable project_features(const EmbeddingTable& raw, int target_dim,
                                ProjectionMethod method, std::uint64_t seed) {
  if (target_dim < 1) throw ConfigError("target_dim must be >= 1");

  EmbeddingTable out;
  out.dim = target_dim;
  if (raw.rows.empty()) return out;

  if (method == ProjectionMethod::truncate) {
    if (raw.dim < target_dim) {
      throw ConfigError("cannot truncate " + std::to_string(raw.dim) +
                        "-dim rows to " + std::to_string(target_dim));
    }
    for (const auto& [id, row] : raw.rows) out.rows.emplace(id, row.head(target_dim));
    return out;
  }

  Eigen::MatrixXf projection(raw.dim, target_dim);
  Rng rng(mix_seed(seed, "random_projection"));
  const double scale = 1.0 / std::sqrt(static_cast<double>(target_dim));
  for (int r = 0; r < raw.dim; ++r) {
    for (int c = 0; c < target_dim; ++c) {
      projection(r, c) = static_cast<float>(rng.normal() * scale);
    }
  }
  for (const auto& [id, row] : raw.rows) {
    if (row.size() != raw.dim) throw DataError("embedding rows have uneven length");
    out.rows.emplace(id, (row.transpose() * projection).transpose());
  }
  return out;
}

namespace {

const Eigen::VectorXf& embedding_row(const EmbeddingTable& table, NodeId node) {
  auto it = table.rows.find(node);
  if (it == table.rows.end()) {
    throw DataError("no embedding for node " + std::to_string(node));
  }
  return it->second;
}

}  // namespace

FeatureMatrix assemble_initial_features(const ExtendedKG& ekg, InitScheme scheme,
                                        const FeatureSources& sources,
                                        std::uint64_t seed) {
  if (sources.node_embeddings == nullptr) {
    throw ConfigError("assemble_initial_features requires node embeddings");
  }
  const int d = sources.node_embeddings->dim;
  const NodeId n = ekg.node_count();
  FeatureMatrix h0(n, d);

  if (scheme == InitScheme::visual_plus_n2v) {
    if (sources.visual == nullptr) {
      throw ConfigError("visual_n2v scheme requires raw visual features");
    }
    EmbeddingTable raw;
    raw.dim = static_cast<int>(sources.visual->cols());
    for (NodeId i = 0; i < n; ++i) {
      if (!ekg.is_artwork(i)) continue;
      const ArtworkNode& art = ekg.artwork_at(i);
      if (art.feature_ref < 0 || art.feature_ref >= sources.visual->rows()) {
        throw DataError("artwork node " + std::to_string(i) + " (external id " +
                        std::to_string(art.external_id) + ") has no visual feature");
      }
      raw.rows.emplace(i, sources.visual->row(art.feature_ref).transpose());
    }
    const EmbeddingTable projected =
        raw.dim == d ? raw
                     : project_features(raw, d, ProjectionMethod::seeded_random_projection,
                                        seed);
    for (NodeId i = 0; i < n; ++i) {
      const Eigen::VectorXf& row = ekg.is_artwork(i)
                                       ? projected.rows.at(i)
                                       : embedding_row(*sources.node_embeddings, i);
      h0.row(i) = row.cast<double>();
    }
    return h0;
  }

  const double bound = 0.5 / static_cast<double>(d);
  for (NodeId i = 0; i < n; ++i) {
    if (ekg.is_test_artwork(i)) {
      Rng rng(mix_seed(seed, "test_init",
                       static_cast<std::uint64_t>(ekg.artwork_at(i).external_id)));
      for (int c = 0; c < d; ++c) h0(i, c) = rng.uniform(-bound, bound);
    } else {
      h0.row(i) = embedding_row(*sources.node_embeddings, i).cast<double>();
    }
  }
  return h0;
}

}  // namespace gcnboost
