#include "gcnboost/adjacency.hpp"

#include <cmath>
#include <set>
#include <vector>

#include "gcnboost/errors.hpp"

namespace gcnboost {

NormalizedAdjacency::NormalizedAdjacency(NodeId dim, std::span<const Edge> edges) {
  std::set<Edge> canonical;
  for (const Edge& e : edges) {
    if (e.first == e.second) throw DataError("self-edge in adjacency input");
    if (e.first < 0 || e.second < 0 || e.first >= dim || e.second >= dim) {
      throw DataError("edge endpoint out of range");
    }
    canonical.insert(make_edge(e.first, e.second));
  }

  std::vector<double> deg(static_cast<std::size_t>(dim), 1.0);  // self-loop
  for (const Edge& e : canonical) {
    deg[static_cast<std::size_t>(e.first)] += 1.0;
    deg[static_cast<std::size_t>(e.second)] += 1.0;
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(canonical.size() * 2 + static_cast<std::size_t>(dim));
  for (NodeId i = 0; i < dim; ++i) {
    triplets.emplace_back(i, i, 1.0 / deg[static_cast<std::size_t>(i)]);
  }
  for (const Edge& e : canonical) {
    const double w = 1.0 / std::sqrt(deg[static_cast<std::size_t>(e.first)] *
                                     deg[static_cast<std::size_t>(e.second)]);
    triplets.emplace_back(e.first, e.second, w);
    triplets.emplace_back(e.second, e.first, w);
  }

  mat_.resize(dim, dim);
  mat_.setFromTriplets(triplets.begin(), triplets.end());
  mat_.makeCompressed();
}

NormalizedAdjacency::NormalizedAdjacency(const ExtendedKG& ekg) {
  std::vector<Edge> edges;
  edges.reserve(ekg.edge_count());
  for (const Edge& e : ekg.base.assignment_edges) edges.push_back(e);
  for (const Edge& e : ekg.base.label_link_edges) edges.push_back(e);
  for (const PseudoEdge& e : ekg.pseudo_edges) edges.push_back(make_edge(e.artwork, e.label));
  *this = NormalizedAdjacency(ekg.node_count(), edges);
}

bool NormalizedAdjacency::operator==(const NormalizedAdjacency& other) const {
  if (mat_.rows() != other.mat_.rows() || mat_.nonZeros() != other.mat_.nonZeros()) {
    return false;
  }
  for (int row = 0; row < mat_.outerSize(); ++row) {
    Matrix::InnerIterator a(mat_, row);
    Matrix::InnerIterator b(other.mat_, row);
    for (; a && b; ++a, ++b) {
      if (a.col() != b.col() || a.value() != b.value()) return false;
    }
    if (a || b) return false;
  }
  return true;
}

NormalizedAdjacency normalized_adjacency(const ExtendedKG& ekg) {
  return NormalizedAdjacency(ekg);
}

}  // namespace gcnboost
