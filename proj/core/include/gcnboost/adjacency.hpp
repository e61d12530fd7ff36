#pragma once

#include <Eigen/SparseCore>
#include <span>

#include "gcnboost/graph.hpp"

namespace gcnboost {

// Symmetric normalized graph operator with self-loops. With d~_i = deg(i)+1:
// entry(i,i) = 1/d~_i, entry(i,j) = 1/sqrt(d~_i d~_j) for every edge (i,j).
// All entries lie in (0,1] and the spectrum lies in [-1,1]. Construction is
// canonical: the same edge set yields the same entry map regardless of the
// order edges were supplied in.
class NormalizedAdjacency {
 public:
  using Matrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  NormalizedAdjacency() = default;
  NormalizedAdjacency(NodeId dim, std::span<const Edge> edges);
  explicit NormalizedAdjacency(const ExtendedKG& ekg);

  NodeId dim() const { return static_cast<NodeId>(mat_.rows()); }
  double entry(NodeId i, NodeId j) const { return mat_.coeff(i, j); }
  const Matrix& matrix() const { return mat_; }

  bool operator==(const NormalizedAdjacency& other) const;

 private:
  Matrix mat_;
};

NormalizedAdjacency normalized_adjacency(const ExtendedKG& ekg);

}  // namespace gcnboost
