#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tradenet/market.hpp"

namespace tradenet {

// Undirected multigraph as a symmetric matrix of edge multiplicities.
class Multigraph {
 public:
  explicit Multigraph(std::size_t n = 0) : n_(n), w_(n * n, 0) {}

  std::size_t size() const { return n_; }
  int weight(std::size_t u, std::size_t v) const { return w_[u * n_ + v]; }
  void AddEdge(std::size_t u, std::size_t v, int multiplicity = 1);
  // Subgraph induced by the vertices set in `vertices` (bit i = vertex i).
  Multigraph Induced(std::uint64_t vertices) const;
  std::size_t num_edges() const;

 private:
  std::size_t n_;
  std::vector<int> w_;
};

// Directions dropped, parallel trades kept as multiplicities, self-loops
// ignored.
Multigraph UnderlyingGraph(const Market& market);

// Weight of a minimum cut over all bipartitions into two non-empty sides
// (0 for disconnected graphs). Graphs with fewer than two vertices have no
// cut; both return 0 for them.
std::int64_t MinCutStoerWagner(const Multigraph& g);
// Reference implementation: enumerates every bipartition (Gray-code walk).
std::int64_t MinCutByBipartitions(const Multigraph& g);

inline constexpr std::size_t kMaxExactSparsityVertices = 14;

// Smallest m such that every induced subgraph on >= 2 vertices has a cut of
// size <= m, clamped below at 1 so that edgeless graphs count as 1-sparse
// like every other forest. Exact: visits all vertex subsets. Throws
// CapacityError above kMaxExactSparsityVertices vertices.
std::size_t Sparsity(const Multigraph& g);
std::size_t Sparsity(const Market& market);

// Heuristic upper bound for graphs of any size: the degeneracy (max over the
// min-degree-vertex peeling order), since isolating a minimum-degree vertex
// is always a cut of that size. Never below the exact value.
std::size_t SparsityUpperBound(const Multigraph& g);
std::size_t SparsityUpperBound(const Market& market);

}  // namespace tradenet
