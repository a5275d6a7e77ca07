#include "tradenet/sparsity.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <string>

#include "tradenet/errors.hpp"

namespace tradenet {

void Multigraph::AddEdge(std::size_t u, std::size_t v, int multiplicity) {
  if (u == v) return;
  w_[u * n_ + v] += multiplicity;
  w_[v * n_ + u] += multiplicity;
}

Multigraph Multigraph::Induced(std::uint64_t vertices) const {
  std::vector<std::size_t> keep;
  for (std::size_t v = 0; v < n_; ++v) {
    if (vertices & (1ULL << v)) keep.push_back(v);
  }
  Multigraph sub(keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a) {
    for (std::size_t b = 0; b < keep.size(); ++b) {
      sub.w_[a * sub.n_ + b] = weight(keep[a], keep[b]);
    }
  }
  return sub;
}

std::size_t Multigraph::num_edges() const {
  std::size_t total = 0;
  for (std::size_t u = 0; u < n_; ++u) {
    for (std::size_t v = u + 1; v < n_; ++v) total += static_cast<std::size_t>(weight(u, v));
  }
  return total;
}

Multigraph UnderlyingGraph(const Market& market) {
  Multigraph g(market.num_agents());
  for (const Trade& t : market.trades()) {
    if (t.buyer < market.num_agents() && t.seller < market.num_agents()) {
      g.AddEdge(t.buyer, t.seller);
    }
  }
  return g;
}

std::int64_t MinCutStoerWagner(const Multigraph& g) {
  const std::size_t n = g.size();
  if (n < 2) return 0;
  std::vector<std::vector<std::int64_t>> w(n, std::vector<std::int64_t>(n));
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) w[u][v] = g.weight(u, v);
  }
  std::vector<std::size_t> active(n);
  for (std::size_t v = 0; v < n; ++v) active[v] = v;
  std::int64_t best = std::numeric_limits<std::int64_t>::max();

  while (active.size() > 1) {
    // Maximum-adjacency ordering over the active super-vertices.
    const std::size_t m = active.size();
    std::vector<std::int64_t> conn(m, 0);
    std::vector<char> added(m, 0);
    std::size_t prev = 0;
    std::size_t last = 0;
    for (std::size_t step = 0; step < m; ++step) {
      std::size_t pick = m;
      for (std::size_t j = 0; j < m; ++j) {
        if (!added[j] && (pick == m || conn[j] > conn[pick])) pick = j;
      }
      added[pick] = 1;
      if (step == m - 1) {
        best = std::min(best, conn[pick]);
        last = pick;
        break;
      }
      prev = pick;
      for (std::size_t j = 0; j < m; ++j) {
        if (!added[j]) conn[j] += w[active[pick]][active[j]];
      }
    }
    // Merge `last` into `prev`.
    const std::size_t a = active[prev];
    const std::size_t b = active[last];
    for (std::size_t v = 0; v < n; ++v) {
      w[a][v] += w[b][v];
      w[v][a] = w[a][v];
    }
    w[a][a] = 0;
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(last));
  }
  return best;
}

std::int64_t MinCutByBipartitions(const Multigraph& g) {
  const std::size_t n = g.size();
  if (n < 2) return 0;
  if (n > 30) throw CapacityError("bipartition enumeration supports at most 30 vertices");
  // Vertex n-1 is pinned to side B; Gray-code over the remaining vertices
  // moves one vertex between sides per step.
  std::vector<char> in_a(n, 0);
  std::int64_t cut = 0;
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  for (std::uint64_t i = 1; i < count; ++i) {
    const std::size_t v = static_cast<std::size_t>(std::countr_zero(i));
    std::int64_t to_a = 0;
    std::int64_t to_b = 0;
    for (std::size_t u = 0; u < n; ++u) {
      if (u == v) continue;
      (in_a[u] ? to_a : to_b) += g.weight(v, u);
    }
    cut += in_a[v] ? (to_a - to_b) : (to_b - to_a);
    in_a[v] ^= 1;
    // Side A is never empty here except when the walk returns to zero, which
    // only happens at i = 0.
    best = std::min(best, cut);
  }
  return best;
}

std::size_t Sparsity(const Multigraph& g) {
  const std::size_t n = g.size();
  if (n > kMaxExactSparsityVertices) {
    throw CapacityError("exact sparsity supports at most " +
                        std::to_string(kMaxExactSparsityVertices) + " vertices, graph has " +
                        std::to_string(n));
  }
  std::int64_t m = 1;
  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t s = 0; s < subsets; ++s) {
    if (std::popcount(s) < 2) continue;
    m = std::max(m, MinCutStoerWagner(g.Induced(s)));
  }
  return static_cast<std::size_t>(m);
}

std::size_t Sparsity(const Market& market) { return Sparsity(UnderlyingGraph(market)); }

std::size_t SparsityUpperBound(const Multigraph& g) {
  const std::size_t n = g.size();
  std::vector<std::int64_t> degree(n, 0);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) degree[u] += g.weight(u, v);
  }
  std::vector<char> removed(n, 0);
  std::int64_t bound = 1;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t pick = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (!removed[v] && (pick == n || degree[v] < degree[pick])) pick = v;
    }
    bound = std::max(bound, degree[pick]);
    removed[pick] = 1;
    for (std::size_t v = 0; v < n; ++v) {
      if (!removed[v]) degree[v] -= g.weight(pick, v);
    }
  }
  return static_cast<std::size_t>(bound);
}

std::size_t SparsityUpperBound(const Market& market) {
  return SparsityUpperBound(UnderlyingGraph(market));
}

}  // namespace tradenet
