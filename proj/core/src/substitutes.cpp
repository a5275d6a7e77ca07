#include "tradenet/substitutes.hpp"

#include <map>
#include <string>

#include "tradenet/demand.hpp"
#include "tradenet/errors.hpp"

namespace tradenet {
namespace {

struct Grid {
  std::size_t k = 0;
  std::vector<Price> prices;  // row-major, k entries per vector
  std::vector<BundleMask> demand;

  std::span<const Price> row(std::size_t i) const { return {prices.data() + i * k, k}; }
  std::size_t size() const { return demand.size(); }
};

std::uint64_t BoxSize(std::span<const PriceRange> box, std::uint64_t guard) {
  std::uint64_t count = 1;
  for (const PriceRange& r : box) {
    if (r.hi < r.lo) throw DomainError("price range with hi < lo");
    const auto width = static_cast<std::uint64_t>(r.hi - r.lo + 1);
    if (width > guard || count * width > guard) {
      throw CapacityError("price box exceeds " + std::to_string(guard) + " price vectors");
    }
    count *= width;
  }
  return count;
}

// Demand at every vector of the box in odometer order (coordinate 0 fastest).
// Price rows are kept only if `keep_prices`.
Grid Enumerate(const Valuation& valuation, const IncidentTrades& incident,
               std::span<const PriceRange> box, std::uint64_t guard, bool keep_prices) {
  Grid g;
  g.k = incident.size();
  const std::uint64_t count = BoxSize(box, guard);
  if (keep_prices) g.prices.reserve(count * g.k);
  g.demand.reserve(count);
  std::vector<Price> p(g.k);
  for (std::size_t j = 0; j < g.k; ++j) p[j] = box[j].lo;
  for (std::uint64_t n = 0; n < count; ++n) {
    if (keep_prices) g.prices.insert(g.prices.end(), p.begin(), p.end());
    g.demand.push_back(Demand(valuation, incident, p));
    for (std::size_t j = 0; j < g.k; ++j) {  // odometer
      if (++p[j] <= box[j].hi) break;
      p[j] = box[j].lo;
    }
  }
  return g;
}

// Scans one condition. `fixed` is the side whose prices must agree,
// `moving` the side whose prices are ordered. For condition 1 (fixed =
// selling, moving = buying) the premise is p >= p'; for condition 2
// (fixed = buying, moving = selling) it is p <= p'.
std::optional<FsWitness> ScanCondition(const Grid& g, int condition, BundleMask fixed,
                                       BundleMask moving) {
  std::map<std::vector<Price>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::vector<Price> key;
    const auto row = g.row(i);
    for (std::size_t j = 0; j < g.k; ++j) {
      if (fixed & (1U << j)) key.push_back(row[j]);
    }
    groups[std::move(key)].push_back(i);
  }
  for (const auto& [key, members] : groups) {
    for (std::size_t a : members) {
      const auto p = g.row(a);
      for (std::size_t b : members) {
        const auto q = g.row(b);
        bool premise = true;
        BundleMask equal = 0;
        for (std::size_t j = 0; j < g.k; ++j) {
          if (p[j] == q[j]) equal |= 1U << j;
          if (!(moving & (1U << j))) continue;
          if (condition == 1 ? p[j] < q[j] : p[j] > q[j]) {
            premise = false;
            break;
          }
        }
        if (!premise) continue;
        const BundleMask psi = g.demand[a];
        const BundleMask psi2 = g.demand[b];
        // Fixed-side trades may only be added; moving-side trades at
        // unchanged prices may only be dropped.
        const bool grows = ((psi & fixed) & ~(psi2 & fixed)) == 0;
        const bool keeps = ((psi2 & moving & equal) & ~psi) == 0;
        if (grows && keeps) continue;
        FsWitness w;
        w.condition = condition;
        w.prices.assign(p.begin(), p.end());
        w.prices_other.assign(q.begin(), q.end());
        w.bundle = psi;
        w.bundle_other = psi2;
        return w;
      }
    }
  }
  return std::nullopt;
}

// Unit-step scan: x and x + e_j for every coordinate j on the moving side.
std::optional<FsWitness> ScanSteps(const Grid& g, std::span<const PriceRange> box,
                                   int condition, BundleMask fixed, BundleMask moving) {
  std::vector<std::uint64_t> stride(g.k, 1);
  for (std::size_t j = 1; j < g.k; ++j) {
    stride[j] = stride[j - 1] * static_cast<std::uint64_t>(box[j - 1].hi - box[j - 1].lo + 1);
  }
  std::vector<Price> x(g.k);
  for (std::size_t j = 0; j < g.k; ++j) x[j] = box[j].lo;
  for (std::uint64_t n = 0; n < g.size(); ++n) {
    for (std::size_t j = 0; j < g.k; ++j) {
      if (!(moving & (1U << j)) || x[j] == box[j].hi) continue;
      const BundleMask low = g.demand[n];
      const BundleMask high = g.demand[n + stride[j]];
      // Condition 1 lowers a buying price (p = high, p' = low); condition 2
      // raises a selling price (p = low, p' = high).
      const BundleMask psi = condition == 1 ? high : low;
      const BundleMask psi2 = condition == 1 ? low : high;
      const BundleMask equal = ~(1U << j);
      const bool grows = ((psi & fixed) & ~(psi2 & fixed)) == 0;
      const bool keeps = ((psi2 & moving & equal) & ~psi) == 0;
      if (grows && keeps) continue;
      std::vector<Price> up = x;
      ++up[j];
      FsWitness w;
      w.condition = condition;
      w.prices = condition == 1 ? up : x;
      w.prices_other = condition == 1 ? x : up;
      w.bundle = psi;
      w.bundle_other = psi2;
      return w;
    }
    for (std::size_t j = 0; j < g.k; ++j) {
      if (++x[j] <= box[j].hi) break;
      x[j] = box[j].lo;
    }
  }
  return std::nullopt;
}

}  // namespace

FsReport CheckFullSubstitutability(const Valuation& valuation,
                                   const IncidentTrades& incident,
                                   std::span<const PriceRange> box, FsScan scan) {
  if (box.size() != incident.size()) {
    throw DomainError("price box has " + std::to_string(box.size()) + " ranges for " +
                      std::to_string(incident.size()) + " incident trades");
  }
  if (incident.size() > kMaxIncidentTrades) {
    throw CapacityError("too many incident trades for the substitutability check");
  }
  const bool steps = scan == FsScan::kUnitSteps;
  const Grid grid = Enumerate(valuation, incident, box,
                              steps ? kMaxFsUnitStepVectors : kMaxFsPriceVectors, !steps);
  const auto run = [&](int condition, BundleMask fixed, BundleMask moving) {
    return steps ? ScanSteps(grid, box, condition, fixed, moving)
                 : ScanCondition(grid, condition, fixed, moving);
  };
  FsReport report;
  report.prices_checked = grid.size();
  if (auto w = run(1, incident.selling, incident.buying)) {
    report.is_fully_substitutable = false;
    report.witness = std::move(w);
    return report;
  }
  if (auto w = run(2, incident.buying, incident.selling)) {
    report.is_fully_substitutable = false;
    report.witness = std::move(w);
  }
  return report;
}

FsReport CheckFullSubstitutability(const Market& market, AgentIdx agent,
                                   std::span<const PriceRange> box, FsScan scan) {
  return CheckFullSubstitutability(market.valuation(agent), market.incident(agent), box, scan);
}

FsReport CheckFullSubstitutability(const Market& market, AgentIdx agent, PriceRange range,
                                   FsScan scan) {
  const std::vector<PriceRange> box(market.incident(agent).size(), range);
  return CheckFullSubstitutability(market, agent, box, scan);
}

}  // namespace tradenet
