#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "tradenet/dynamics.hpp"
#include "tradenet/market.hpp"
#include "tradenet/sparsity.hpp"

namespace tradenet {

// Buyers and sellers; each buyer-seller pair trades with probability r.
struct BsTopology {
  std::size_t buyers = 1;
  std::size_t sellers = 1;
  double r = 1.0;
};

// Buyers and sellers reach each other only through intermediaries; each
// seller-intermediary and intermediary-buyer pair trades with probability r.
struct BisTopology {
  std::size_t buyers = 1;
  std::size_t sellers = 1;
  std::size_t intermediaries = 1;
  double r = 1.0;
};

// G(n, lambda / n), largest component; leaves become buyers or sellers.
struct GeneralTopology {
  std::size_t n = 2;
  double lambda = 1.0;
};

struct TopologyConfig {
  std::variant<BsTopology, BisTopology, GeneralTopology> kind = BsTopology{};
  std::uint64_t seed = 0;
};

// DomainError on non-positive counts, r outside [0, 1] or lambda <= 0.
void ValidateTopology(const TopologyConfig& config);

// Agents with roles and trades; valuations come later.
struct MarketSkeleton {
  std::vector<Agent> agents;
  std::vector<Trade> trades;
};

MarketSkeleton GenerateBs(const BsTopology& config, Rng& rng);
MarketSkeleton GenerateBis(const BisTopology& config, Rng& rng);
MarketSkeleton GenerateGeneral(const GeneralTopology& config, Rng& rng);
// Dispatches on the kind, seeding a fresh generator from config.seed.
MarketSkeleton Generate(const TopologyConfig& config);
MarketSkeleton Generate(const TopologyConfig& config, Rng& rng);

// Vertices of the largest connected component, ascending. Ties go to the
// component holding the lowest vertex id.
std::vector<std::size_t> LargestComponent(const Multigraph& graph);
// Roles and trades for a connected simple graph: degree-1 vertices become
// buyers or sellers with equal probability, the rest intermediaries. Two
// intermediaries trade in both directions; a leaf trades once, towards a
// buyer or away from a seller. Two adjacent leaves of the same role cannot
// trade and get no trade.
MarketSkeleton BuildGeneralMarket(const Multigraph& graph, Rng& rng);

// Inclusive integer range C from which scalar values are drawn.
struct ValueSet {
  std::int64_t lo = 1;
  std::int64_t hi = 100;
};

// Buyers get UnitBuyer(c), sellers UnitSeller(c) with c uniform on C (drawn in
// agent order), intermediaries the flow-balance valuation. DomainError for a
// buyer with selling trades, a seller with buying trades, or a generic role.
Market AssignValuations(const MarketSkeleton& skeleton, ValueSet values, Rng& rng);

}  // namespace tradenet
