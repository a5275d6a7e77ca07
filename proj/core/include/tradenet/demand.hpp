#pragma once

#include <map>
#include <span>
#include <vector>

#include "tradenet/market.hpp"

namespace tradenet {

// Prices an agent faces, aligned with its incident trades (entry k prices the
// k-th incident trade).
using PriceVector = std::vector<Price>;

// Builds an agent's price vector from a trade -> price map. Throws
// DomainError naming the first incident trade without a price.
PriceVector PricesFromMap(const Market& market, AgentIdx agent,
                          const std::map<TradeIdx, Price>& prices);

// u(bundle, p) = v(bundle) - sum_k chi_k p_k. Infeasible bundles stay -inf.
ExtValue Utility(const Valuation& valuation, const IncidentTrades& incident,
                 BundleMask bundle, std::span<const Price> prices);
ExtValue Utility(const Market& market, AgentIdx agent, BundleMask bundle,
                 std::span<const Price> prices);

// The unique utility-maximising bundle at `prices`: maximal utility, then
// lowest tie-break key. Exhaustive over all 2^k bundles; throws
// CapacityError above kMaxIncidentTrades incident trades.
BundleMask Demand(const Valuation& valuation, const IncidentTrades& incident,
                  std::span<const Price> prices);
BundleMask Demand(const Market& market, AgentIdx agent, std::span<const Price> prices);

}  // namespace tradenet
