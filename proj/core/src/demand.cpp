#include "tradenet/demand.hpp"

#include <bit>
#include <string>

#include "tradenet/errors.hpp"

namespace tradenet {
namespace {

void CheckPrices(const IncidentTrades& incident, std::span<const Price> prices) {
  if (prices.size() != incident.size()) {
    throw DomainError("price vector has " + std::to_string(prices.size()) +
                      " entries for " + std::to_string(incident.size()) +
                      " incident trades");
  }
}

}  // namespace

PriceVector PricesFromMap(const Market& market, AgentIdx agent,
                          const std::map<TradeIdx, Price>& prices) {
  const IncidentTrades& inc = market.incident(agent);
  PriceVector out;
  out.reserve(inc.size());
  for (TradeIdx t : inc.trades) {
    const auto it = prices.find(t);
    if (it == prices.end()) {
      throw DomainError("missing price for trade " + std::to_string(market.trade(t).id));
    }
    out.push_back(it->second);
  }
  return out;
}

ExtValue Utility(const Valuation& valuation, const IncidentTrades& incident,
                 BundleMask bundle, std::span<const Price> prices) {
  CheckPrices(incident, prices);
  ExtValue u = Evaluate(valuation, bundle, incident);
  if (u.is_neg_inf()) return u;
  std::int64_t pay = 0;
  for (std::size_t k = 0; k < incident.size(); ++k) {
    if (bundle & (1U << k)) pay += incident.chi[k] * prices[k];
  }
  return u - pay;
}

ExtValue Utility(const Market& market, AgentIdx agent, BundleMask bundle,
                 std::span<const Price> prices) {
  return Utility(market.valuation(agent), market.incident(agent), bundle, prices);
}

BundleMask Demand(const Valuation& valuation, const IncidentTrades& incident,
                  std::span<const Price> prices) {
  const std::size_t k = incident.size();
  if (k > kMaxIncidentTrades) {
    throw CapacityError("demand enumeration supports at most " +
                        std::to_string(kMaxIncidentTrades) + " incident trades, agent has " +
                        std::to_string(k));
  }
  CheckPrices(incident, prices);
  if (const auto* table = valuation.table();
      table && table->values.size() != (std::size_t{1} << k)) {
    throw DomainError("table valuation does not cover all 2^k bundles");
  }
  const TieBreak& tie = valuation.tie_break();

  // Gray-code walk: one trade enters or leaves per step, so the payment sum
  // updates in O(1).
  BundleMask best = 0;
  ExtValue best_u = EvaluateUnchecked(valuation, 0, incident);
  std::uint64_t best_key = tie.Key(0, k);
  std::int64_t pay = 0;
  BundleMask mask = 0;
  const std::uint64_t n = std::uint64_t{1} << k;
  for (std::uint64_t i = 1; i < n; ++i) {
    const int bit = std::countr_zero(i);
    const BundleMask flip = 1U << bit;
    const std::int64_t delta = incident.chi[bit] * prices[bit];
    if (mask & flip) {
      pay -= delta;
    } else {
      pay += delta;
    }
    mask ^= flip;
    const ExtValue u = EvaluateUnchecked(valuation, mask, incident) - pay;
    if (u < best_u) continue;
    if (u == best_u) {
      const std::uint64_t key = tie.Key(mask, k);
      if (key >= best_key) continue;
      best_key = key;
    } else {
      best_key = tie.Key(mask, k);
    }
    best = mask;
    best_u = u;
  }
  return best;
}

BundleMask Demand(const Market& market, AgentIdx agent, std::span<const Price> prices) {
  return Demand(market.valuation(agent), market.incident(agent), prices);
}

}  // namespace tradenet
