#include "tradenet/market.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <string>

#include "tradenet/errors.hpp"

namespace tradenet {

const char* RoleName(Role role) {
  switch (role) {
    case Role::kBuyer:
      return "buyer";
    case Role::kSeller:
      return "seller";
    case Role::kIntermediary:
      return "intermediary";
    case Role::kGeneric:
      return "generic";
  }
  return "generic";
}

std::optional<Role> ParseRole(std::string_view name) {
  if (name == "buyer") return Role::kBuyer;
  if (name == "seller") return Role::kSeller;
  if (name == "intermediary") return Role::kIntermediary;
  if (name == "generic") return Role::kGeneric;
  return std::nullopt;
}

Market::Market(std::vector<Agent> agents, std::vector<Trade> trades,
               std::vector<Valuation> valuations)
    : agents_(std::move(agents)),
      trades_(std::move(trades)),
      valuations_(std::move(valuations)) {
  BuildIncidence();
}

void Market::BuildIncidence() {
  incident_.assign(agents_.size(), IncidentTrades{});
  const std::size_t n = agents_.size();
  for (TradeIdx t = 0; t < trades_.size(); ++t) {
    const Trade& tr = trades_[t];
    if (tr.buyer >= n || tr.seller >= n || tr.buyer == tr.seller) continue;
    for (const auto& [agent, chi] : {std::pair{tr.buyer, 1}, std::pair{tr.seller, -1}}) {
      IncidentTrades& inc = incident_[agent];
      if (inc.trades.size() < 32) {
        const BundleMask bit = 1U << inc.trades.size();
        (chi > 0 ? inc.buying : inc.selling) |= bit;
      }
      inc.trades.push_back(t);
      inc.chi.push_back(chi);
    }
  }
}

int Market::Chi(AgentIdx i, TradeIdx t) const {
  const Trade& tr = trades_[t];
  if (tr.buyer == tr.seller) return 0;
  if (tr.buyer == i) return 1;
  if (tr.seller == i) return -1;
  return 0;
}

AgentIdx Market::Counterpart(TradeIdx t, AgentIdx i) const {
  const Trade& tr = trades_[t];
  return tr.buyer == i ? tr.seller : tr.buyer;
}

std::optional<std::size_t> Market::LocalIndex(AgentIdx i, TradeIdx t) const {
  const auto& trades = incident_[i].trades;
  const auto it = std::lower_bound(trades.begin(), trades.end(), t);
  if (it == trades.end() || *it != t) return std::nullopt;
  return static_cast<std::size_t>(it - trades.begin());
}

BundleMask Market::BundleFromTrades(AgentIdx i, std::span<const TradeIdx> trades) const {
  BundleMask mask = 0;
  for (TradeIdx t : trades) {
    const auto k = LocalIndex(i, t);
    if (!k) {
      throw DomainError("trade " + std::to_string(t < trades_.size() ? trades_[t].id : t) +
                        " is not incident to agent " + std::to_string(agents_[i].id));
    }
    if (*k >= kMaxIncidentTrades) throw CapacityError("too many incident trades for a bundle mask");
    mask |= 1U << *k;
  }
  return mask;
}

std::vector<TradeIdx> Market::TradesInBundle(AgentIdx i, BundleMask bundle) const {
  std::vector<TradeIdx> out;
  const auto& trades = incident_[i].trades;
  for (std::size_t k = 0; k < trades.size() && k < 32; ++k) {
    if (bundle & (1U << k)) out.push_back(trades[k]);
  }
  return out;
}

std::optional<AgentIdx> Market::FindAgent(std::int64_t id) const {
  for (AgentIdx i = 0; i < agents_.size(); ++i) {
    if (agents_[i].id == id) return i;
  }
  return std::nullopt;
}

std::optional<TradeIdx> Market::FindTrade(std::int64_t id) const {
  for (TradeIdx t = 0; t < trades_.size(); ++t) {
    if (trades_[t].id == id) return t;
  }
  return std::nullopt;
}

Market Market::WithValuation(AgentIdx i, Valuation valuation) const {
  Market copy = *this;
  copy.valuations_[i] = std::move(valuation);
  return copy;
}

std::vector<Violation> ValidateMarket(const Market& market) {
  std::vector<Violation> out;
  const auto agent_subject = [&](AgentIdx i) {
    return "agent " + std::to_string(market.agent(i).id);
  };

  std::set<std::int64_t> agent_ids;
  for (AgentIdx i = 0; i < market.num_agents(); ++i) {
    if (!agent_ids.insert(market.agent(i).id).second) {
      out.push_back({agent_subject(i), "duplicate agent id"});
    }
  }
  std::set<std::int64_t> trade_ids;
  for (TradeIdx t = 0; t < market.num_trades(); ++t) {
    const Trade& tr = market.trade(t);
    const std::string subject = "trade " + std::to_string(tr.id);
    if (!trade_ids.insert(tr.id).second) out.push_back({subject, "duplicate trade id"});
    if (tr.buyer >= market.num_agents() || tr.seller >= market.num_agents()) {
      out.push_back({subject, "endpoint is not an agent of the market"});
    } else if (tr.buyer == tr.seller) {
      out.push_back({subject, "buyer and seller are the same agent"});
    }
  }

  if (market.valuations().size() != market.num_agents()) {
    out.push_back({"market", "expected one valuation per agent, got " +
                                 std::to_string(market.valuations().size()) + " for " +
                                 std::to_string(market.num_agents()) + " agents"});
    return out;
  }

  for (AgentIdx i = 0; i < market.num_agents(); ++i) {
    const IncidentTrades& inc = market.incident(i);
    const Valuation& val = market.valuation(i);
    const std::string subject = agent_subject(i);
    const std::size_t k = inc.size();
    if (const auto* table = val.table()) {
      if (k > kMaxIncidentTrades) {
        out.push_back({subject, "table valuation over more than " +
                                    std::to_string(kMaxIncidentTrades) + " trades"});
        continue;
      }
      if (table->values.size() != (std::size_t{1} << k)) {
        out.push_back({subject, "table has " + std::to_string(table->values.size()) +
                                    " entries, expected " +
                                    std::to_string(std::size_t{1} << k)});
        continue;
      }
      if (table->values[0] != ExtValue(0)) {
        out.push_back({subject, "value of the empty bundle must be 0"});
      }
    } else if (std::holds_alternative<UnitBuyer>(val.kind()) && inc.selling != 0) {
      out.push_back({subject, "unit buyer has selling trades"});
    } else if (std::holds_alternative<UnitSeller>(val.kind()) && inc.buying != 0) {
      out.push_back({subject, "unit seller has buying trades"});
    }
    const TieBreak& tb = val.tie_break();
    if (tb.rule() == TieBreakRule::kExplicit && k <= kMaxIncidentTrades &&
        tb.ranks().size() != (std::size_t{1} << k)) {
      out.push_back({subject, "explicit tie-break order does not cover all bundles"});
    }
  }
  return out;
}

std::int64_t ValueBound(const Market& market, std::span<const Price> initial_offers) {
  std::int64_t v = 0;
  for (AgentIdx i = 0; i < market.num_agents(); ++i) {
    v = std::max(v, MaxAbsFiniteValue(market.valuation(i), market.incident(i)));
  }
  for (Price p : initial_offers) v = std::max<std::int64_t>(v, std::llabs(p));
  return v;
}

}  // namespace tradenet
