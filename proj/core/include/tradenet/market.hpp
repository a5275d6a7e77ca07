#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tradenet/valuation.hpp"

namespace tradenet {

enum class Role { kBuyer, kSeller, kIntermediary, kGeneric };

const char* RoleName(Role role);
std::optional<Role> ParseRole(std::string_view name);

struct Agent {
  std::int64_t id = 0;
  std::string name;
  Role role = Role::kGeneric;
  friend bool operator==(const Agent&, const Agent&) = default;
};

// A bilateral trade: an arc from `seller` to `buyer`. Endpoints are agent
// positions in the owning Market.
struct Trade {
  std::int64_t id = 0;
  std::string name;
  AgentIdx buyer = 0;
  AgentIdx seller = 0;
  friend bool operator==(const Trade&, const Trade&) = default;
};

// A market (agents, trades, valuations). Agents and trades are addressed by
// position; `id` fields are the external identifiers used in files.
// Construction never throws: structural problems are reported by
// ValidateMarket, and incidence only lists trades with valid, distinct
// endpoints.
class Market {
 public:
  Market() = default;
  Market(std::vector<Agent> agents, std::vector<Trade> trades,
         std::vector<Valuation> valuations);

  std::size_t num_agents() const { return agents_.size(); }
  std::size_t num_trades() const { return trades_.size(); }
  const std::vector<Agent>& agents() const { return agents_; }
  const std::vector<Trade>& trades() const { return trades_; }
  const Agent& agent(AgentIdx i) const { return agents_[i]; }
  const Trade& trade(TradeIdx t) const { return trades_[t]; }
  const std::vector<Valuation>& valuations() const { return valuations_; }
  const Valuation& valuation(AgentIdx i) const { return valuations_[i]; }
  const IncidentTrades& incident(AgentIdx i) const { return incident_[i]; }

  // +1 if i buys t, -1 if i sells t, 0 otherwise.
  int Chi(AgentIdx i, TradeIdx t) const;
  // The other endpoint of t. i must be an endpoint.
  AgentIdx Counterpart(TradeIdx t, AgentIdx i) const;
  // Position of t among i's incident trades.
  std::optional<std::size_t> LocalIndex(AgentIdx i, TradeIdx t) const;

  // Bundle conversions; BundleFromTrades throws DomainError on a trade the
  // agent is not party to.
  BundleMask BundleFromTrades(AgentIdx i, std::span<const TradeIdx> trades) const;
  std::vector<TradeIdx> TradesInBundle(AgentIdx i, BundleMask bundle) const;
  // Psi_{i<-} and Psi_{i->} views of a bundle.
  BundleMask BuyingPart(AgentIdx i, BundleMask b) const { return b & incident_[i].buying; }
  BundleMask SellingPart(AgentIdx i, BundleMask b) const { return b & incident_[i].selling; }

  std::optional<AgentIdx> FindAgent(std::int64_t id) const;
  std::optional<TradeIdx> FindTrade(std::int64_t id) const;

  // Copy with one agent's valuation replaced.
  Market WithValuation(AgentIdx i, Valuation valuation) const;

  friend bool operator==(const Market& a, const Market& b) {
    return a.agents_ == b.agents_ && a.trades_ == b.trades_ &&
           a.valuations_ == b.valuations_;
  }

 private:
  void BuildIncidence();

  std::vector<Agent> agents_;
  std::vector<Trade> trades_;
  std::vector<Valuation> valuations_;
  std::vector<IncidentTrades> incident_;
};

struct Violation {
  std::string subject;  // e.g. "trade 3", "agent 1"
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

// Empty iff every Market and Valuation invariant holds.
std::vector<Violation> ValidateMarket(const Market& market);

// Upper bound V on |v^i(bundle)| over all feasible bundles of all agents and
// on |offer| over `initial_offers`. Infeasible bundles are ignored.
std::int64_t ValueBound(const Market& market, std::span<const Price> initial_offers = {});

}  // namespace tradenet
