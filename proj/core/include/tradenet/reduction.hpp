#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tradenet/dynamics.hpp"
#include "tradenet/market.hpp"

namespace tradenet {

// Two non-empty, disjoint agent sets covering the market.
struct AgentPartition {
  std::vector<AgentIdx> j1;
  std::vector<AgentIdx> j2;

  // Partition with j1 = agents whose bit is set in `mask`.
  static AgentPartition FromMask(std::size_t num_agents, std::uint64_t mask);
  const std::vector<AgentIdx>& side(int k) const { return k == 1 ? j1 : j2; }
};

// Throws DomainError unless the partition is valid for `market`.
void ValidatePartition(const Market& market, const AgentPartition& partition);
// Trades with one endpoint in each side, ascending.
std::vector<TradeIdx> CrossTrades(const Market& market, const AgentPartition& partition);

// A market derived from another one. Constructed tables are shifted so that
// the empty bundle is worth 0; `offsets[i]` holds the unshifted value of the
// empty bundle for derived agent i (0 for agents whose valuation is kept).
struct DerivedMarket {
  Market market;
  std::vector<TradeIdx> trade_map;  // derived trade -> source trade
  std::vector<std::int64_t> offsets;

  // Unshifted valuation of the derived agent.
  ExtValue RawValue(AgentIdx agent, BundleMask bundle) const;
};

struct RestrictedMarket : DerivedMarket {
  std::vector<AgentIdx> agent_map;  // derived agent -> source agent
};

struct MergedMarket : DerivedMarket {
  AgentPartition partition;  // derived agent 0 merges j1, agent 1 merges j2
};

// The market over `subset` (any order, no duplicates) and its internal trades.
// Agents with external trades get a table valuation that lets them trade those
// at the frozen counterpart offers of `offers`; their tables carry an explicit
// tie-break order chosen so that they demand exactly the internal part of what
// they would demand in the source market. Other agents keep their valuation.
// Throws CapacityError for agents above kMaxIncidentTrades incident trades.
RestrictedMarket RestrictMarket(const Market& market, std::span<const AgentIdx> subset,
                                const OfferState& offers);
// Offers on internal trades and U restricted to the subset.
OfferState RestrictState(const RestrictedMarket& restricted, const OfferState& state);

inline constexpr std::size_t kMaxMergeCrossTrades = 12;
inline constexpr std::size_t kMaxMergeEnumerationBits = 22;

// Two-agent market over the cross trades in which each side acts as one agent
// that conducts its internal trades for free. Ties between bundles of cross
// trades are broken by the source trade order: among maximizing internal sets,
// the union with the lexicographically smallest source-order mask ranks the
// bundle. Throws CapacityError above kMaxMergeCrossTrades cross trades or
// when a side needs more than 2^kMaxMergeEnumerationBits evaluations.
MergedMarket MergeMarket(const Market& market, const AgentPartition& partition);
// Cross-trade offers copied over; merged agent k is unsatisfied iff some agent
// of side k is.
OfferState MergeState(const MergedMarket& merged, const OfferState& state);

struct LemmaReport {
  bool holds = true;
  std::vector<std::string> diffs;
};

// Replays `sequence` (source agent positions, all inside `subset`) from
// `state` in the source market and in RestrictMarket(subset, state), and
// compares internal-trade offers and the satisfied members of the subset after
// every step. PreconditionError if the sequence leaves the subset.
LemmaReport VerifyRestrictionLemma(const Market& market, std::span<const AgentIdx> subset,
                                   const OfferState& state,
                                   std::span<const AgentIdx> sequence);

// Replays `phase` (agents of side k only) from `state` in the source market;
// every side-k agent must be satisfied afterwards, otherwise
// PreconditionError. Compares the cross-trade offers reached with those after
// one best response of merged agent k started from MergeState(state).
LemmaReport VerifyMergeLemma(const Market& market, const AgentPartition& partition, int k,
                             const OfferState& state, std::span<const AgentIdx> phase);
// Same against a caller-supplied merged market.
LemmaReport VerifyMergeLemma(const Market& market, const MergedMarket& merged, int k,
                             const OfferState& state, std::span<const AgentIdx> phase);

}  // namespace tradenet
