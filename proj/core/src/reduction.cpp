#include "tradenet/reduction.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "tradenet/errors.hpp"

namespace tradenet {
namespace {

// Best (value, tie key) seen for one derived bundle.
struct Best {
  ExtValue value = kNegInf;
  std::uint64_t key = std::numeric_limits<std::uint64_t>::max();

  void Offer(ExtValue v, std::uint64_t k) {
    if (v > value || (v == value && k < key)) {
      value = v;
      key = k;
    }
  }
};

// Shifts `best` so the empty bundle is worth 0 and orders bundles by key.
Valuation TableFromBest(const std::vector<Best>& best, std::int64_t& offset) {
  offset = best[0].value.is_finite() ? best[0].value.value() : 0;
  std::vector<ExtValue> values(best.size());
  for (std::size_t m = 0; m < best.size(); ++m) values[m] = best[m].value - offset;
  std::vector<BundleMask> order(best.size());
  std::iota(order.begin(), order.end(), BundleMask{0});
  std::sort(order.begin(), order.end(),
            [&](BundleMask a, BundleMask b) { return best[a].key < best[b].key; });
  return Valuation::Table(std::move(values), TieBreak::Explicit(order));
}

bool Endpoints(const Market& market, TradeIdx t) {
  const Trade& tr = market.trade(t);
  return tr.buyer < market.num_agents() && tr.seller < market.num_agents() &&
         tr.buyer != tr.seller;
}

std::string TradeLabel(const Market& market, TradeIdx t) {
  return "trade " + std::to_string(market.trade(t).id);
}

}  // namespace

AgentPartition AgentPartition::FromMask(std::size_t num_agents, std::uint64_t mask) {
  AgentPartition p;
  for (AgentIdx i = 0; i < num_agents; ++i) {
    ((mask >> i) & 1 ? p.j1 : p.j2).push_back(i);
  }
  return p;
}

void ValidatePartition(const Market& market, const AgentPartition& partition) {
  if (partition.j1.empty() || partition.j2.empty()) {
    throw DomainError("partition sides must be non-empty");
  }
  std::vector<int> seen(market.num_agents(), 0);
  for (const auto* side : {&partition.j1, &partition.j2}) {
    for (AgentIdx i : *side) {
      if (i >= market.num_agents()) throw DomainError("partition names an unknown agent");
      if (seen[i]++) throw DomainError("partition sides overlap");
    }
  }
  for (AgentIdx i = 0; i < market.num_agents(); ++i) {
    if (!seen[i]) {
      throw DomainError("agent " + std::to_string(market.agent(i).id) +
                        " is missing from the partition");
    }
  }
}

std::vector<TradeIdx> CrossTrades(const Market& market, const AgentPartition& partition) {
  std::vector<char> in_j1(market.num_agents(), 0);
  for (AgentIdx i : partition.j1) in_j1[i] = 1;
  std::vector<TradeIdx> out;
  for (TradeIdx t = 0; t < market.num_trades(); ++t) {
    if (!Endpoints(market, t)) continue;
    const Trade& tr = market.trade(t);
    if (in_j1[tr.buyer] != in_j1[tr.seller]) out.push_back(t);
  }
  return out;
}

ExtValue DerivedMarket::RawValue(AgentIdx agent, BundleMask bundle) const {
  return Evaluate(market.valuation(agent), bundle, market.incident(agent)) + offsets[agent];
}

RestrictedMarket RestrictMarket(const Market& market, std::span<const AgentIdx> subset,
                                const OfferState& offers) {
  if (subset.empty()) throw DomainError("restriction needs a non-empty agent set");
  std::vector<AgentIdx> agents(subset.begin(), subset.end());
  std::sort(agents.begin(), agents.end());
  if (std::adjacent_find(agents.begin(), agents.end()) != agents.end()) {
    throw DomainError("restriction agent set has duplicates");
  }
  if (agents.back() >= market.num_agents()) {
    throw DomainError("restriction names an unknown agent");
  }
  if (offers.num_trades() != market.num_trades()) {
    throw DomainError("offer state does not match the market");
  }

  constexpr AgentIdx kOutside = std::numeric_limits<AgentIdx>::max();
  std::vector<AgentIdx> new_agent(market.num_agents(), kOutside);
  for (AgentIdx a = 0; a < agents.size(); ++a) new_agent[agents[a]] = a;

  RestrictedMarket out;
  out.agent_map = agents;
  std::vector<Trade> trades;
  for (TradeIdx t = 0; t < market.num_trades(); ++t) {
    if (!Endpoints(market, t)) continue;
    Trade tr = market.trade(t);
    if (new_agent[tr.buyer] == kOutside || new_agent[tr.seller] == kOutside) continue;
    tr.buyer = new_agent[tr.buyer];
    tr.seller = new_agent[tr.seller];
    trades.push_back(std::move(tr));
    out.trade_map.push_back(t);
  }

  std::vector<Agent> new_agents;
  std::vector<Valuation> valuations;
  out.offsets.assign(agents.size(), 0);
  for (AgentIdx a = 0; a < agents.size(); ++a) {
    const AgentIdx src = agents[a];
    new_agents.push_back(market.agent(src));
    const IncidentTrades& inc = market.incident(src);
    const std::size_t k = inc.size();

    // Internal incident trades keep their relative order, so internal local
    // index j maps to restricted local bit internal_bit[j].
    std::vector<int> internal_bit(k, -1);
    std::vector<Price> frozen(k, 0);
    int internal_count = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const AgentIdx other = market.Counterpart(inc.trades[j], src);
      if (new_agent[other] != kOutside) {
        internal_bit[j] = internal_count++;
      } else {
        frozen[j] = offers.offer(inc.trades[j], inc.chi[j] > 0 ? Side::kSeller : Side::kBuyer);
      }
    }
    if (internal_count == static_cast<int>(k)) {
      valuations.push_back(market.valuation(src));
      continue;
    }
    if (k > kMaxIncidentTrades) {
      throw CapacityError("agent " + std::to_string(market.agent(src).id) + " has " +
                          std::to_string(k) + " incident trades, limit is " +
                          std::to_string(kMaxIncidentTrades));
    }

    const Valuation& val = market.valuation(src);
    std::vector<Best> best(std::size_t{1} << internal_count);
    const BundleMask full = inc.full_mask();
    for (BundleMask m = 0;; ++m) {
      ExtValue u = EvaluateUnchecked(val, m, inc);
      BundleMask phi = 0;
      if (u.is_finite()) {
        std::int64_t pay = 0;
        for (std::size_t j = 0; j < k; ++j) {
          if (!(m & (1U << j))) continue;
          if (internal_bit[j] >= 0) {
            phi |= 1U << internal_bit[j];
          } else {
            pay += inc.chi[j] * frozen[j];
          }
        }
        u = u - pay;
      } else {
        for (std::size_t j = 0; j < k; ++j) {
          if ((m & (1U << j)) && internal_bit[j] >= 0) phi |= 1U << internal_bit[j];
        }
      }
      best[phi].Offer(u, val.tie_break().Key(m, k));
      if (m == full) break;
    }
    valuations.push_back(TableFromBest(best, out.offsets[a]));
  }
  out.market = Market(std::move(new_agents), std::move(trades), std::move(valuations));
  return out;
}

OfferState RestrictState(const RestrictedMarket& restricted, const OfferState& state) {
  OfferState out(restricted.trade_map.size(), restricted.agent_map.size(), state.epsilon());
  for (TradeIdx d = 0; d < restricted.trade_map.size(); ++d) {
    const TradeIdx src = restricted.trade_map[d];
    out.set_offer(d, Side::kBuyer, state.offer(src, Side::kBuyer));
    out.set_offer(d, Side::kSeller, state.offer(src, Side::kSeller));
  }
  for (AgentIdx a = 0; a < restricted.agent_map.size(); ++a) {
    if (state.is_unsatisfied(restricted.agent_map[a])) out.MarkUnsatisfied(a);
  }
  return out;
}

MergedMarket MergeMarket(const Market& market, const AgentPartition& partition) {
  ValidatePartition(market, partition);
  const std::vector<TradeIdx> cross = CrossTrades(market, partition);
  if (cross.size() > kMaxMergeCrossTrades) {
    throw CapacityError("merge supports at most " + std::to_string(kMaxMergeCrossTrades) +
                        " cross trades, partition has " + std::to_string(cross.size()));
  }
  std::vector<int> side_of(market.num_agents(), 0);
  for (AgentIdx i : partition.j2) side_of[i] = 1;

  MergedMarket out;
  out.partition = partition;
  out.trade_map = cross;
  out.offsets.assign(2, 0);

  std::vector<Valuation> valuations;
  for (int k = 0; k < 2; ++k) {
    const std::vector<AgentIdx>& members = partition.side(k + 1);
    // Cross trades first (derived bit = cross position), then internal ones;
    // `order_bit` re-ranks both by source trade order for tie keys.
    std::vector<TradeIdx> combined = cross;
    for (TradeIdx t = 0; t < market.num_trades(); ++t) {
      if (!Endpoints(market, t)) continue;
      const Trade& tr = market.trade(t);
      if (side_of[tr.buyer] == k && side_of[tr.seller] == k) combined.push_back(t);
    }
    const std::size_t bits = combined.size();
    if (bits > kMaxMergeEnumerationBits) {
      throw CapacityError("merged side " + std::to_string(k + 1) + " has " +
                          std::to_string(bits) + " trades to enumerate, limit is " +
                          std::to_string(kMaxMergeEnumerationBits));
    }
    std::vector<std::size_t> by_source(bits);
    std::iota(by_source.begin(), by_source.end(), std::size_t{0});
    std::sort(by_source.begin(), by_source.end(),
              [&](std::size_t a, std::size_t b) { return combined[a] < combined[b]; });
    std::vector<int> order_bit(bits);
    for (std::size_t r = 0; r < bits; ++r) order_bit[by_source[r]] = static_cast<int>(r);

    // For each member, the combined bit of each of its incident trades.
    std::vector<std::vector<int>> member_bits;
    for (AgentIdx i : members) {
      const IncidentTrades& inc = market.incident(i);
      std::vector<int> b(inc.size());
      for (std::size_t j = 0; j < inc.size(); ++j) {
        b[j] = static_cast<int>(std::find(combined.begin(), combined.end(), inc.trades[j]) -
                                combined.begin());
      }
      member_bits.push_back(std::move(b));
    }

    const BundleMask cross_mask = static_cast<BundleMask>((1ULL << cross.size()) - 1);
    std::vector<Best> best(std::size_t{1} << cross.size());
    const std::uint64_t count = std::uint64_t{1} << bits;
    for (std::uint64_t c = 0; c < count; ++c) {
      ExtValue total = 0;
      for (std::size_t a = 0; a < members.size() && total.is_finite(); ++a) {
        BundleMask local = 0;
        const auto& b = member_bits[a];
        for (std::size_t j = 0; j < b.size(); ++j) {
          if ((c >> b[j]) & 1) local |= 1U << j;
        }
        const AgentIdx i = members[a];
        const ExtValue v = EvaluateUnchecked(market.valuation(i), local, market.incident(i));
        total = v.is_finite() ? total + v.value() : kNegInf;
      }
      std::uint64_t key = 0;
      for (std::size_t j = 0; j < bits; ++j) {
        if ((c >> j) & 1) key |= std::uint64_t{1} << order_bit[j];
      }
      best[static_cast<BundleMask>(c) & cross_mask].Offer(total, key);
    }
    valuations.push_back(TableFromBest(best, out.offsets[k]));
  }

  std::vector<Agent> agents = {{1, "J1", Role::kGeneric}, {2, "J2", Role::kGeneric}};
  std::vector<Trade> trades;
  for (TradeIdx t : cross) {
    Trade tr = market.trade(t);
    tr.buyer = static_cast<AgentIdx>(side_of[tr.buyer]);
    tr.seller = static_cast<AgentIdx>(side_of[tr.seller]);
    trades.push_back(std::move(tr));
  }
  out.market = Market(std::move(agents), std::move(trades), std::move(valuations));
  return out;
}

OfferState MergeState(const MergedMarket& merged, const OfferState& state) {
  OfferState out(merged.trade_map.size(), 2, state.epsilon());
  for (TradeIdx d = 0; d < merged.trade_map.size(); ++d) {
    const TradeIdx src = merged.trade_map[d];
    out.set_offer(d, Side::kBuyer, state.offer(src, Side::kBuyer));
    out.set_offer(d, Side::kSeller, state.offer(src, Side::kSeller));
  }
  for (int k = 0; k < 2; ++k) {
    for (AgentIdx i : merged.partition.side(k + 1)) {
      if (state.is_unsatisfied(i)) {
        out.MarkUnsatisfied(static_cast<AgentIdx>(k));
        break;
      }
    }
  }
  return out;
}

namespace {

constexpr std::size_t kMaxDiffs = 32;

void AddDiff(LemmaReport& report, std::string diff) {
  report.holds = false;
  if (report.diffs.size() < kMaxDiffs) report.diffs.push_back(std::move(diff));
}

void CompareOffers(LemmaReport& report, const std::string& where, const Market& market,
                   TradeIdx src, const OfferState& a, TradeIdx ta, const OfferState& b,
                   TradeIdx tb) {
  for (Side side : {Side::kBuyer, Side::kSeller}) {
    const Price x = a.offer(ta, side);
    const Price y = b.offer(tb, side);
    if (x != y) {
      AddDiff(report, where + TradeLabel(market, src) +
                          (side == Side::kBuyer ? " buyer" : " seller") + " offer " +
                          std::to_string(x) + " in source market, " + std::to_string(y) +
                          " in derived market");
    }
  }
}

}  // namespace

LemmaReport VerifyRestrictionLemma(const Market& market, std::span<const AgentIdx> subset,
                                   const OfferState& state,
                                   std::span<const AgentIdx> sequence) {
  const RestrictedMarket restricted = RestrictMarket(market, subset, state);
  std::vector<AgentIdx> local(market.num_agents(), std::numeric_limits<AgentIdx>::max());
  for (AgentIdx a = 0; a < restricted.agent_map.size(); ++a) local[restricted.agent_map[a]] = a;
  std::vector<AgentIdx> mapped;
  for (AgentIdx i : sequence) {
    if (i >= market.num_agents() || local[i] == std::numeric_limits<AgentIdx>::max()) {
      throw PreconditionError("sequence agent " + std::to_string(i) +
                              " is outside the restricted set");
    }
    mapped.push_back(local[i]);
  }

  std::vector<OfferState> source_states;
  std::vector<OfferState> restricted_states;
  RunOptions options;
  options.record_steps = false;
  options.observer = [&](const OfferState& s, const TraceStep&) { source_states.push_back(s); };
  RunDeterministic(market, state, sequence, /*repeat=*/false, options);
  options.observer = [&](const OfferState& s, const TraceStep&) {
    restricted_states.push_back(s);
  };
  RunDeterministic(restricted.market, RestrictState(restricted, state), mapped,
                   /*repeat=*/false, options);

  LemmaReport report;
  for (std::size_t step = 0; step < source_states.size(); ++step) {
    const std::string where = "step " + std::to_string(step + 1) + ": ";
    const OfferState& a = source_states[step];
    const OfferState& b = restricted_states[step];
    for (TradeIdx d = 0; d < restricted.trade_map.size(); ++d) {
      const TradeIdx src = restricted.trade_map[d];
      CompareOffers(report, where, market, src, a, src, b, d);
    }
    for (AgentIdx r = 0; r < restricted.agent_map.size(); ++r) {
      const AgentIdx src = restricted.agent_map[r];
      if (a.is_unsatisfied(src) != b.is_unsatisfied(r)) {
        AddDiff(report, where + "agent " + std::to_string(market.agent(src).id) +
                            (a.is_unsatisfied(src) ? " unsatisfied" : " satisfied") +
                            " in source market only");
      }
    }
  }
  return report;
}

LemmaReport VerifyMergeLemma(const Market& market, const AgentPartition& partition, int k,
                             const OfferState& state, std::span<const AgentIdx> phase) {
  return VerifyMergeLemma(market, MergeMarket(market, partition), k, state, phase);
}

LemmaReport VerifyMergeLemma(const Market& market, const MergedMarket& merged, int k,
                             const OfferState& state, std::span<const AgentIdx> phase) {
  if (k != 1 && k != 2) throw DomainError("merged agent must be 1 or 2");
  const std::vector<AgentIdx>& side = merged.partition.side(k);
  for (AgentIdx i : phase) {
    if (std::find(side.begin(), side.end(), i) == side.end()) {
      throw PreconditionError("phase agent " + std::to_string(i) + " is not on side " +
                              std::to_string(k));
    }
  }
  RunOptions options;
  options.record_steps = false;
  const RunResult source = RunDeterministic(market, state, phase, /*repeat=*/false, options);
  for (AgentIdx i : side) {
    if (source.final_state.is_unsatisfied(i)) {
      throw PreconditionError("phase leaves agent " + std::to_string(market.agent(i).id) +
                              " of side " + std::to_string(k) + " unsatisfied");
    }
  }

  OfferState merged_state = MergeState(merged, state);
  const BestResponse br =
      ComputeBestResponse(merged.market, merged_state, static_cast<AgentIdx>(k - 1));
  ApplyBestResponse(merged.market, merged_state, br);

  LemmaReport report;
  for (TradeIdx d = 0; d < merged.trade_map.size(); ++d) {
    const TradeIdx src = merged.trade_map[d];
    CompareOffers(report, "", market, src, source.final_state, src, merged_state, d);
  }
  return report;
}

}  // namespace tradenet
