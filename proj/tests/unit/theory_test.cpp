#include <gtest/gtest.h>

#include <algorithm>

#include "example_markets.hpp"
#include "random_markets.hpp"
#include "tradenet/ar_rows.hpp"
#include "tradenet/errors.hpp"
#include "tradenet/phases.hpp"
#include "tradenet/reduction.hpp"
#include "tradenet/sparsity.hpp"
#include "tradenet/substitutes.hpp"

namespace tradenet {
namespace {

using testing::Chain;
using testing::Example2Market;

// v-hat of a boundary agent straight from its definition: best value over
// external subsets at frozen counterpart offers.
ExtValue OracleRestricted(const Market& m, AgentIdx i, const std::vector<char>& in_j,
                          const OfferState& s, const std::vector<TradeIdx>& phi) {
  const IncidentTrades& inc = m.incident(i);
  std::vector<std::size_t> ext;
  BundleMask base = 0;
  for (std::size_t j = 0; j < inc.size(); ++j) {
    const TradeIdx t = inc.trades[j];
    if (!in_j[m.Counterpart(t, i)]) {
      ext.push_back(j);
    } else if (std::find(phi.begin(), phi.end(), t) != phi.end()) {
      base |= 1U << j;
    }
  }
  ExtValue best = kNegInf;
  for (std::uint32_t e = 0; e < (1U << ext.size()); ++e) {
    BundleMask b = base;
    std::int64_t pay = 0;
    for (std::size_t x = 0; x < ext.size(); ++x) {
      if (!(e >> x & 1)) continue;
      const std::size_t j = ext[x];
      b |= 1U << j;
      pay += inc.chi[j] * s.offer(inc.trades[j], inc.chi[j] > 0 ? Side::kSeller : Side::kBuyer);
    }
    const ExtValue v = Evaluate(m.valuation(i), b, inc) - pay;
    if (best < v) best = v;
  }
  return best;
}

// v-tilde of side k straight from its definition: best total member value
// over subsets of the side's internal trades.
ExtValue OracleMerged(const Market& m, const std::vector<AgentIdx>& side,
                      const std::vector<TradeIdx>& phi) {
  std::vector<char> in(m.num_agents(), 0);
  for (AgentIdx i : side) in[i] = 1;
  std::vector<TradeIdx> internal;
  for (TradeIdx t = 0; t < m.num_trades(); ++t) {
    if (in[m.trade(t).buyer] && in[m.trade(t).seller]) internal.push_back(t);
  }
  ExtValue best = kNegInf;
  for (std::uint32_t e = 0; e < (1U << internal.size()); ++e) {
    std::vector<TradeIdx> bundle = phi;
    for (std::size_t x = 0; x < internal.size(); ++x) {
      if (e >> x & 1) bundle.push_back(internal[x]);
    }
    ExtValue total = 0;
    for (AgentIdx i : side) {
      std::vector<TradeIdx> mine;
      for (TradeIdx t : bundle) {
        if (m.LocalIndex(i, t)) mine.push_back(t);
      }
      total += Evaluate(m.valuation(i), m.BundleFromTrades(i, mine), m.incident(i));
    }
    if (best < total) best = total;
  }
  return best;
}

std::vector<TradeIdx> Trades(const DerivedMarket& d, AgentIdx agent, BundleMask b) {
  std::vector<TradeIdx> out;
  for (TradeIdx t : d.market.TradesInBundle(agent, b)) out.push_back(d.trade_map[t]);
  return out;
}

TEST(RestrictMarket, AllAgentsIsIdentity) {
  const Market m = Chain(5, 10);
  Rng rng(0);
  const OfferState s = testing::RandomOffers(m, 10, rng);
  const std::vector<AgentIdx> all = {0, 1, 2};
  const RestrictedMarket r = RestrictMarket(m, all, s);
  EXPECT_EQ(r.market, m);
}

TEST(RestrictMarket, ChainBoundaryIntermediary) {
  const Market m = Chain(5, 10);
  OfferState s(2, 3);
  s.set_offer(0, Side::kSeller, 6);  // the frozen seller offer on s -> m
  const std::vector<AgentIdx> j = {1, 2};
  const RestrictedMarket r = RestrictMarket(m, j, s);
  ASSERT_EQ(r.market.num_trades(), 1U);
  EXPECT_EQ(r.trade_map[0], 1U);
  EXPECT_EQ(r.RawValue(0, 0b1), ExtValue(-6));
  EXPECT_EQ(r.RawValue(0, 0b0), ExtValue(0));
  // The buyer is internal and keeps its valuation.
  EXPECT_EQ(r.market.valuation(1), m.valuation(2));
}

TEST(RestrictMarket, UnprofitableExternalTradeLeavesValuation) {
  std::vector<Agent> agents = {
      {0, "b", Role::kBuyer}, {1, "s1", Role::kSeller}, {2, "s2", Role::kSeller}};
  const Market m(agents, {{0, "", 0, 1}, {1, "", 0, 2}},
                 {Valuation::Buyer(20), Valuation::Seller(3), Valuation::Seller(4)});
  OfferState s(2, 3);
  s.set_offer(1, Side::kSeller, 1000);
  const std::vector<AgentIdx> j = {0, 1};
  const RestrictedMarket r = RestrictMarket(m, j, s);
  std::vector<char> in_j = {1, 1, 0};
  for (BundleMask b = 0; b < 2; ++b) {
    const ExtValue oracle = OracleRestricted(m, 0, in_j, s, Trades(r, 0, b));
    EXPECT_EQ(r.RawValue(0, b), oracle);
    EXPECT_EQ(oracle, Evaluate(m.valuation(0), b, m.incident(0)));
  }
}

TEST(RestrictMarket, MatchesDefinitionOnRandomMarkets) {
  Rng rng(31);
  for (int rep = 0; rep < 100; ++rep) {
    const Market m = testing::RandomFsMarket(rng);
    const OfferState s = testing::RandomOffers(m, 12, rng);
    const std::vector<AgentIdx> j = testing::RandomSubset(m.num_agents(), rng);
    std::vector<char> in_j(m.num_agents(), 0);
    for (AgentIdx i : j) in_j[i] = 1;
    const RestrictedMarket r = RestrictMarket(m, j, s);
    for (AgentIdx a = 0; a < r.market.num_agents(); ++a) {
      const std::size_t k = r.market.incident(a).size();
      for (BundleMask b = 0; b < (1U << k); ++b) {
        EXPECT_EQ(r.RawValue(a, b), OracleRestricted(m, r.agent_map[a], in_j, s, Trades(r, a, b)));
      }
    }
  }
}

TEST(RestrictMarket, PreservesSubstitutability) {
  Rng rng(32);
  for (int rep = 0; rep < 60; ++rep) {
    const Market m = testing::RandomFsMarket(rng);
    const OfferState s = testing::RandomOffers(m, 10, rng);
    const std::vector<AgentIdx> j = testing::RandomSubset(m.num_agents(), rng);
    const RestrictedMarket r = RestrictMarket(m, j, s);
    for (AgentIdx a = 0; a < r.market.num_agents(); ++a) {
      EXPECT_TRUE(testing::PassesFs(r.market, a, ValueBound(r.market))) << rep << " agent " << a;
    }
  }
}

TEST(MergeMarket, SingletonsAreIsomorphic) {
  const Market m = Example2Market();
  const MergedMarket g = MergeMarket(m, AgentPartition{{0}, {1}});
  ASSERT_EQ(g.market.num_trades(), 2U);
  for (AgentIdx k = 0; k < 2; ++k) {
    for (BundleMask b = 0; b < 4; ++b) {
      EXPECT_EQ(g.RawValue(k, b), Evaluate(m.valuation(k), b, m.incident(k)));
    }
  }
  EXPECT_EQ(g.market.trade(0).buyer, 0U);
  EXPECT_EQ(g.market.trade(0).seller, 1U);
}

// Two sides of two agents each, joined by three cross trades.
Market ThreeCrossMarket() {
  std::vector<Agent> agents = {{0, "a", Role::kGeneric}, {1, "b", Role::kGeneric},
                               {2, "c", Role::kGeneric}, {3, "d", Role::kGeneric}};
  std::vector<Trade> trades = {{0, "int1", 1, 0}, {1, "omega", 2, 0}, {2, "phi", 3, 1},
                               {3, "psi", 1, 3},  {4, "int2", 2, 3}};
  return Market(agents, trades,
                {Valuation::Seller(2), Valuation::Flow(), Valuation::Buyer(9), Valuation::Flow()});
}

TEST(MergeMarket, ThreeCrossTrades) {
  const Market m = ThreeCrossMarket();
  ASSERT_TRUE(ValidateMarket(m).empty());
  const MergedMarket g = MergeMarket(m, AgentPartition{{0, 1}, {2, 3}});
  EXPECT_EQ(g.market.num_agents(), 2U);
  EXPECT_EQ(g.trade_map, (std::vector<TradeIdx>{1, 2, 3}));
  // omega: side 1 sells to side 2; phi: side 1 sells; psi: side 1 buys.
  EXPECT_EQ(g.market.trade(0).seller, 0U);
  EXPECT_EQ(g.market.trade(1).seller, 0U);
  EXPECT_EQ(g.market.trade(2).buyer, 0U);
}

TEST(MergeMarket, InternalPairSurplus) {
  std::vector<Agent> agents = {
      {0, "s", Role::kSeller}, {1, "b", Role::kBuyer}, {2, "x", Role::kBuyer}};
  const Market m(agents, {{0, "int", 1, 0}, {1, "cross", 2, 0}},
                 {Valuation::Seller(5), Valuation::Buyer(10), Valuation::Buyer(20)});
  const MergedMarket g = MergeMarket(m, AgentPartition{{0, 1}, {2}});
  EXPECT_EQ(g.RawValue(0, 0), ExtValue(5));
  EXPECT_EQ(g.RawValue(0, 1), ExtValue(-5));
  EXPECT_EQ(OracleMerged(m, {0, 1}, {}), ExtValue(5));
}

TEST(MergeMarket, MatchesDefinitionOnRandomMarkets) {
  Rng rng(41);
  int checked = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const Market m = testing::RandomFsMarket(rng);
    const AgentPartition p = testing::RandomPartition(m, 4, rng);
    if (p.j1.empty()) continue;
    const MergedMarket g = MergeMarket(m, p);
    for (AgentIdx k = 0; k < 2; ++k) {
      for (BundleMask b = 0; b < (1U << g.market.incident(k).size()); ++b) {
        EXPECT_EQ(g.RawValue(k, b), OracleMerged(m, p.side(k + 1), Trades(g, k, b)));
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(MergeMarket, PreservesSubstitutability) {
  Rng rng(42);
  for (int rep = 0; rep < 60; ++rep) {
    const Market m = testing::RandomFsMarket(rng);
    const AgentPartition p = testing::RandomPartition(m, 3, rng);
    if (p.j1.empty()) continue;
    const MergedMarket g = MergeMarket(m, p);
    for (AgentIdx k = 0; k < 2; ++k) {
      EXPECT_TRUE(testing::PassesFs(g.market, k, ValueBound(g.market))) << rep << " side " << k;
    }
  }
}

TEST(MergeMarket, InvalidPartition) {
  const Market m = Chain(1, 2);
  EXPECT_THROW(MergeMarket(m, AgentPartition{{0}, {1}}), DomainError);
  EXPECT_THROW(MergeMarket(m, AgentPartition{{0, 1}, {1, 2}}), DomainError);
  EXPECT_THROW(MergeMarket(m, AgentPartition{{}, {0, 1, 2}}), DomainError);
}

// Sparsity from the definition: every induced subgraph on >= 2 vertices,
// every bipartition of it into non-empty sides.
std::size_t OracleSparsity(const Multigraph& g) {
  const std::size_t n = g.size();
  std::int64_t worst = 0;
  for (std::uint64_t sub = 0; sub < (std::uint64_t{1} << n); ++sub) {
    std::vector<std::size_t> vs;
    for (std::size_t v = 0; v < n; ++v) {
      if (sub >> v & 1) vs.push_back(v);
    }
    if (vs.size() < 2) continue;
    std::int64_t best = -1;
    for (std::uint64_t side = 1; side + 1 < (std::uint64_t{1} << vs.size()); ++side) {
      std::int64_t cut = 0;
      for (std::size_t a = 0; a < vs.size(); ++a) {
        for (std::size_t b = a + 1; b < vs.size(); ++b) {
          if ((side >> a & 1) != (side >> b & 1)) cut += g.weight(vs[a], vs[b]);
        }
      }
      if (best < 0 || cut < best) best = cut;
    }
    worst = std::max(worst, best);
  }
  return static_cast<std::size_t>(std::max<std::int64_t>(worst, 1));
}

Multigraph Complete(std::size_t n) {
  Multigraph g(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) g.AddEdge(a, b);
  }
  return g;
}

TEST(Sparsity, SingleEdge) {
  Multigraph g(2);
  g.AddEdge(0, 1);
  EXPECT_EQ(Sparsity(g), 1U);
}

TEST(Sparsity, Triangle) {
  EXPECT_EQ(Sparsity(Complete(3)), 2U);
  EXPECT_EQ(OracleSparsity(Complete(3)), 2U);
}

TEST(Sparsity, K4) {
  EXPECT_EQ(Sparsity(Complete(4)), 3U);
  EXPECT_EQ(OracleSparsity(Complete(4)), 3U);
}

TEST(Sparsity, ForestsAreOne) {
  Rng rng(8);
  for (int rep = 0; rep < 100; ++rep) {
    const Market m = testing::RandomForestMarket(rng, 2 + rep % 12, 5);
    EXPECT_EQ(Sparsity(m), 1U);
  }
}

TEST(Sparsity, ParallelTradesCount) {
  EXPECT_EQ(Sparsity(Example2Market()), 2U);
}

TEST(Sparsity, MatchesOracleAndIsMonotone) {
  Rng rng(9);
  std::uniform_int_distribution<std::size_t> vertex(0, 6);
  for (int rep = 0; rep < 60; ++rep) {
    Multigraph g(7);
    std::size_t prev = 1;
    for (int e = 0; e < 14; ++e) {
      const std::size_t a = vertex(rng), b = vertex(rng);
      if (a == b) continue;
      g.AddEdge(a, b);
      const std::size_t s = Sparsity(g);
      EXPECT_EQ(s, OracleSparsity(g));
      EXPECT_GE(s, prev);
      EXPECT_GE(SparsityUpperBound(g), s);
      EXPECT_EQ(MinCutStoerWagner(g), MinCutByBipartitions(g));
      prev = s;
    }
  }
}

TEST(Sparsity, CapacityGuard) {
  EXPECT_THROW(Sparsity(Complete(kMaxExactSparsityVertices + 1)), CapacityError);
  EXPECT_EQ(SparsityUpperBound(Complete(20)), 19U);
}

RunResult Example2Cycle() {
  const Market m = Example2Market();
  OfferState s(2, 2);
  s.set_offer(0, Side::kBuyer, 4);
  s.set_offer(1, Side::kBuyer, 5);
  s.MarkAllUnsatisfied();
  return RunAlternating(m, s, 1);
}

TEST(ArRows, Example2Cycle) {
  const ArRows rows = ComputeArRows(Example2Market(), Example2Cycle().trace).Slice(0, 4);
  EXPECT_EQ(rows.rows[0], "RAAR");
  EXPECT_EQ(rows.rows[1], "RRAA");
}

TEST(ArRows, CycleRowsMixLetters) {
  const RunResult r = Example2Cycle();
  const auto& c = std::get<CycleDetected>(r.trace.outcome);
  const ArRows rows = ComputeArRows(Example2Market(), r.trace).Slice(c.prefix, c.period);
  for (const std::string& row : rows.rows) {
    EXPECT_NE(row.find('A'), std::string::npos);
    EXPECT_NE(row.find('R'), std::string::npos);
  }
  // The lemma presumes substitutes; on this cycle any findings are allowed.
  EXPECT_NO_THROW(CheckFragments(rows, true));
}

TEST(ArRows, ConvergedRunsEndWithEqualColumns) {
  Rng rng(12);
  for (int rep = 0; rep < 200; ++rep) {
    const Market m = testing::RandomFsTwoTradePair(rng, 10);
    const RunResult r = RunAlternating(m, testing::RandomOffers(m, 10, rng), rep % 2);
    ASSERT_TRUE(r.converged());
    const ArRows rows = ComputeArRows(m, r.trace);
    const std::size_t n = rows.num_columns();
    if (n < 2) continue;
    for (const std::string& row : rows.rows) EXPECT_EQ(row[n - 1], row[n - 2]);
  }
}

TEST(ArRows, SingleTradeEndsWithDoubleLetter) {
  Rng rng(13);
  for (int rep = 0; rep < 200; ++rep) {
    const Market m = testing::RandomSingleTradePair(rng, 20);
    const RunResult r = RunAlternating(m, testing::RandomOffers(m, 20, rng), rep % 2);
    ASSERT_TRUE(r.converged());
    const std::string row = ComputeArRows(m, r.trace).rows[0];
    ASSERT_GE(row.size(), 2U);
    const std::string tail = row.substr(row.size() - 2);
    EXPECT_TRUE(tail == "AA" || tail == "RR") << row;
  }
}

TEST(ArRows, NeedsTwoAgents) {
  const Market m = Chain(1, 5);
  Rng rng(0);
  const RunResult r = tradenet::Run(m, testing::RandomOffers(m, 3, rng), rng);
  EXPECT_THROW(ComputeArRows(m, r.trace), DomainError);
}

TEST(CheckFragments, AllAcceptIsClean) {
  EXPECT_TRUE(CheckFragments(ArRows{{"AAA", "AAA"}}).empty());
}

TEST(CheckFragments, FirstFragmentAtColumnOne) {
  const auto found = CheckFragments(ArRows{{"AAR", "ARA"}});
  ASSERT_EQ(found.size(), 1U);
  EXPECT_EQ(found[0].column, 1U);
  EXPECT_EQ(found[0].fragment, 1);
  EXPECT_FALSE(found[0].swapped);
}

TEST(CheckFragments, SwappedRowsAndWrap) {
  const auto swapped = CheckFragments(ArRows{{"RRA", "RAA"}});
  ASSERT_EQ(swapped.size(), 1U);
  EXPECT_EQ(swapped[0].fragment, 2);
  EXPECT_TRUE(swapped[0].swapped);
  // "RAR"/"RRA" only appears as the window wrapping from column 3.
  const auto wrapped = CheckFragments(ArRows{{"ARR", "RAR"}}, true);
  ASSERT_FALSE(wrapped.empty());
  EXPECT_EQ(wrapped.back().column, 3U);
  EXPECT_EQ(wrapped.back().fragment, 5);
  EXPECT_TRUE(CheckFragments(ArRows{{"ARR", "RAR"}}, false).empty());
}

TEST(CheckFragments, RowCount) {
  EXPECT_THROW(CheckFragments(ArRows{{"AAA"}}), DomainError);
  EXPECT_THROW(CheckFragments(ArRows{{"AAA", "AAA", "AAA"}}), DomainError);
}

TEST(RestrictionLemma, AllAgentsHolds) {
  const Market m = Chain(5, 10);
  Rng rng(1);
  const OfferState s = testing::RandomOffers(m, 10, rng);
  const std::vector<AgentIdx> all = {0, 1, 2}, seq = {2, 1, 0, 1, 2};
  EXPECT_TRUE(VerifyRestrictionLemma(m, all, s, seq).holds);
}

TEST(RestrictionLemma, RandomTreesHold) {
  Rng rng(51);
  for (int rep = 0; rep < 100; ++rep) {
    const Market m = testing::RandomFsMarket(rng, {4, 4, 3, 0, 10});
    const OfferState s = testing::RandomOffers(m, 10, rng);
    const std::vector<AgentIdx> j = testing::RandomSubset(m.num_agents(), rng);
    const SubsetSequence seq = TerminatingSequence(m, s, j, rng);
    ASSERT_TRUE(seq.terminated);
    const LemmaReport r = VerifyRestrictionLemma(m, j, s, seq.agents);
    EXPECT_TRUE(r.holds) << (r.diffs.empty() ? "" : r.diffs[0]);
  }
}

TEST(RestrictionLemma, OutsideAgentIsPrecondition) {
  const Market m = Chain(5, 10);
  OfferState s(2, 3);
  const std::vector<AgentIdx> j = {1, 2}, seq = {0};
  EXPECT_THROW(VerifyRestrictionLemma(m, j, s, seq), PreconditionError);
}

TEST(MergeLemma, TwoAgentSingletonsHold) {
  Rng rng(61);
  for (int rep = 0; rep < 50; ++rep) {
    const Market m = testing::RandomFsTwoTradePair(rng, 10);
    const OfferState s = testing::RandomOffers(m, 10, rng);
    const AgentPartition p{{0}, {1}};
    const std::vector<AgentIdx> phase = {0};
    EXPECT_TRUE(VerifyMergeLemma(m, p, 1, s, phase).holds);
  }
}

TEST(MergeLemma, CorruptedMergedValuationIsCaught) {
  const Market m = Example2Market();
  OfferState s(2, 2);
  s.set_offer(0, Side::kSeller, 4);
  s.set_offer(1, Side::kSeller, 5);
  s.MarkAllUnsatisfied();
  const AgentPartition p{{0}, {1}};
  MergedMarket g = MergeMarket(m, p);
  const std::vector<AgentIdx> phase = {0};
  ASSERT_TRUE(VerifyMergeLemma(m, g, 1, s, phase).holds);
  g.market = g.market.WithValuation(0, Valuation::Table({0, kNegInf, kNegInf, kNegInf}));
  const LemmaReport r = VerifyMergeLemma(m, g, 1, s, phase);
  EXPECT_FALSE(r.holds);
  ASSERT_FALSE(r.diffs.empty());
  EXPECT_NE(r.diffs[0].find("trade 0"), std::string::npos) << r.diffs[0];
}

TEST(MergeLemma, PhaseMustSatisfySide) {
  const Market m = ThreeCrossMarket();
  OfferState s(5, 4);
  s.MarkAllUnsatisfied();
  const AgentPartition p{{0, 1}, {2, 3}};
  const std::vector<AgentIdx> wrong_side = {2}, partial = {0};
  EXPECT_THROW(VerifyMergeLemma(m, p, 1, s, wrong_side), PreconditionError);
  EXPECT_THROW(VerifyMergeLemma(m, p, 1, s, partial), PreconditionError);
}

// Offers inside a side can sit epsilon apart, so a phase reaches the merged
// optimum only up to a few epsilon and resolves exact ties by its own path.
// Both effects fade as valuations get coarse relative to epsilon.
TEST(MergeLemma, MismatchesShrinkWithResolution) {
  const auto mismatches = [](std::int64_t scale) {
    Rng rng(7);
    int bad = 0;
    for (int markets = 0; markets < 40;) {
      const Market base = testing::RandomFsMarket(rng, {3, 6, 3, 2, 10});
      const AgentPartition p = testing::RandomPartition(base, 3, rng);
      if (p.j1.empty()) continue;
      ++markets;
      const Market m = testing::ScaleValuations(base, scale);
      const PhasePlan plan =
          BuildAlternatingPhases(m, p, testing::RandomOffers(m, 10 * scale, rng), rng, 16);
      const MergedMarket g = MergeMarket(m, p);
      for (const Phase& ph : plan.phases) {
        bad += !VerifyMergeLemma(m, g, ph.side, ph.start, ph.agents).holds;
      }
    }
    return bad;
  };
  const int fine = mismatches(1), coarse = mismatches(100);
  EXPECT_GT(fine, 0);
  EXPECT_LT(coarse, fine);
}

TEST(Phases, AlternateSidesUntilConverged) {
  Rng rng(71);
  for (int rep = 0; rep < 40; ++rep) {
    const Market m = testing::RandomFsMarket(rng, {4, 5, 3, 0, 10});
    const AgentPartition p = testing::RandomPartition(m, 1, rng);
    ASSERT_FALSE(p.j1.empty());
    const PhasePlan plan =
        BuildAlternatingPhases(m, p, testing::RandomOffers(m, 10, rng), rng, 200);
    EXPECT_TRUE(plan.converged);
    for (std::size_t k = 0; k < plan.phases.size(); ++k) {
      EXPECT_EQ(plan.phases[k].side, static_cast<int>(k % 2) + 1);
    }
  }
}

}  // namespace
}  // namespace tradenet
