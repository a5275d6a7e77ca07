#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "tradenet/errors.hpp"
#include "tradenet/experiments.hpp"

namespace tradenet {
namespace {

ExperimentConfig SmallBs(std::size_t runs = 10) {
  ExperimentConfig c;
  c.topology.kind = BsTopology{4, 4, 0.5};
  c.values = {1, 30};
  c.init = UniformOffers{1, 30};
  c.runs = runs;
  c.base_seed = 5;
  return c;
}

TEST(Summarize, SampleStandardDeviation) {
  const std::vector<double> xs = {2, 4, 4, 4, 5, 5, 7, 9};
  const Summary s = Summarize(xs);
  EXPECT_EQ(s.count, 8U);
  EXPECT_DOUBLE_EQ(s.mean, 5.0);
  // Sum of squared deviations is 32, over n - 1 = 7.
  EXPECT_NEAR(s.std, std::sqrt(32.0 / 7.0), 1e-12);
  EXPECT_EQ(Summarize({3.0}).std, 0.0);
  EXPECT_EQ(Summarize({}).count, 0U);
}

TEST(ExpandCells, BuyerProportionKeepsTotal) {
  ExperimentConfig c = SmallBs();
  c.topology.kind = BsTopology{25, 25, 0.1};
  c.axis = SweepAxis::kBuyerProportion;
  c.sweep_values = {0.0, 0.2, 0.8, 1.0};
  const auto cells = ExpandCells(c);
  ASSERT_EQ(cells.size(), 4U);
  const auto bs = [&](int k) { return std::get<BsTopology>(cells[k].topology.kind); };
  EXPECT_EQ(bs(0).buyers, 1U);
  EXPECT_EQ(bs(1).buyers, 10U);
  EXPECT_EQ(bs(2).buyers, 40U);
  EXPECT_EQ(bs(3).sellers, 1U);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(bs(k).buyers + bs(k).sellers, 50U);
}

TEST(ExpandCells, ShockAxes) {
  ExperimentConfig c = SmallBs();
  c.kind = ExperimentKind::kShock;
  c.axis = SweepAxis::kShockSize;
  c.sweep_values = {0.05, 0.1, 0.25};
  const auto cells = ExpandCells(c);
  ASSERT_EQ(cells.size(), 3U);
  EXPECT_DOUBLE_EQ(cells[2].shock.size, 0.25);
  EXPECT_DOUBLE_EQ(cells[2].shock.shocked_proportion, c.shock.shocked_proportion);
}

TEST(ValidateExperiment, Rejections) {
  ExperimentConfig c = SmallBs();
  EXPECT_NO_THROW(ValidateExperiment(c));
  c.runs = 0;
  EXPECT_THROW(ValidateExperiment(c), DomainError);
  c = SmallBs();
  c.axis = SweepAxis::kLambda;
  c.sweep_values = {1.0};
  EXPECT_THROW(ValidateExperiment(c), DomainError);
  c = SmallBs();
  c.axis = SweepAxis::kMarketSize;
  c.sweep_values = {10, 8};
  EXPECT_THROW(ValidateExperiment(c), DomainError);
  c = SmallBs();
  c.init = ExplicitOffers{};
  EXPECT_THROW(ValidateExperiment(c), DomainError);
  c = SmallBs();
  c.shock.size = -0.5;
  EXPECT_THROW(ValidateExperiment(c), DomainError);
}

TEST(RunSeed, DistinctAcrossCellsAndRuns) {
  std::set<std::uint64_t> seen;
  for (std::size_t cell = 0; cell < 20; ++cell) {
    for (std::size_t run = 0; run < 50; ++run) seen.insert(RunSeed(7, cell, run));
  }
  EXPECT_EQ(seen.size(), 1000U);
  EXPECT_EQ(RunSeed(7, 3, 4), RunSeed(7, 3, 4));
  EXPECT_NE(RunSeed(7, 3, 4), RunSeed(8, 3, 4));
}

TEST(ExecuteRun, ConvergedRecordInvariants) {
  const ExperimentConfig c = SmallBs();
  const CellSetup cell = ExpandCells(c)[0];
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const RunRecord r = ExecuteRun(c, cell, seed);
    ASSERT_TRUE(r.error.empty()) << r.error;
    ASSERT_TRUE(r.converged);
    EXPECT_TRUE(r.offers_within_bound);
    EXPECT_EQ(r.gap_violations, 0U);
    EXPECT_EQ(r.payment_balance, 0);
    EXPECT_EQ(r.satisfied_series.size(), r.iterations + 1);
    EXPECT_DOUBLE_EQ(r.satisfied_series.back(), 1.0);
    // Unit agents never end with negative utility.
    for (int k : {kBuyerClass, kSellerClass}) {
      if (r.class_utility[k]) EXPECT_GE(*r.class_utility[k], 0.0);
    }
  }
}

TEST(ExecuteRun, SameSeedSameRecord) {
  const ExperimentConfig c = SmallBs();
  const CellSetup cell = ExpandCells(c)[0];
  const RunRecord a = ExecuteRun(c, cell, 42), b = ExecuteRun(c, cell, 42);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.satisfied_series, b.satisfied_series);
  EXPECT_EQ(a.class_utility, b.class_utility);
}

TEST(Sweep, IndependentOfJobs) {
  ExperimentConfig c = SmallBs(12);
  c.axis = SweepAxis::kMarketSize;
  c.sweep_values = {4, 8, 12};
  const auto one = Sweep({c}, 1), four = Sweep({c}, 4);
  ASSERT_EQ(one[0].cells.size(), four[0].cells.size());
  for (std::size_t k = 0; k < one[0].cells.size(); ++k) {
    const auto& a = one[0].cells[k];
    const auto& b = four[0].cells[k];
    ASSERT_EQ(a.runs.size(), b.runs.size());
    for (std::size_t r = 0; r < a.runs.size(); ++r) {
      EXPECT_EQ(a.runs[r].seed, b.runs[r].seed);
      EXPECT_EQ(a.runs[r].iterations, b.runs[r].iterations);
    }
    EXPECT_EQ(a.aggregate.iterations.mean, b.aggregate.iterations.mean);
  }
}

TEST(Aggregate, CountsAndConvergedOnlyIterations) {
  std::vector<RunRecord> runs(4);
  runs[0].converged = true;
  runs[0].iterations = 10;
  runs[1].converged = true;
  runs[1].iterations = 20;
  runs[2].iterations = 999;
  runs[3].error = "boom";
  const CellAggregate a = Aggregate(runs);
  EXPECT_EQ(a.runs, 4U);
  EXPECT_EQ(a.converged, 2U);
  EXPECT_EQ(a.failed, 1U);
  EXPECT_DOUBLE_EQ(a.converged_fraction, 0.5);
  EXPECT_DOUBLE_EQ(a.iterations.mean, 15.0);
}

TEST(Welfare, BuyerUtilityFallsWithBuyerShare) {
  ExperimentConfig c = SmallBs(40);
  c.kind = ExperimentKind::kWelfare;
  c.topology.kind = BsTopology{10, 10, 0.3};
  c.axis = SweepAxis::kBuyerProportion;
  c.sweep_values = {0.2, 0.8};
  const ExperimentResult r = RunExperiment(c, 2);
  const double few = r.cells[0].aggregate.class_utility[kBuyerClass].mean;
  const double many = r.cells[1].aggregate.class_utility[kBuyerClass].mean;
  EXPECT_GT(few, many);
  const double sellers_few = r.cells[0].aggregate.class_utility[kSellerClass].mean;
  const double sellers_many = r.cells[1].aggregate.class_utility[kSellerClass].mean;
  EXPECT_LT(sellers_few, sellers_many);
}

TEST(ApplyShock, NeedsConvergedState) {
  Rng rng(3);
  const MarketSkeleton s = GenerateBs({3, 3, 1.0}, rng);
  const Market m = AssignValuations(s, {1, 20}, rng);
  OfferState start = InitializeOffers(m, UniformOffers{1, 20}, rng);
  EXPECT_THROW(ApplyShock(m, start, {}, {1, 20}, rng), PreconditionError);
  const RunResult r = tradenet::Run(m, start, rng);
  ASSERT_TRUE(r.converged());
  const ShockOutcome o = ApplyShock(m, r.final_state, {0.5, 0.25}, {1, 20}, rng);
  EXPECT_EQ(o.shocked.size(), 3U);
  EXPECT_GE(o.propagation, 0.0);
  EXPECT_LE(o.propagation, 1.0);
  EXPECT_TRUE(o.rerun.converged());
  for (AgentIdx i : o.shocked) {
    const auto role = m.agent(i).role;
    EXPECT_TRUE(role == Role::kBuyer || role == Role::kSeller);
  }
}

TEST(ApplyShock, NewValuesStayNearOld) {
  Rng rng(4);
  const MarketSkeleton s = GenerateBs({5, 5, 0.6}, rng);
  const Market m = AssignValuations(s, {1, 100}, rng);
  const RunResult r = tradenet::Run(m, InitializeOffers(m, ZeroOffers{}, rng), rng);
  ASSERT_TRUE(r.converged());
  const ShockOutcome o = ApplyShock(m, r.final_state, {1.0, 0.1}, {1, 100}, rng);
  for (AgentIdx i = 0; i < m.num_agents(); ++i) {
    const auto scalar = [](const Valuation& v) {
      if (auto* b = std::get_if<UnitBuyer>(&v.kind())) return b->value;
      return std::get<UnitSeller>(v.kind()).cost;
    };
    const double before = static_cast<double>(scalar(m.valuation(i)));
    const double after = static_cast<double>(scalar(o.market.valuation(i)));
    EXPECT_GE(after, std::ceil(before * 0.9) - 1e-9);
    EXPECT_LE(after, std::floor(before * 1.1) + 1e-9);
  }
}

TEST(ShockExperiment, ReportsPropagation) {
  ExperimentConfig c = SmallBs(20);
  const ExperimentResult r = ShockExperiment(c, {0.25, 0.1}, 2);
  ASSERT_EQ(r.cells.size(), 1U);
  const CellAggregate& a = r.cells[0].aggregate;
  EXPECT_EQ(a.propagation.count, a.converged);
  EXPECT_GE(a.propagation.mean, 0.0);
  EXPECT_LE(a.propagation.mean, 1.0);
}

}  // namespace
}  // namespace tradenet
