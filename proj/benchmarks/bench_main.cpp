#include <benchmark/benchmark.h>

#include <random>

#include "tradenet/demand.hpp"
#include "tradenet/dynamics.hpp"
#include "tradenet/sparsity.hpp"
#include "tradenet/topology.hpp"

namespace tradenet {
namespace {

Valuation RandomTable(std::size_t k, Rng& rng) {
  std::uniform_int_distribution<std::int64_t> v(-50, 50);
  std::vector<ExtValue> values(std::size_t{1} << k);
  values[0] = 0;
  for (std::size_t b = 1; b < values.size(); ++b) values[b] = v(rng);
  return Valuation::Table(std::move(values));
}

void BM_DemandTable(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  std::vector<Agent> agents = {{0, "hub", Role::kGeneric}};
  std::vector<Trade> trades;
  std::vector<Valuation> vals = {RandomTable(k, rng)};
  for (std::size_t j = 0; j < k; ++j) {
    agents.push_back({static_cast<std::int64_t>(j + 1), "", Role::kGeneric});
    trades.push_back({static_cast<std::int64_t>(j), "", 0, static_cast<AgentIdx>(j + 1)});
    vals.push_back(Valuation::Table({0, 0}));
  }
  const Market m(agents, trades, vals);
  std::vector<Price> prices(k);
  std::uniform_int_distribution<Price> p(-20, 20);
  for (auto _ : state) {
    for (Price& x : prices) x = p(rng);
    benchmark::DoNotOptimize(Demand(m, 0, prices));
  }
  state.SetComplexityN(static_cast<std::int64_t>(std::size_t{1} << k));
}
BENCHMARK(BM_DemandTable)->DenseRange(2, 14, 4)->Complexity(benchmark::oN);

void BM_RunBs(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Rng rng(seed++);
    const MarketSkeleton s = GenerateBs({n / 2, n - n / 2, 0.1}, rng);
    const Market m = AssignValuations(s, {1, 100}, rng);
    const OfferState start = InitializeOffers(m, UniformOffers{1, 100}, rng);
    RunOptions o;
    o.record_steps = false;
    benchmark::DoNotOptimize(Run(m, start, rng, o).iterations());
  }
}
BENCHMARK(BM_RunBs)->Arg(20)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Sparsity(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  std::bernoulli_distribution edge(0.4);
  Multigraph g(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (edge(rng)) g.AddEdge(a, b);
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(Sparsity(g));
}
BENCHMARK(BM_Sparsity)->DenseRange(6, 14, 4)->Unit(benchmark::kMillisecond);

void BM_MinCut(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(4);
  std::bernoulli_distribution edge(0.3);
  Multigraph g(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (edge(rng)) g.AddEdge(a, b);
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(MinCutStoerWagner(g));
}
BENCHMARK(BM_MinCut)->Arg(16)->Arg(64)->Arg(256);

}  // namespace
}  // namespace tradenet

BENCHMARK_MAIN();
