// Runs the acceptance criteria end to end and prints one PASS/FAIL line per
// criterion, plus the measurements behind each verdict. Exit status is
// non-zero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "random_markets.hpp"
#include "tradenet/ar_rows.hpp"
#include "tradenet/demand.hpp"
#include "tradenet/dynamics.hpp"
#include "tradenet/experiments.hpp"
#include "tradenet/io/market_file.hpp"
#include "tradenet/io/results.hpp"
#include "tradenet/phases.hpp"
#include "tradenet/reduction.hpp"
#include "tradenet/sparsity.hpp"
#include "tradenet/substitutes.hpp"

namespace tradenet {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Verdict {
  int id = 0;
  bool pass = false;
  std::string detail;
};

std::vector<Verdict> verdicts;

void Record(int id, bool pass, const std::string& detail) {
  verdicts.push_back({id, pass, detail});
  std::cout << "  [" << id << "] " << (pass ? "pass" : "fail") << ": " << detail << std::endl;
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

// Offer-range and gap bookkeeping shared by criteria 4 and 5. Checks every
// trade after every best response, independently of RunStats.
struct InvariantTally {
  std::size_t runs = 0;
  std::size_t bound_violations = 0;
  std::size_t gap_violations = 0;
  std::size_t steps_checked = 0;

  StepObserver Observer(const Market& m, std::int64_t v) {
    auto responded = std::make_shared<std::vector<char>>(m.num_agents(), 0);
    auto count = std::make_shared<std::size_t>(0);
    ++runs;
    return [this, &m, v, responded, count](const OfferState& s, const TraceStep& step) {
      if (!(*responded)[step.agent]) {
        (*responded)[step.agent] = 1;
        ++*count;
      }
      ++steps_checked;
      for (TradeIdx t = 0; t < m.num_trades(); ++t) {
        const Price b = s.offer(t, Side::kBuyer), sl = s.offer(t, Side::kSeller);
        if (std::min(b, sl) < -2 * v - 1 || std::max(b, sl) > 2 * v + 1) ++bound_violations;
        if (*count == m.num_agents() && !(b <= sl && sl <= b + s.epsilon())) ++gap_violations;
      }
    };
  }

  void AddRecord(const RunRecord& r) {
    ++runs;
    if (!r.offers_within_bound) ++bound_violations;
    gap_violations += r.gap_violations;
  }
};

InvariantTally tally;

RunOptions Watched(const Market& m, const OfferState& s) {
  RunOptions o;
  o.observer = tally.Observer(m, ValueBound(m, s));
  return o;
}

// 1. Golden table and cycle on the example2 market.
void Criterion1() {
  const auto t0 = Clock::now();
  const io::MarketDocument doc = io::LoadMarket(fs::path(TRADENET_DATA_DIR) / "example2.json");
  const Market& m = doc.market;
  const AgentIdx buyer = *m.FindAgent(0), seller = *m.FindAgent(1);
  OfferState start = *doc.offers;
  start.set_offer(0, Side::kBuyer, 4);
  start.set_offer(1, Side::kBuyer, 5);
  const std::vector<std::vector<Price>> golden = {{4, 5}, {5, 6}, {5, 5}, {5, 5}, {4, 5}};
  std::vector<std::vector<Price>> table = {{4, 5}};
  RunOptions o;
  o.max_iterations = 64;
  o.observer = [&](const OfferState& s, const TraceStep& step) {
    const Side side = step.agent == buyer ? Side::kBuyer : Side::kSeller;
    table.push_back({s.offer(0, side), s.offer(1, side)});
  };
  const RunResult r = RunAlternating(m, start, seller, o);
  const double secs = Seconds(t0);
  table.resize(std::min(table.size(), golden.size()));
  const auto* c = std::get_if<CycleDetected>(&r.trace.outcome);
  std::ostringstream d;
  d << "columns";
  for (const auto& col : table) d << " (" << col[0] << "," << col[1] << ")";
  d << "; " << (c ? "cycle period " + std::to_string(c->period) : std::string("no cycle"))
    << "; " << secs << " s";
  Record(1, table == golden && c && c->period == 4 && secs < 1.0, d.str());
}

// 2. Single-trade pairs converge within O(V).
void Criterion2() {
  Rng rng(2002);
  std::uniform_int_distribution<std::int64_t> vdist(1, 100);
  std::size_t runs = 0, converged = 0;
  double c_max = 0, sum_xy = 0, sum_xx = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::int64_t v = vdist(rng);
    const Market m = testing::RandomSingleTradePair(rng, v);
    const OfferState s = testing::RandomOffers(m, v, rng);
    for (AgentIdx first : {AgentIdx{0}, AgentIdx{1}}) {
      const RunResult r = RunAlternating(m, s, first, Watched(m, s));
      ++runs;
      if (!r.converged()) continue;
      ++converged;
      const double br = static_cast<double>(r.iterations());
      c_max = std::max(c_max, br / static_cast<double>(v));
      sum_xy += br * static_cast<double>(v);
      sum_xx += static_cast<double>(v) * static_cast<double>(v);
    }
  }
  std::ostringstream d;
  d << converged << "/" << runs << " converged; BR <= c*V with c = " << c_max
    << " (least-squares slope " << (sum_xx > 0 ? sum_xy / sum_xx : 0.0) << ")";
  Record(2, converged == runs && runs >= 1000, d.str());
}

// 3. Fully substitutable two-trade pairs never cycle.
void Criterion3() {
  Rng rng(3003);
  std::uniform_int_distribution<std::int64_t> vdist(2, 12);
  std::size_t markets = 0, runs = 0, converged = 0, cycles = 0, fs_confirmed = 0;
  for (int rep = 0; rep < 500; ++rep) {
    const std::int64_t v = vdist(rng);
    const Market m = testing::RandomFsTwoTradePair(rng, v);
    ++markets;
    bool fs = true;
    for (AgentIdx i = 0; i < 2; ++i) {
      fs = fs && CheckFullSubstitutability(m, i, PriceRange{-v, v}).is_fully_substitutable;
    }
    fs_confirmed += fs;
    const OfferState s = testing::RandomOffers(m, v, rng);
    for (AgentIdx first : {AgentIdx{0}, AgentIdx{1}}) {
      const RunResult r = RunAlternating(m, s, first, Watched(m, s));
      ++runs;
      converged += r.converged();
      cycles += std::holds_alternative<CycleDetected>(r.trace.outcome);
    }
    Rng sched(rng());
    const RunResult r = Run(m, s, sched, Watched(m, s));
    ++runs;
    converged += r.converged();
  }
  std::ostringstream d;
  d << markets << " markets (" << fs_confirmed << " re-checked FS on [-V,V]^2), " << converged
    << "/" << runs << " runs converged, " << cycles << " cycles";
  Record(3, markets >= 500 && fs_confirmed == markets && converged == runs && cycles == 0,
         d.str());
}

// 6. Restricted markets replay terminating sequences exactly.
void Criterion6() {
  Rng rng(6006);
  std::size_t checks = 0, held = 0, skipped = 0;
  std::string first_diff;
  for (int rep = 0; rep < 150; ++rep) {
    const Market m = testing::RandomFsMarket(rng, {3, 6, 3, 2, 10});
    const OfferState s = testing::RandomOffers(m, 10, rng);
    const std::vector<AgentIdx> j = testing::RandomSubset(m.num_agents(), rng);
    const SubsetSequence seq = TerminatingSequence(m, s, j, rng);
    if (!seq.terminated) {
      ++skipped;
      continue;
    }
    const LemmaReport r = VerifyRestrictionLemma(m, j, s, seq.agents);
    ++checks;
    held += r.holds;
    if (!r.holds && first_diff.empty() && !r.diffs.empty()) first_diff = r.diffs[0];
  }
  std::ostringstream d;
  d << held << "/" << checks << " hold";
  if (skipped) d << " (" << skipped << " restricted runs did not terminate)";
  if (!first_diff.empty()) d << "; first diff: " << first_diff;
  Record(6, checks >= 100 && held == checks, d.str());
}

struct MergeTally {
  std::size_t markets = 0;
  std::size_t checks = 0;
  std::size_t held = 0;
  std::string first_diff;

  double FailurePercent() const {
    return checks ? 100.0 * static_cast<double>(checks - held) / static_cast<double>(checks) : 0.0;
  }
};

// Phases of random FS markets with valuations scaled by `scale` (epsilon 1).
MergeTally MergePhases(std::int64_t scale) {
  Rng rng(7007);
  MergeTally t;
  for (int rep = 0; t.markets < 120 && rep < 1000; ++rep) {
    const Market base = testing::RandomFsMarket(rng, {3, 6, 3, 2, 10});
    const AgentPartition p = testing::RandomPartition(base, 3, rng);
    if (p.j1.empty()) continue;
    ++t.markets;
    const Market m = testing::ScaleValuations(base, scale);
    const PhasePlan plan =
        BuildAlternatingPhases(m, p, testing::RandomOffers(m, 10 * scale, rng), rng, 16);
    const MergedMarket g = MergeMarket(m, p);
    for (const Phase& ph : plan.phases) {
      const LemmaReport r = VerifyMergeLemma(m, g, ph.side, ph.start, ph.agents);
      ++t.checks;
      t.held += r.holds;
      if (!r.holds && t.first_diff.empty() && !r.diffs.empty()) t.first_diff = r.diffs[0];
    }
  }
  return t;
}

// 7. A side's phase equals one best response of the merged agent. The
// scaled run is diagnostic only: it shows how the mismatch rate depends on
// the valuation resolution relative to epsilon.
void Criterion7() {
  const MergeTally t = MergePhases(1);
  const MergeTally coarse = MergePhases(100);
  std::ostringstream d;
  d << t.held << "/" << t.checks << " phases hold over " << t.markets << " markets ("
    << t.FailurePercent() << "% differ; " << coarse.FailurePercent()
    << "% with valuations x100)";
  if (!t.first_diff.empty()) d << "; first diff: " << t.first_diff;
  Record(7, t.markets >= 100 && t.held == t.checks, d.str());
}

// 8. Forests with arbitrary valuations converge under the randomized schedule.
void Criterion8() {
  Rng rng(8008);
  std::uniform_int_distribution<std::size_t> ndist(2, 12);
  std::size_t runs = 0, converged = 0, not_forest = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const Market m = testing::RandomForestMarket(rng, ndist(rng), 10);
    if (Sparsity(m) != 1) ++not_forest;
    const OfferState s = testing::RandomOffers(m, 10, rng);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Rng sched(seed * 1000 + static_cast<std::uint64_t>(rep));
      const RunResult r = Run(m, s, sched, Watched(m, s));
      ++runs;
      converged += r.converged();
    }
  }
  std::ostringstream d;
  d << converged << "/" << runs << " runs converged within budget";
  if (not_forest) d << "; " << not_forest << " markets not 1-sparse";
  Record(8, runs >= 1000 && converged == runs && not_forest == 0, d.str());
}

// 9. Checker calibration on the example2 market.
void Criterion9() {
  const io::MarketDocument doc = io::LoadMarket(fs::path(TRADENET_DATA_DIR) / "example2.json");
  const Market& m = doc.market;
  const AgentIdx buyer = *m.FindAgent(0), seller = *m.FindAgent(1);
  const FsReport b = CheckFullSubstitutability(m, buyer, PriceRange{0, 10});
  const FsReport s = CheckFullSubstitutability(m, seller, PriceRange{0, 10});
  bool replay = false;
  if (s.witness) {
    replay = Demand(m, seller, s.witness->prices) == s.witness->bundle &&
             Demand(m, seller, s.witness->prices_other) == s.witness->bundle_other;
  }
  std::ostringstream d;
  d << "buyer " << (b.is_fully_substitutable ? "passes" : "fails") << ", seller "
    << (s.is_fully_substitutable ? "passes" : "fails") << ", witness "
    << (replay ? "replays" : "does not replay");
  Record(9, b.is_fully_substitutable && !s.is_fully_substitutable && replay, d.str());
}

// Cut-of-every-induced-subgraph oracle, independent of the library.
std::size_t BruteSparsity(const Multigraph& g) {
  const std::size_t n = g.size();
  std::int64_t worst = 1;
  for (std::uint64_t sub = 0; sub < (1ULL << n); ++sub) {
    std::vector<std::size_t> vs;
    for (std::size_t v = 0; v < n; ++v) {
      if (sub >> v & 1) vs.push_back(v);
    }
    if (vs.size() < 2) continue;
    std::int64_t best = -1;
    for (std::uint64_t side = 1; side + 1 < (1ULL << vs.size()); ++side) {
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
  return static_cast<std::size_t>(worst);
}

// 10. Sparsity of forests, a triangle and K4.
void Criterion10() {
  Rng rng(1010);
  std::size_t forests = 0, forest_ok = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const Market m = testing::RandomForestMarket(rng, 2 + rep % 12, 5);
    ++forests;
    forest_ok += Sparsity(m) == 1 && BruteSparsity(UnderlyingGraph(m)) == 1;
  }
  const auto complete = [](std::size_t n) {
    Multigraph g(n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) g.AddEdge(a, b);
    }
    return g;
  };
  const std::size_t tri = Sparsity(complete(3)), k4 = Sparsity(complete(4));
  const std::size_t k4_oracle = BruteSparsity(complete(4));
  std::ostringstream d;
  d << "forests " << forest_ok << "/" << forests << " -> 1, triangle -> " << tri << ", K4 -> "
    << k4 << " (oracle " << k4_oracle << ")";
  Record(10, forest_ok == forests && tri == 2 && k4 == 3 && k4_oracle == 3, d.str());
}

std::size_t Jobs() { return std::max(1U, std::thread::hardware_concurrency()); }

ExperimentConfig BsFifty() {
  ExperimentConfig c;
  c.topology.kind = BsTopology{25, 25, 0.1};
  c.values = {1, 100};
  c.init = UniformOffers{1, 100};
  c.runs = 100;
  return c;
}

void TallyExperiment(const ExperimentResult& r) {
  for (const CellResult& cell : r.cells) {
    for (const RunRecord& run : cell.runs) tally.AddRecord(run);
  }
}

// 11. Buyer welfare falls as buyers become the majority.
void Criterion11() {
  ExperimentConfig c = BsFifty();
  c.kind = ExperimentKind::kWelfare;
  c.axis = SweepAxis::kBuyerProportion;
  c.sweep_values = {0.2, 0.8};
  c.base_seed = 1111;
  const ExperimentResult r = RunExperiment(c, Jobs());
  TallyExperiment(r);
  const Summary lo = r.cells[0].aggregate.class_utility[kBuyerClass];
  const Summary hi = r.cells[1].aggregate.class_utility[kBuyerClass];
  std::ostringstream d;
  d << "mean buyer utility " << lo.mean << " at 0.2 vs " << hi.mean << " at 0.8 ("
    << r.cells[0].aggregate.converged << "+" << r.cells[1].aggregate.converged
    << " converged runs)";
  Record(11, lo.count > 0 && hi.count > 0 && hi.mean < lo.mean, d.str());
}

// 12. Shocks propagate and the market re-converges faster than it first did.
void Criterion12() {
  ExperimentConfig c = BsFifty();
  c.kind = ExperimentKind::kShock;
  c.axis = SweepAxis::kShockSize;
  c.sweep_values = {0.05, 0.1, 0.25};
  c.shock.shocked_proportion = 0.25;
  c.base_seed = 1212;
  const ExperimentResult r = RunExperiment(c, Jobs());
  TallyExperiment(r);
  bool ok = true;
  std::ostringstream d;
  for (const CellResult& cell : r.cells) {
    const CellAggregate& a = cell.aggregate;
    ok = ok && a.propagation.count > 0 && a.propagation.mean > 0 &&
         a.normalized_reconvergence.count > 0 && a.normalized_reconvergence.mean < 1.0;
    d << "size " << cell.setup.sweep_value << ": propagation " << a.propagation.mean
      << ", T1/T0 " << a.normalized_reconvergence.mean << "; ";
  }
  Record(12, ok, d.str());
}

// 4 and 5, over every run above.
void Criteria4And5() {
  std::ostringstream d4, d5;
  d4 << tally.bound_violations << " offers outside [-2V-1, 2V+1] over " << tally.runs << " runs";
  d5 << tally.gap_violations << " main-phase gap violations over " << tally.runs << " runs ("
     << tally.steps_checked << " observed steps)";
  Record(4, tally.runs > 0 && tally.bound_violations == 0, d4.str());
  Record(5, tally.runs > 0 && tally.gap_violations == 0, d5.str());
}

#ifdef TRADENET_CLI
int Cli(const std::string& args) {
  const std::string cmd = std::string("\"") + TRADENET_CLI + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}
#endif

// 13. Byte-identical reruns and job-count independence.
void Criterion13() {
#ifdef TRADENET_CLI
  const fs::path dir = fs::temp_directory_path() / "tradenet_acceptance_13";
  fs::remove_all(dir);
  const std::string market = (fs::path(TRADENET_DATA_DIR) / "example1_coffee.json").string();
  bool ok = true;
  std::ostringstream d;
  for (const char* sub : {"run_a", "run_b"}) {
    ok = ok && Cli("run --market \"" + market + "\" --seed 13 --trace --out \"" +
                   (dir / sub).string() + "\"") == 0;
  }
  std::size_t same = 0, files = 0;
  for (const auto& e : fs::directory_iterator(dir / "run_a")) {
    if (e.path().extension() != ".csv") continue;
    ++files;
    same += Slurp(e.path()) == Slurp(dir / "run_b" / e.path().filename());
  }
  ok = ok && files > 0 && same == files;
  d << "run: " << same << "/" << files << " CSV files identical; ";
  const std::string sweep =
      "sweep --topology bs --buyers 10 --sellers 10 --r 0.3 --runs 20 --axis buyer_proportion "
      "--sweep-values 0.2,0.5,0.8 --seed 13 ";
  ok = ok && Cli(sweep + "--jobs 1 --out \"" + (dir / "j1").string() + "\"") == 0 &&
       Cli(sweep + "--jobs 4 --out \"" + (dir / "j4").string() + "\"") == 0;
  std::size_t same_sweep = 0, sweep_files = 0;
  for (const char* f : {"aggregates.csv", "welfare.csv", "runs.csv", "paths.csv"}) {
    ++sweep_files;
    const std::string a = Slurp(dir / "j1" / f);
    same_sweep += !a.empty() && a == Slurp(dir / "j4" / f);
  }
  ok = ok && same_sweep == sweep_files;
  d << "sweep: " << same_sweep << "/" << sweep_files << " files identical for --jobs 1 vs 4";
  fs::remove_all(dir);
  Record(13, ok, d.str());
#else
  Record(13, false, "command-line tool not built");
#endif
}

}  // namespace
}  // namespace tradenet

int main() {
  using namespace tradenet;
  const auto t0 = Clock::now();
  const std::vector<std::pair<int, void (*)()>> steps = {
      {1, Criterion1},   {2, Criterion2},   {3, Criterion3},   {6, Criterion6},
      {7, Criterion7},   {8, Criterion8},   {9, Criterion9},   {10, Criterion10},
      {11, Criterion11}, {12, Criterion12}, {13, Criterion13},
  };
  for (const auto& [id, fn] : steps) {
    try {
      fn();
    } catch (const std::exception& e) {
      Record(id, false, std::string("threw: ") + e.what());
    }
  }
  Criteria4And5();
  std::sort(verdicts.begin(), verdicts.end(),
            [](const Verdict& a, const Verdict& b) { return a.id < b.id; });
  std::cout << "\n";
  bool all = true;
  for (const Verdict& v : verdicts) {
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << v.id << ": " << v.detail << "\n";
    all = all && v.pass;
  }
  std::cout << "total " << Seconds(t0) << " s\n";
  return all ? 0 : 1;
}
