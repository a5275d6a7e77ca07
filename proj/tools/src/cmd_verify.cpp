#include <array>
#include <sstream>

#include "commands.hpp"
#include "common.hpp"
#include "fixtures.hpp"
#include "tradenet/ar_rows.hpp"
#include "tradenet/demand.hpp"
#include "tradenet/dynamics.hpp"
#include "tradenet/phases.hpp"
#include "tradenet/reduction.hpp"
#include "tradenet/sparsity.hpp"
#include "tradenet/substitutes.hpp"

namespace tradenet::cli {
namespace {

struct VerifyFlags {
  CommonOptions common;
  std::string market;
  bool example2 = false;
  bool fs = false;
  bool sparsity = false;
  bool restriction = false;
  bool merge = false;
  bool all = false;
  std::string box;
  std::string scan = "pairs";
  bool upper_bound = false;
  std::int64_t expect_sparsity = -1;
  std::string subset;
  std::string partition;
  std::size_t trials = 20;
};

class Checks {
 public:
  void Record(bool ok, const std::string& name, const std::string& detail) {
    Report(std::string(ok ? "PASS " : "FAIL ") + name + (detail.empty() ? "" : " " + detail));
    failed_ = failed_ || !ok;
  }
  bool failed() const { return failed_; }

 private:
  bool failed_ = false;
};

std::string Join(const std::vector<Price>& xs) {
  std::ostringstream os;
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
  return os.str();
}

// Buyer offers (4,5), the seller responds first: the offers alternate
// b(4,5) s(5,6) b(5,5) s(5,5) b(4,5) and then repeat.
void CheckExample2(Checks& checks) {
  const io::MarketDocument doc = io::ParseMarket(kExample2Json);
  const Market& m = doc.market;
  const AgentIdx buyer = *m.FindAgent(0);
  const AgentIdx seller = *m.FindAgent(1);
  // Seller offers in the fixture are irrelevant: the seller moves first.
  const OfferState start = *doc.offers;
  const std::array<std::pair<Side, std::vector<Price>>, 5> expected = {{
      {Side::kBuyer, {4, 5}},
      {Side::kSeller, {5, 6}},
      {Side::kBuyer, {5, 5}},
      {Side::kSeller, {5, 5}},
      {Side::kBuyer, {4, 5}},
  }};
  std::vector<std::vector<Price>> columns;
  columns.push_back({start.offer(0, Side::kBuyer), start.offer(1, Side::kBuyer)});
  RunOptions options;
  options.max_iterations = 64;
  options.observer = [&](const OfferState& s, const TraceStep& step) {
    const Side side = step.agent == buyer ? Side::kBuyer : Side::kSeller;
    columns.push_back({s.offer(0, side), s.offer(1, side)});
  };
  const RunResult run = RunAlternating(m, start, seller, options);

  bool table_ok = columns.size() >= expected.size();
  std::ostringstream got;
  for (std::size_t c = 0; c < expected.size() && c < columns.size(); ++c) {
    table_ok = table_ok && columns[c] == expected[c].second;
    got << (c ? " " : "") << (expected[c].first == Side::kBuyer ? "b(" : "s(")
        << Join(columns[c]) << ")";
  }
  checks.Record(table_ok, "example2-table", got.str());

  const auto* cycle = std::get_if<CycleDetected>(&run.trace.outcome);
  checks.Record(cycle && cycle->period == 4,
                "example2-cycle",
                cycle ? "period=" + std::to_string(cycle->period) +
                            " prefix=" + std::to_string(cycle->prefix)
                      : "no cycle detected");

  const ArRows rows = ComputeArRows(m, run.trace).Slice(0, 4);
  const bool rows_ok = rows.rows.size() == 2 && rows.rows[0] == "RAAR" && rows.rows[1] == "RRAA";
  checks.Record(rows_ok, "example2-ar-rows",
                rows.rows.size() == 2 ? rows.rows[0] + "/" + rows.rows[1] : "");
}

void CheckFsCalibration(Checks& checks) {
  const io::MarketDocument doc = io::ParseMarket(kExample2Json);
  const Market& m = doc.market;
  const FsReport b = CheckFullSubstitutability(m, *m.FindAgent(0), PriceRange{0, 10});
  const FsReport s = CheckFullSubstitutability(m, *m.FindAgent(1), PriceRange{0, 10});
  bool replay = false;
  if (s.witness) {
    replay = Demand(m, *m.FindAgent(1), s.witness->prices) == s.witness->bundle &&
             Demand(m, *m.FindAgent(1), s.witness->prices_other) == s.witness->bundle_other;
  }
  checks.Record(b.is_fully_substitutable, "fs-calibration-buyer", "box=0:10");
  checks.Record(!s.is_fully_substitutable && replay, "fs-calibration-seller",
                s.witness ? "witness=(" + Join(s.witness->prices) + ")->(" +
                                Join(s.witness->prices_other) + ") condition=" +
                                std::to_string(s.witness->condition)
                          : "no witness");
}

// Without --box, each agent gets [-V, V] narrowed until the box fits the
// guard of the scan.
void CheckFs(Checks& checks, const Market& m, const std::string& box_text,
             const std::string& scan_text) {
  if (scan_text != "pairs" && scan_text != "steps") {
    throw UsageError("--scan: expected pairs or steps, got \"" + scan_text + "\"");
  }
  const FsScan scan = scan_text == "steps" ? FsScan::kUnitSteps : FsScan::kAllPairs;
  const std::uint64_t guard =
      scan == FsScan::kUnitSteps ? kMaxFsUnitStepVectors : kMaxFsPriceVectors;
  std::optional<PriceRange> given;
  if (!box_text.empty()) {
    const auto [lo, hi] = ParseIntRange(box_text, "--box");
    given = PriceRange{lo, hi};
  }
  const Price v = ValueBound(m);
  for (AgentIdx i = 0; i < m.num_agents(); ++i) {
    PriceRange box = given.value_or(PriceRange{-v, v});
    bool narrowed = false;
    if (!given) {
      const std::size_t k = m.incident(i).trades.size();
      auto count = [k, guard](Price h) {
        std::uint64_t c = 1;
        for (std::size_t j = 0; j < k && c <= guard; ++j) c *= 2 * h + 1;
        return c;
      };
      while (box.hi > 0 && count(box.hi) > guard) {
        --box.hi;
        narrowed = true;
      }
      box.lo = -box.hi;
    }
    const FsReport r = CheckFullSubstitutability(m, i, box, scan);
    std::string detail = "agent=" + std::to_string(m.agent(i).id) + " box=" +
                         std::to_string(box.lo) + ":" + std::to_string(box.hi) +
                         (narrowed ? "(narrowed)" : "") +
                         " prices=" + std::to_string(r.prices_checked);
    if (r.witness) {
      detail += " condition=" + std::to_string(r.witness->condition) + " witness=(" +
                Join(r.witness->prices) + ")->(" + Join(r.witness->prices_other) + ")";
    }
    checks.Record(r.is_fully_substitutable, "fs", detail);
  }
}

void CheckSparsity(Checks& checks, const Market& m, bool upper_bound, std::int64_t expect) {
  const std::size_t value = upper_bound ? SparsityUpperBound(m) : Sparsity(m);
  const std::string name = upper_bound ? "sparsity-upper-bound" : "sparsity";
  const bool ok = expect < 0 || static_cast<std::int64_t>(value) == expect;
  checks.Record(ok, name,
                "value=" + std::to_string(value) +
                    (expect >= 0 ? " expected=" + std::to_string(expect) : ""));
}

std::vector<AgentIdx> AgentsFromIds(const Market& m, const std::vector<std::int64_t>& ids,
                                    const std::string& flag) {
  std::vector<AgentIdx> out;
  for (std::int64_t id : ids) {
    const auto a = m.FindAgent(id);
    if (!a) throw UsageError(flag + ": no agent with id " + std::to_string(id));
    out.push_back(*a);
  }
  return out;
}

// A non-empty proper subset of the agents, as a bitmask.
std::uint64_t RandomMask(std::size_t n, Rng& rng) {
  if (n < 2 || n > 62) throw PreconditionError("random subsets need 2 to 62 agents");
  std::uniform_int_distribution<std::uint64_t> pick(1, (std::uint64_t{1} << n) - 2);
  return pick(rng);
}

std::vector<AgentIdx> MaskAgents(std::size_t n, std::uint64_t mask) {
  std::vector<AgentIdx> out;
  for (AgentIdx i = 0; i < n; ++i) {
    if (mask >> i & 1) out.push_back(i);
  }
  return out;
}

OfferState StartState(const io::MarketDocument& doc, const CommonOptions& common, Rng& rng) {
  if (doc.offers) return *doc.offers;
  const Price v = ValueBound(doc.market);
  return InitializeOffers(doc.market, UniformOffers{-v, v}, rng, common.epsilon);
}

void CheckRestriction(Checks& checks, const io::MarketDocument& doc, const VerifyFlags& f,
                      Rng& rng) {
  const Market& m = doc.market;
  std::size_t held = 0, skipped = 0;
  for (std::size_t t = 0; t < f.trials; ++t) {
    const OfferState start = StartState(doc, f.common, rng);
    const std::vector<AgentIdx> subset =
        f.subset.empty() ? MaskAgents(m.num_agents(), RandomMask(m.num_agents(), rng))
                         : AgentsFromIds(m, ParseIdList(f.subset, "--subset"), "--subset");
    const SubsetSequence seq = TerminatingSequence(m, start, subset, rng, f.common.budget);
    if (!seq.terminated) {
      ++skipped;
      continue;
    }
    const LemmaReport r = VerifyRestrictionLemma(m, subset, start, seq.agents);
    if (r.holds) {
      ++held;
    } else {
      checks.Record(false, "restriction-trial",
                    "trial=" + std::to_string(t) + " " + (r.diffs.empty() ? "" : r.diffs[0]));
    }
  }
  checks.Record(held + skipped == f.trials, "restriction",
                "held=" + std::to_string(held) + " skipped_nonterminating=" +
                    std::to_string(skipped) + " trials=" + std::to_string(f.trials));
}

void CheckMerge(Checks& checks, const io::MarketDocument& doc, const VerifyFlags& f, Rng& rng) {
  const Market& m = doc.market;
  std::size_t phases = 0, held = 0;
  for (std::size_t t = 0; t < f.trials; ++t) {
    AgentPartition partition;
    if (f.partition.empty()) {
      partition = AgentPartition::FromMask(m.num_agents(), RandomMask(m.num_agents(), rng));
    } else {
      std::uint64_t mask = 0;
      for (AgentIdx a : AgentsFromIds(m, ParseIdList(f.partition, "--partition"), "--partition")) {
        mask |= std::uint64_t{1} << a;
      }
      partition = AgentPartition::FromMask(m.num_agents(), mask);
    }
    ValidatePartition(m, partition);
    const MergedMarket merged = MergeMarket(m, partition);
    const PhasePlan plan =
        BuildAlternatingPhases(m, partition, StartState(doc, f.common, rng), rng, 16,
                               f.common.budget);
    for (std::size_t ph = 0; ph < plan.phases.size(); ++ph) {
      const Phase& phase = plan.phases[ph];
      ++phases;
      const LemmaReport r = VerifyMergeLemma(m, merged, phase.side, phase.start, phase.agents);
      if (r.holds) {
        ++held;
      } else {
        checks.Record(false, "merge-phase",
                      "trial=" + std::to_string(t) + " phase=" + std::to_string(ph) +
                          " side=" + std::to_string(phase.side) +
                          " " + (r.diffs.empty() ? "" : r.diffs[0]));
      }
    }
  }
  checks.Record(held == phases, "merge",
                "held=" + std::to_string(held) + " phases=" + std::to_string(phases) +
                    " trials=" + std::to_string(f.trials));
}

}  // namespace

void RegisterVerify(CLI::App& app, Action& action) {
  auto f = std::make_shared<VerifyFlags>();
  CLI::App* cmd = app.add_subcommand(
      "verify", "Run theory checks; prints PASS/FAIL per check, exit 5 on any failure");
  cmd->add_option("--seed", f->common.seed, "Random seed")->capture_default_str();
  cmd->add_option("--epsilon", f->common.epsilon, "Offer step size")->capture_default_str();
  cmd->add_option("--budget", f->common.budget, "Best-response budget; 0 for the default")
      ->capture_default_str();
  cmd->add_option("--market", f->market, "Market file, or @example2 / @coffee");
  cmd->add_flag("--example2-cycle", f->example2,
                "Golden offer table, 4-response cycle and A/R rows of the cycling example");
  cmd->add_flag("--fs", f->fs, "Full-substitutability check of every agent of --market");
  cmd->add_option("--box", f->box, "Price range LO:HI for --fs (default -V:V)");
  cmd->add_option("--scan", f->scan,
                  "pairs (every ordered pair) or steps (unit steps, larger boxes) for --fs")
      ->capture_default_str();
  cmd->add_flag("--sparsity", f->sparsity, "Sparsity of --market");
  cmd->add_flag("--upper-bound", f->upper_bound, "Use the degeneracy upper bound for --sparsity");
  cmd->add_option("--expect-sparsity", f->expect_sparsity, "Fail unless sparsity equals this");
  cmd->add_flag("--restriction", f->restriction, "Restricted-market equivalence on --market");
  cmd->add_option("--subset", f->subset, "Agent ids of J (default: random per trial)");
  cmd->add_flag("--merge", f->merge, "Merged-market equivalence on --market");
  cmd->add_option("--partition", f->partition, "Agent ids of J1 (default: random per trial)");
  cmd->add_option("--trials", f->trials, "Trials for --restriction/--merge")
      ->capture_default_str();
  cmd->add_flag("--all", f->all,
                "Built-in calibrations, plus every market check when --market is given");

  cmd->callback([f, &action] {
    action = [f] {
      const bool market_checks = f->fs || f->sparsity || f->restriction || f->merge;
      if (!f->all && !f->example2 && !market_checks) {
        throw UsageError("nothing to verify; pass --all or one of the check flags");
      }
      if (market_checks && f->market.empty()) throw UsageError("--market is required");
      Checks checks;
      if (f->all || f->example2) CheckExample2(checks);
      if (f->all) CheckFsCalibration(checks);
      if (!f->market.empty()) {
        const io::MarketDocument doc = LoadMarketArg(f->market);
        Rng rng(f->common.seed);
        if (f->fs || f->all) CheckFs(checks, doc.market, f->box, f->scan);
        if (f->sparsity || f->all) {
          CheckSparsity(checks, doc.market, f->upper_bound, f->expect_sparsity);
        }
        if (f->restriction || f->all) CheckRestriction(checks, doc, *f, rng);
        if (f->merge || f->all) CheckMerge(checks, doc, *f, rng);
      }
      return checks.failed() ? Exit::kVerifyFailed : Exit::kOk;
    };
  });
}

}  // namespace tradenet::cli
