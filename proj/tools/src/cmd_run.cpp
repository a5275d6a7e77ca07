#include <sstream>

#include "commands.hpp"
#include "common.hpp"
#include "tradenet/dynamics.hpp"
#include "tradenet/experiments.hpp"
#include "tradenet/io/market_file.hpp"
#include "tradenet/io/results.hpp"

namespace tradenet::cli {
namespace {

struct RunFlags {
  CommonOptions common;
  std::string market;
  std::string init;
  std::string schedule = "random";
  std::int64_t first = -1;
  bool trace = false;
  CLI::Option* epsilon_opt = nullptr;
};

// Initial state per --init: "file", "zero" or "uniform:LO:HI".
OfferState InitialState(const io::MarketDocument& doc, const RunFlags& f, Rng& rng,
                        std::string& description) {
  std::string init = f.init;
  if (init.empty()) init = doc.offers ? "file" : "zero";
  description = init;
  const bool eps_given = f.epsilon_opt && f.epsilon_opt->count() > 0;
  if (init == "file") {
    if (!doc.offers) throw UsageError("--init file: the market file has no initial_offers");
    if (!eps_given) return *doc.offers;
    OfferState s(doc.market.num_trades(), doc.market.num_agents(), f.common.epsilon);
    for (TradeIdx t = 0; t < doc.market.num_trades(); ++t) {
      s.set_offer(t, Side::kBuyer, doc.offers->offer(t, Side::kBuyer));
      s.set_offer(t, Side::kSeller, doc.offers->offer(t, Side::kSeller));
    }
    s.MarkAllUnsatisfied();
    return s;
  }
  if (init == "zero") return InitializeOffers(doc.market, ZeroOffers{}, rng, f.common.epsilon);
  if (init.rfind("uniform:", 0) == 0) {
    const auto [lo, hi] = ParseIntRange(init.substr(8), "--init");
    return InitializeOffers(doc.market, UniformOffers{lo, hi}, rng, f.common.epsilon);
  }
  throw UsageError("--init: expected file, zero or uniform:LO:HI, got \"" + init + "\"");
}

void AddRunOptions(CLI::App& cmd, RunFlags& f) {
  cmd.add_option("--market", f.market,
                 "Market file, or @example2 / @coffee for the bundled fixtures")
      ->required();
  f.epsilon_opt = cmd.get_option("--epsilon");
  cmd.add_option("--init", f.init,
                 "Initial offers: file, zero or uniform:LO:HI (default: file if present, "
                 "else zero)");
}

std::string OutcomeLine(const Market& market, const RunResult& r) {
  std::ostringstream os;
  if (std::holds_alternative<Converged>(r.trace.outcome)) {
    os << "outcome=converged iterations=" << r.iterations() << " executed=" << r.executed.size();
  } else if (const auto* c = std::get_if<CycleDetected>(&r.trace.outcome)) {
    os << "outcome=cycle_detected period=" << c->period << " prefix=" << c->prefix;
  } else {
    os << "outcome=budget_exhausted iterations=" << r.iterations();
  }
  os << " agents=" << market.num_agents() << " trades=" << market.num_trades();
  return os.str();
}

}  // namespace

void RegisterRun(CLI::App& app, Action& action) {
  auto f = std::make_shared<RunFlags>();
  CLI::App* cmd = app.add_subcommand("run", "Run the best-response dynamic on a market file");
  AddCommonOptions(*cmd, f->common);
  AddRunOptions(*cmd, *f);
  cmd->add_option("--schedule", f->schedule,
                  "random (uniform over unsatisfied agents) or alternating (two agents)")
      ->check(CLI::IsMember({"random", "alternating"}))
      ->capture_default_str();
  cmd->add_option("--first", f->first, "Agent id that moves first under --schedule alternating");
  cmd->add_flag("--trace", f->trace, "Also write trace.csv with every best response");

  cmd->callback([f, &action] {
    action = [f] {
      const io::MarketDocument doc = LoadMarketArg(f->market);
      Rng rng(f->common.seed);
      std::string init;
      const OfferState initial = InitialState(doc, *f, rng, init);
      RunOptions options;
      options.max_iterations = f->common.budget;
      options.record_steps = f->trace || f->schedule == "alternating";
      RunResult result;
      if (f->schedule == "alternating") {
        AgentIdx first = 0;
        if (f->first >= 0) {
          const auto found = doc.market.FindAgent(f->first);
          if (!found) throw UsageError("--first: no agent with id " + std::to_string(f->first));
          first = *found;
        }
        result = RunAlternating(doc.market, initial, first, options);
      } else {
        result = Run(doc.market, initial, rng, options);
      }
      io::RunBundleInfo info;
      info.command = "run";
      info.market_source = f->market;
      info.seed = f->common.seed;
      info.schedule = f->schedule;
      info.init = init;
      info.budget = f->common.budget;
      info.write_trace = f->trace;
      const auto dir = OutputDir(f->common);
      io::WriteRunBundle(dir, doc.market, initial, result, info);
      Report(OutcomeLine(doc.market, result) + " out=" + dir.string());
      return 0;
    };
  });
}

void RegisterShock(CLI::App& app, Action& action) {
  struct Flags : RunFlags {
    double proportion = 0.25;
    double size = 0.1;
    std::string values = "1:100";
  };
  auto f = std::make_shared<Flags>();
  CLI::App* cmd = app.add_subcommand(
      "shock", "Converge, resample the values of some buyers/sellers, and re-converge");
  AddCommonOptions(*cmd, f->common);
  AddRunOptions(*cmd, *f);
  cmd->add_option("--proportion", f->proportion, "Share of buyers/sellers to shock")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--size", f->size, "Relative shock size s: new c in [c(1-s), c(1+s)]")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--values", f->values, "Value set C as LO:HI (new values are clipped to it)")
      ->capture_default_str();

  cmd->callback([f, &action] {
    action = [f] {
      const io::MarketDocument doc = LoadMarketArg(f->market);
      const auto [lo, hi] = ParseIntRange(f->values, "--values");
      Rng rng(f->common.seed);
      std::string init;
      const OfferState initial = InitialState(doc, *f, rng, init);
      RunOptions options;
      options.max_iterations = f->common.budget;
      options.record_steps = false;
      const RunResult before = Run(doc.market, initial, rng, options);
      if (!before.converged()) {
        throw PreconditionError("the initial run did not converge within the budget");
      }
      const ShockOutcome shock = ApplyShock(doc.market, before.final_state,
                                            ShockSpec{f->proportion, f->size},
                                            ValueSet{lo, hi}, rng, options);
      io::RunBundleInfo info;
      info.command = "shock";
      info.market_source = f->market;
      info.seed = f->common.seed;
      info.schedule = "random";
      info.init = init;
      info.budget = f->common.budget;
      const auto dir = OutputDir(f->common);
      io::WriteRunBundle(dir / "before", doc.market, initial, before, info);
      io::WriteRunBundle(dir / "after", shock.market, before.final_state, shock.rerun, info);
      io::WriteFile(dir / "market_shocked.json", io::SerializeMarket(shock.market));

      std::ostringstream csv;
      csv << "shock_size,shocked_proportion,shocked,propagation,t0,t1,reconv_norm\n";
      csv << io::FormatReal(f->size) << ',' << io::FormatReal(f->proportion) << ','
          << shock.shocked.size() << ',' << io::FormatReal(shock.propagation) << ','
          << before.iterations() << ',' << shock.rerun.iterations() << ','
          << (shock.rerun.converged() && before.iterations() > 0
                  ? io::FormatReal(double(shock.rerun.iterations()) / double(before.iterations()))
                  : "")
          << '\n';
      io::WriteFile(dir / "shock.csv", csv.str());
      Report("shocked=" + std::to_string(shock.shocked.size()) +
             " propagation=" + io::FormatReal(shock.propagation) +
             " t0=" + std::to_string(before.iterations()) +
             " t1=" + std::to_string(shock.rerun.iterations()) +
             (shock.rerun.converged() ? " reconverged=1" : " reconverged=0") +
             " out=" + dir.string());
      return 0;
    };
  });
}

}  // namespace tradenet::cli
