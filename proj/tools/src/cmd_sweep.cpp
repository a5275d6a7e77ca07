#include <sstream>

#include "commands.hpp"
#include "common.hpp"
#include "tradenet/experiments.hpp"
#include "tradenet/io/experiment_file.hpp"
#include "tradenet/io/market_file.hpp"
#include "tradenet/io/results.hpp"

namespace tradenet::cli {
namespace {

struct SweepFlags {
  CommonOptions common;
  TopologyFlags topology;
  std::string config;
  std::string kind = "convergence";
  std::string axis = "none";
  std::string sweep_values;
  std::size_t runs = 100;
  std::string init = "uniform:1:100";
  double shock_proportion = 0.25;
  double shock_size = 0.1;
  bool no_series = false;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* epsilon_opt = nullptr;
  CLI::Option* budget_opt = nullptr;
};

InitPolicy ParseInit(const std::string& text) {
  if (text == "zero") return ZeroOffers{};
  if (text.rfind("uniform:", 0) == 0) {
    const auto [lo, hi] = ParseIntRange(text.substr(8), "--init");
    return UniformOffers{lo, hi};
  }
  throw UsageError("--init: expected zero or uniform:LO:HI, got \"" + text + "\"");
}

ExperimentConfig ConfigFromFlags(const SweepFlags& f) {
  ExperimentConfig c;
  c.kind = *ParseExperimentKind(f.kind);
  c.topology = TopologyFromFlags(f.topology);
  const auto [lo, hi] = ParseIntRange(f.topology.values, "--values");
  c.values = ValueSet{lo, hi};
  c.init = ParseInit(f.init);
  c.epsilon = f.common.epsilon;
  c.runs = f.runs;
  c.axis = *ParseSweepAxis(f.axis);
  c.sweep_values = ParseRealList(f.sweep_values, "--sweep-values");
  c.base_seed = f.common.seed;
  c.budget = f.common.budget;
  c.shock = ShockSpec{f.shock_proportion, f.shock_size};
  c.record_series = !f.no_series;
  ValidateExperiment(c);
  return c;
}

}  // namespace

void RegisterSweep(CLI::App& app, Action& action) {
  auto f = std::make_shared<SweepFlags>();
  CLI::App* cmd = app.add_subcommand(
      "sweep", "Run a batch experiment (from --config or flags) and write aggregates");
  AddCommonOptions(*cmd, f->common, /*jobs=*/true);
  f->seed_opt = cmd->get_option("--seed");
  f->epsilon_opt = cmd->get_option("--epsilon");
  f->budget_opt = cmd->get_option("--budget");
  AddTopologyOptions(*cmd, f->topology);
  cmd->add_option("--config", f->config,
                  "Experiment file; --seed/--epsilon/--budget given on the command line "
                  "override its values");
  cmd->add_option("--kind", f->kind, "convergence, welfare or shock")
      ->check(CLI::IsMember({"convergence", "welfare", "shock"}))
      ->capture_default_str();
  cmd->add_option("--axis", f->axis,
                  "none, market_size, buyer_proportion, intermediary_count, lambda, "
                  "shock_size or shocked_proportion")
      ->check(CLI::IsMember({"none", "market_size", "buyer_proportion", "intermediary_count",
                             "lambda", "shock_size", "shocked_proportion"}))
      ->capture_default_str();
  cmd->add_option("--sweep-values", f->sweep_values, "Comma-separated axis values");
  cmd->add_option("--runs", f->runs, "Runs per cell")->capture_default_str();
  cmd->add_option("--init", f->init, "Initial offers: zero or uniform:LO:HI")
      ->capture_default_str();
  cmd->add_option("--shock-proportion", f->shock_proportion,
                  "Share of buyers/sellers shocked (shock kind)")
      ->capture_default_str();
  cmd->add_option("--shock-size", f->shock_size, "Relative shock size (shock kind)")
      ->capture_default_str();
  cmd->add_flag("--no-series", f->no_series, "Skip per-run satisfied series (no paths.csv data)");

  cmd->callback([f, &action] {
    action = [f] {
      std::vector<ExperimentConfig> configs;
      if (!f->config.empty()) {
        configs = io::ParseExperimentConfigs(io::ReadFile(f->config));
        for (ExperimentConfig& c : configs) {
          if (f->seed_opt->count() > 0) c.base_seed = f->common.seed;
          if (f->epsilon_opt->count() > 0) c.epsilon = f->common.epsilon;
          if (f->budget_opt->count() > 0) c.budget = f->common.budget;
          ValidateExperiment(c);
        }
      } else {
        configs.push_back(ConfigFromFlags(*f));
      }
      const std::vector<ExperimentResult> results = Sweep(configs, f->common.jobs);
      const auto dir = OutputDir(f->common);
      io::WriteSweepBundle(dir, results);

      std::size_t runs = 0, converged = 0, failed = 0;
      for (const ExperimentResult& r : results) {
        for (const CellResult& cell : r.cells) {
          runs += cell.aggregate.runs;
          converged += cell.aggregate.converged;
          failed += cell.aggregate.failed;
        }
      }
      std::ostringstream os;
      os << "experiments=" << results.size() << " runs=" << runs << " converged=" << converged
         << " failed=" << failed << " out=" << dir.string();
      Report(os.str());
      return 0;
    };
  });
}

}  // namespace tradenet::cli
