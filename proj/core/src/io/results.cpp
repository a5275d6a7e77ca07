#include "tradenet/io/results.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json_util.hpp"
#include "tradenet/io/experiment_file.hpp"
#include "tradenet/io/market_file.hpp"

namespace tradenet::io {
namespace {

using detail::Json;

std::string Line(std::initializer_list<std::string> fields) {
  std::string out;
  bool first = true;
  for (const std::string& f : fields) {
    if (!first) out += ',';
    out += f;
    first = false;
  }
  out += '\n';
  return out;
}

std::string Int(std::int64_t x) { return std::to_string(x); }
std::string UInt(std::uint64_t x) { return std::to_string(x); }

Json SummaryJson(const Summary& s) {
  Json j;
  j["count"] = s.count;
  j["mean"] = s.mean;
  j["std"] = s.std;
  return j;
}

const char* OutcomeName(const Outcome& o) {
  if (std::holds_alternative<Converged>(o)) return "converged";
  if (std::holds_alternative<CycleDetected>(o)) return "cycle_detected";
  return "budget_exhausted";
}

}  // namespace

std::string FormatReal(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

std::string SeriesCsv(const std::vector<double>& series, std::size_t num_agents) {
  std::string out = "iteration,satisfied_proportion,unsatisfied_count\n";
  for (std::size_t t = 0; t < series.size(); ++t) {
    const auto unsatisfied =
        static_cast<std::int64_t>(std::llround((1.0 - series[t]) * static_cast<double>(num_agents)));
    out += Line({UInt(t), FormatReal(series[t]), Int(unsatisfied)});
  }
  return out;
}

std::string AggregatesCsv(const std::vector<ExperimentResult>& results) {
  std::string out = "sweep_value,mean_iterations,std_iterations,converged_fraction\n";
  for (const ExperimentResult& r : results) {
    for (const CellResult& c : r.cells) {
      const CellAggregate& a = c.aggregate;
      out += Line({FormatReal(c.setup.sweep_value), FormatReal(a.iterations.mean),
                   FormatReal(a.iterations.std), FormatReal(a.converged_fraction)});
    }
  }
  return out;
}

std::string WelfareCsv(const std::vector<ExperimentResult>& results) {
  std::string out = "sweep_value,class,mean_utility,std_utility\n";
  for (const ExperimentResult& r : results) {
    for (const CellResult& c : r.cells) {
      for (int k = 0; k < 3; ++k) {
        const Summary& s = c.aggregate.class_utility[k];
        if (s.count == 0) continue;
        out += Line({FormatReal(c.setup.sweep_value), kAgentClassNames[k], FormatReal(s.mean),
                     FormatReal(s.std)});
      }
    }
  }
  return out;
}

std::string ShocksCsv(const std::vector<ExperimentResult>& results) {
  std::string out =
      "shock_size,shocked_proportion,propagation_mean,propagation_std,reconv_norm_mean,"
      "reconv_norm_std\n";
  for (const ExperimentResult& r : results) {
    if (r.config.kind != ExperimentKind::kShock) continue;
    for (const CellResult& c : r.cells) {
      const CellAggregate& a = c.aggregate;
      out += Line({FormatReal(c.setup.shock.size), FormatReal(c.setup.shock.shocked_proportion),
                   FormatReal(a.propagation.mean), FormatReal(a.propagation.std),
                   FormatReal(a.normalized_reconvergence.mean),
                   FormatReal(a.normalized_reconvergence.std)});
    }
  }
  return out;
}

std::string RunsCsv(const std::vector<ExperimentResult>& results) {
  std::string out =
      "experiment,cell,sweep_value,run,seed,agents,trades,converged,iterations,value_bound,"
      "min_offer,max_offer,offers_within_bound,gap_violations,buyer_utility,seller_utility,"
      "intermediary_utility,shocked,propagation,reconverged,reconvergence_iterations,error\n";
  const auto opt = [](const std::optional<double>& x) { return x ? FormatReal(*x) : ""; };
  for (std::size_t e = 0; e < results.size(); ++e) {
    const ExperimentResult& r = results[e];
    for (std::size_t c = 0; c < r.cells.size(); ++c) {
      const CellResult& cell = r.cells[c];
      for (std::size_t k = 0; k < cell.runs.size(); ++k) {
        const RunRecord& rec = cell.runs[k];
        std::string error = rec.error;
        std::replace(error.begin(), error.end(), ',', ';');
        std::replace(error.begin(), error.end(), '\n', ' ');
        out += Line({UInt(e), UInt(c), FormatReal(cell.setup.sweep_value), UInt(k),
                     UInt(rec.seed), UInt(rec.num_agents), UInt(rec.num_trades),
                     rec.converged ? "1" : "0", UInt(rec.iterations), Int(rec.value_bound),
                     Int(rec.min_offer), Int(rec.max_offer),
                     rec.offers_within_bound ? "1" : "0", UInt(rec.gap_violations),
                     opt(rec.class_utility[0]), opt(rec.class_utility[1]),
                     opt(rec.class_utility[2]), UInt(rec.shocked), FormatReal(rec.propagation),
                     rec.reconverged ? "1" : "0", UInt(rec.reconvergence_iterations), error});
      }
    }
  }
  return out;
}

std::string PathsCsv(const std::vector<ExperimentResult>& results, std::size_t max_points) {
  std::string out = "sweep_value,iteration,mean_satisfied,std_satisfied\n";
  max_points = std::max<std::size_t>(max_points, 2);
  for (const ExperimentResult& r : results) {
    for (const CellResult& cell : r.cells) {
      std::size_t longest = 0;
      for (const RunRecord& rec : cell.runs) {
        longest = std::max(longest, rec.satisfied_series.size());
      }
      if (longest == 0) continue;
      const std::size_t last = longest - 1;
      const std::size_t stride = std::max<std::size_t>(1, (last + max_points - 2) / (max_points - 1));
      for (std::size_t t = 0;; t = std::min(last, t + stride)) {
        std::vector<double> xs;
        for (const RunRecord& rec : cell.runs) {
          if (rec.satisfied_series.empty()) continue;
          xs.push_back(rec.satisfied_series[std::min(t, rec.satisfied_series.size() - 1)]);
        }
        const Summary s = Summarize(xs);
        out += Line({FormatReal(cell.setup.sweep_value), UInt(t), FormatReal(s.mean),
                     FormatReal(s.std)});
        if (t == last) break;
      }
    }
  }
  return out;
}

std::string TraceCsv(const Market& market, const DynamicsTrace& trace) {
  std::string out = "iteration,agent,demanded,changes\n";
  for (const TraceStep& s : trace.steps) {
    std::string demanded;
    for (TradeIdx t : market.TradesInBundle(s.agent, s.demanded)) {
      if (!demanded.empty()) demanded += ' ';
      demanded += std::to_string(market.trade(t).id);
    }
    std::string changes;
    for (const OfferChange& c : s.changes) {
      if (!changes.empty()) changes += ' ';
      changes += std::to_string(market.trade(c.trade).id) +
                 (c.side == Side::kBuyer ? ":b:" : ":s:") + std::to_string(c.before) + ">" +
                 std::to_string(c.after);
    }
    out += Line({UInt(s.iteration), Int(market.agent(s.agent).id), demanded, changes});
  }
  return out;
}

void WriteSweepBundle(const std::filesystem::path& dir,
                      const std::vector<ExperimentResult>& results) {
  Json meta;
  meta["artifact"] = "tradenet";
  meta["version"] = kArtifactVersion;
  meta["command"] = "sweep";
  meta["seed_rule"] = "splitmix64 chain over (base_seed, cell, run)";
  meta["std_estimator"] = "sample (n - 1)";
  Json configs = Json::array();
  for (const ExperimentResult& r : results) {
    configs.push_back(Json::parse(SerializeExperimentConfig(r.config)));
  }
  meta["experiments"] = std::move(configs);

  Json summary = Json::array();
  for (const ExperimentResult& r : results) {
    Json exp;
    exp["kind"] = ExperimentKindName(r.config.kind);
    exp["axis"] = SweepAxisName(r.config.axis);
    Json cells = Json::array();
    for (const CellResult& c : r.cells) {
      const CellAggregate& a = c.aggregate;
      Json jc;
      jc["sweep_value"] = c.setup.sweep_value;
      jc["runs"] = a.runs;
      jc["converged"] = a.converged;
      jc["failed"] = a.failed;
      jc["converged_fraction"] = a.converged_fraction;
      jc["iterations"] = SummaryJson(a.iterations);
      for (int k = 0; k < 3; ++k) {
        jc["utility"][kAgentClassNames[k]] = SummaryJson(a.class_utility[k]);
      }
      if (r.config.kind == ExperimentKind::kShock) {
        jc["propagation"] = SummaryJson(a.propagation);
        jc["normalized_reconvergence"] = SummaryJson(a.normalized_reconvergence);
      }
      std::size_t bound_violations = 0;
      std::size_t gap_violations = 0;
      for (const RunRecord& rec : c.runs) {
        bound_violations += !rec.offers_within_bound;
        gap_violations += rec.gap_violations;
      }
      jc["offer_bound_violations"] = bound_violations;
      jc["gap_violations"] = gap_violations;
      cells.push_back(std::move(jc));
    }
    exp["cells"] = std::move(cells);
    summary.push_back(std::move(exp));
  }

  WriteFile(dir / "metadata.json", meta.dump(2) + "\n");
  WriteFile(dir / "summary.json", summary.dump(2) + "\n");
  WriteFile(dir / "aggregates.csv", AggregatesCsv(results));
  WriteFile(dir / "welfare.csv", WelfareCsv(results));
  WriteFile(dir / "shocks.csv", ShocksCsv(results));
  WriteFile(dir / "runs.csv", RunsCsv(results));
  WriteFile(dir / "paths.csv", PathsCsv(results));
}

void WriteRunBundle(const std::filesystem::path& dir, const Market& market,
                    const OfferState& initial, const RunResult& result,
                    const RunBundleInfo& info) {
  Json meta;
  meta["artifact"] = "tradenet";
  meta["version"] = kArtifactVersion;
  meta["command"] = info.command;
  meta["market"] = info.market_source;
  meta["seed"] = info.seed;
  meta["schedule"] = info.schedule;
  meta["init"] = info.init;
  meta["epsilon"] = initial.epsilon();
  meta["budget"] = info.budget;

  Json summary;
  summary["outcome"] = OutcomeName(result.trace.outcome);
  summary["iterations"] = result.iterations();
  if (const auto* c = std::get_if<CycleDetected>(&result.trace.outcome)) {
    summary["cycle_period"] = c->period;
    summary["cycle_prefix"] = c->prefix;
  }
  summary["agents"] = market.num_agents();
  summary["trades"] = market.num_trades();
  summary["value_bound"] = ValueBound(market, initial);
  summary["min_offer"] = result.stats.min_offer;
  summary["max_offer"] = result.stats.max_offer;
  summary["gap_violations"] = result.stats.gap_violations;
  Json offers = Json::array();
  for (TradeIdx t = 0; t < market.num_trades(); ++t) {
    offers.push_back({{"trade", market.trade(t).id},
                      {"buyer", result.final_state.offer(t, Side::kBuyer)},
                      {"seller", result.final_state.offer(t, Side::kSeller)}});
  }
  summary["final_offers"] = std::move(offers);
  if (result.converged()) {
    Json executed = Json::array();
    for (TradeIdx t : result.executed) executed.push_back(market.trade(t).id);
    summary["executed"] = std::move(executed);
    Json utilities = Json::array();
    for (AgentIdx i = 0; i < market.num_agents(); ++i) {
      utilities.push_back({{"agent", market.agent(i).id}, {"utility", result.utilities[i]}});
    }
    summary["utilities"] = std::move(utilities);
  }

  WriteFile(dir / "metadata.json", meta.dump(2) + "\n");
  WriteFile(dir / "summary.json", summary.dump(2) + "\n");
  WriteFile(dir / "series.csv", SeriesCsv(result.trace.satisfied_series, market.num_agents()));
  if (info.write_trace) WriteFile(dir / "trace.csv", TraceCsv(market, result.trace));
}

}  // namespace tradenet::io
