#include "tradenet/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "tradenet/errors.hpp"

namespace tradenet {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t CountValue(double v, const char* what) {
  if (!(v >= 0.0) || v != std::floor(v)) {
    throw DomainError(std::string(what) + " must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

// Splits `total` agents into buyers and sellers with the given buyer share,
// keeping at least one of each.
std::pair<std::size_t, std::size_t> Split(std::size_t total, double buyer_share) {
  if (total < 2) throw DomainError("need at least one buyer and one seller");
  auto buyers = static_cast<std::size_t>(std::llround(buyer_share * static_cast<double>(total)));
  buyers = std::clamp<std::size_t>(buyers, 1, total - 1);
  return {buyers, total - buyers};
}

std::optional<std::int64_t> ScalarValue(const Valuation& v) {
  if (const auto* b = std::get_if<UnitBuyer>(&v.kind())) return b->value;
  if (const auto* s = std::get_if<UnitSeller>(&v.kind())) return s->cost;
  return std::nullopt;
}

bool WithinLemmaBound(const RunStats& stats, std::int64_t v) {
  return stats.min_offer >= -2 * v - 1 && stats.max_offer <= 2 * v + 1;
}

}  // namespace

const char* ExperimentKindName(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kConvergence:
      return "convergence";
    case ExperimentKind::kWelfare:
      return "welfare";
    case ExperimentKind::kShock:
      return "shock";
  }
  return "convergence";
}

std::optional<ExperimentKind> ParseExperimentKind(std::string_view name) {
  for (auto k : {ExperimentKind::kConvergence, ExperimentKind::kWelfare, ExperimentKind::kShock}) {
    if (name == ExperimentKindName(k)) return k;
  }
  return std::nullopt;
}

const char* SweepAxisName(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kNone:
      return "none";
    case SweepAxis::kMarketSize:
      return "market_size";
    case SweepAxis::kBuyerProportion:
      return "buyer_proportion";
    case SweepAxis::kIntermediaryCount:
      return "intermediary_count";
    case SweepAxis::kLambda:
      return "lambda";
    case SweepAxis::kShockSize:
      return "shock_size";
    case SweepAxis::kShockedProportion:
      return "shocked_proportion";
  }
  return "none";
}

std::optional<SweepAxis> ParseSweepAxis(std::string_view name) {
  for (auto a : {SweepAxis::kNone, SweepAxis::kMarketSize, SweepAxis::kBuyerProportion,
                 SweepAxis::kIntermediaryCount, SweepAxis::kLambda, SweepAxis::kShockSize,
                 SweepAxis::kShockedProportion}) {
    if (name == SweepAxisName(a)) return a;
  }
  return std::nullopt;
}

std::vector<CellSetup> ExpandCells(const ExperimentConfig& config) {
  std::vector<CellSetup> cells;
  if (config.axis == SweepAxis::kNone) {
    cells.push_back({0.0, config.topology, config.shock});
    return cells;
  }
  for (double v : config.sweep_values) {
    CellSetup cell{v, config.topology, config.shock};
    auto* bs = std::get_if<BsTopology>(&cell.topology.kind);
    auto* bis = std::get_if<BisTopology>(&cell.topology.kind);
    auto* gen = std::get_if<GeneralTopology>(&cell.topology.kind);
    switch (config.axis) {
      case SweepAxis::kNone:
        break;
      case SweepAxis::kMarketSize: {
        const std::size_t n = CountValue(v, "market size");
        if (bs) {
          const double share = double(bs->buyers) / double(bs->buyers + bs->sellers);
          std::tie(bs->buyers, bs->sellers) = Split(n, share);
        } else if (bis) {
          const double share = double(bis->buyers) / double(bis->buyers + bis->sellers);
          std::tie(bis->buyers, bis->sellers) = Split(n, share);
        } else {
          gen->n = n;
        }
        break;
      }
      case SweepAxis::kBuyerProportion:
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("buyer proportion must lie in [0, 1]");
        if (bs) {
          std::tie(bs->buyers, bs->sellers) = Split(bs->buyers + bs->sellers, v);
        } else if (bis) {
          std::tie(bis->buyers, bis->sellers) = Split(bis->buyers + bis->sellers, v);
        } else {
          throw DomainError("buyer proportion sweeps need a BS or BIS topology");
        }
        break;
      case SweepAxis::kIntermediaryCount:
        if (!bis) throw DomainError("intermediary count sweeps need a BIS topology");
        bis->intermediaries = CountValue(v, "intermediary count");
        break;
      case SweepAxis::kLambda:
        if (!gen) throw DomainError("lambda sweeps need a general topology");
        gen->lambda = v;
        break;
      case SweepAxis::kShockSize:
        cell.shock.size = v;
        break;
      case SweepAxis::kShockedProportion:
        cell.shock.shocked_proportion = v;
        break;
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

void ValidateExperiment(const ExperimentConfig& config) {
  if (config.runs == 0) throw DomainError("runs per cell must be at least 1");
  if (config.epsilon <= 0) throw DomainError("epsilon must be positive");
  if (config.values.lo > config.values.hi) throw DomainError("value set is empty");
  for (std::size_t k = 0; k < config.sweep_values.size(); ++k) {
    if (!std::isfinite(config.sweep_values[k])) throw DomainError("sweep values must be finite");
    if (k > 0 && !(config.sweep_values[k - 1] < config.sweep_values[k])) {
      throw DomainError("sweep values must be strictly increasing");
    }
  }
  if (config.axis != SweepAxis::kNone && config.sweep_values.empty()) {
    throw DomainError("sweep axis given without sweep values");
  }
  if (const auto* u = std::get_if<UniformOffers>(&config.init); u && u->lo > u->hi) {
    throw DomainError("initial offer range is empty");
  }
  if (std::holds_alternative<ExplicitOffers>(config.init)) {
    throw DomainError("experiments generate their markets; explicit initial offers are not supported");
  }
  for (const CellSetup& cell : ExpandCells(config)) {
    ValidateTopology(cell.topology);
    if (!(cell.shock.shocked_proportion >= 0.0 && cell.shock.shocked_proportion <= 1.0)) {
      throw DomainError("shocked proportion must lie in [0, 1]");
    }
    if (!(cell.shock.size >= 0.0) || !std::isfinite(cell.shock.size)) {
      throw DomainError("shock size must be non-negative");
    }
  }
}

std::uint64_t RunSeed(std::uint64_t base_seed, std::size_t cell, std::size_t run) {
  std::uint64_t h = SplitMix64(base_seed);
  h = SplitMix64(h ^ (0x632be59bd9b4e019ULL * (cell + 1)));
  return SplitMix64(h ^ (0x85157af5ULL * (run + 1)));
}

Summary Summarize(const std::vector<double>& xs) {
  Summary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() < 2) return s;
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return s;
}

CellAggregate Aggregate(const std::vector<RunRecord>& runs) {
  CellAggregate agg;
  agg.runs = runs.size();
  std::vector<double> iterations;
  std::array<std::vector<double>, 3> utility;
  std::vector<double> propagation;
  std::vector<double> normalized;
  for (const RunRecord& r : runs) {
    if (!r.error.empty()) ++agg.failed;
    if (!r.converged) continue;
    ++agg.converged;
    iterations.push_back(static_cast<double>(r.iterations));
    for (int c = 0; c < 3; ++c) {
      if (r.class_utility[c]) utility[c].push_back(*r.class_utility[c]);
    }
    if (r.shocked > 0 || r.reconverged) propagation.push_back(r.propagation);
    if (r.normalized_reconvergence) normalized.push_back(*r.normalized_reconvergence);
  }
  agg.converged_fraction =
      runs.empty() ? 0.0 : static_cast<double>(agg.converged) / static_cast<double>(runs.size());
  agg.iterations = Summarize(iterations);
  for (int c = 0; c < 3; ++c) agg.class_utility[c] = Summarize(utility[c]);
  agg.propagation = Summarize(propagation);
  agg.normalized_reconvergence = Summarize(normalized);
  return agg;
}

ShockOutcome ApplyShock(const Market& market, const OfferState& state, const ShockSpec& shock,
                        ValueSet values, Rng& rng, const RunOptions& options) {
  if (state.unsatisfied_count() != 0) {
    throw PreconditionError("shocks apply to converged states only");
  }
  std::vector<AgentIdx> candidates;
  for (AgentIdx i = 0; i < market.num_agents(); ++i) {
    if (ScalarValue(market.valuation(i))) candidates.push_back(i);
  }
  const auto count = static_cast<std::size_t>(
      std::llround(shock.shocked_proportion * static_cast<double>(candidates.size())));
  // Partial Fisher-Yates: the first `count` entries are a uniform sample.
  for (std::size_t k = 0; k < count; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, candidates.size() - 1);
    std::swap(candidates[k], candidates[pick(rng)]);
  }
  ShockOutcome out;
  out.shocked.assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(out.shocked.begin(), out.shocked.end());

  out.market = market;
  for (AgentIdx i : out.shocked) {
    const std::int64_t c = *ScalarValue(market.valuation(i));
    const double fc = static_cast<double>(c);
    std::int64_t lo = static_cast<std::int64_t>(std::ceil(fc * (1.0 - shock.size) - 1e-9));
    std::int64_t hi = static_cast<std::int64_t>(std::floor(fc * (1.0 + shock.size) + 1e-9));
    lo = std::max(lo, values.lo);
    hi = std::min(hi, values.hi);
    if (lo > hi) lo = hi = c;
    const std::int64_t fresh = std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
    const bool buyer = std::holds_alternative<UnitBuyer>(market.valuation(i).kind());
    out.market = out.market.WithValuation(i, buyer ? Valuation::Buyer(fresh)
                                                   : Valuation::Seller(fresh));
  }

  OfferState start = state;
  std::vector<char> is_shocked(market.num_agents(), 0);
  for (AgentIdx i : out.shocked) {
    start.MarkUnsatisfied(i);
    is_shocked[i] = 1;
  }
  std::vector<char> impacted(market.num_agents(), 0);
  RunOptions opts = options;
  opts.already_in_main_phase = true;
  opts.observer = [&](const OfferState& s, const TraceStep& step) {
    for (const OfferChange& c : step.changes) {
      const AgentIdx other = market.Counterpart(c.trade, step.agent);
      if (!is_shocked[other] && s.is_unsatisfied(other)) impacted[other] = 1;
    }
    if (options.observer) options.observer(s, step);
  };
  out.rerun = Run(out.market, std::move(start), rng, opts);
  const std::size_t others = market.num_agents() - out.shocked.size();
  const auto hit = static_cast<std::size_t>(std::count(impacted.begin(), impacted.end(), 1));
  out.propagation = others == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(others);
  return out;
}

RunRecord ExecuteRun(const ExperimentConfig& config, const CellSetup& setup,
                     std::uint64_t seed) {
  RunRecord rec;
  rec.seed = seed;
  Rng rng(seed);
  const MarketSkeleton skeleton = Generate(setup.topology, rng);
  const Market market = AssignValuations(skeleton, config.values, rng);
  rec.num_agents = market.num_agents();
  rec.num_trades = market.num_trades();
  OfferState state = InitializeOffers(market, config.init, rng, config.epsilon);
  rec.value_bound = ValueBound(market, state);

  RunOptions options;
  options.max_iterations = config.budget;
  options.record_steps = false;
  const RunResult result = Run(market, std::move(state), rng, options);
  rec.converged = result.converged();
  rec.iterations = result.iterations();
  if (config.record_series) rec.satisfied_series = result.trace.satisfied_series;
  rec.min_offer = result.stats.min_offer;
  rec.max_offer = result.stats.max_offer;
  rec.offers_within_bound = WithinLemmaBound(result.stats, rec.value_bound);
  rec.gap_violations = result.stats.gap_violations;
  if (!rec.converged) return rec;

  std::array<double, 3> sum{};
  std::array<std::size_t, 3> n{};
  std::vector<std::vector<TradeIdx>> held(market.num_agents());
  for (TradeIdx t : result.executed) {
    held[market.trade(t).buyer].push_back(t);
    held[market.trade(t).seller].push_back(t);
  }
  for (AgentIdx i = 0; i < market.num_agents(); ++i) {
    int cls = -1;
    switch (market.agent(i).role) {
      case Role::kBuyer:
        cls = kBuyerClass;
        break;
      case Role::kSeller:
        cls = kSellerClass;
        break;
      case Role::kIntermediary:
        cls = kIntermediaryClass;
        break;
      case Role::kGeneric:
        break;
    }
    if (cls >= 0) {
      sum[cls] += static_cast<double>(result.utilities[i]);
      ++n[cls];
    }
    std::sort(held[i].begin(), held[i].end());
    const ExtValue v = Evaluate(market.valuation(i), market.BundleFromTrades(i, held[i]),
                                market.incident(i));
    rec.payment_balance += v.value() - result.utilities[i];
  }
  for (int c = 0; c < 3; ++c) {
    if (n[c] > 0) rec.class_utility[c] = sum[c] / static_cast<double>(n[c]);
  }

  if (config.kind != ExperimentKind::kShock) return rec;
  ShockOutcome shock = ApplyShock(market, result.final_state, setup.shock, config.values, rng,
                                  options);
  rec.shocked = shock.shocked.size();
  rec.propagation = shock.propagation;
  rec.reconverged = shock.rerun.converged();
  rec.reconvergence_iterations = shock.rerun.iterations();
  if (rec.reconverged && rec.iterations > 0) {
    rec.normalized_reconvergence = static_cast<double>(rec.reconvergence_iterations) /
                                   static_cast<double>(rec.iterations);
  }
  // The resumed dynamic starts from the converged offers, so its bound uses
  // those offers together with the new values.
  const std::int64_t v2 = ValueBound(shock.market, result.final_state);
  rec.offers_within_bound = rec.offers_within_bound && WithinLemmaBound(shock.rerun.stats, v2);
  rec.gap_violations += shock.rerun.stats.gap_violations;
  return rec;
}

std::vector<ExperimentResult> Sweep(const std::vector<ExperimentConfig>& configs,
                                    std::size_t jobs) {
  struct Task {
    std::size_t config;
    std::size_t cell;
    std::size_t run;
  };
  std::vector<ExperimentResult> results;
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    ValidateExperiment(configs[c]);
    ExperimentResult r;
    r.config = configs[c];
    for (CellSetup& setup : ExpandCells(configs[c])) {
      CellResult cell;
      cell.setup = std::move(setup);
      cell.runs.resize(configs[c].runs);
      for (std::size_t k = 0; k < configs[c].runs; ++k) {
        tasks.push_back({c, r.cells.size(), k});
      }
      r.cells.push_back(std::move(cell));
    }
    results.push_back(std::move(r));
  }

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      const Task& t = tasks[k];
      ExperimentResult& r = results[t.config];
      CellResult& cell = r.cells[t.cell];
      const std::uint64_t seed = RunSeed(r.config.base_seed, t.cell, t.run);
      try {
        cell.runs[t.run] = ExecuteRun(r.config, cell.setup, seed);
      } catch (const std::exception& e) {
        RunRecord failed;
        failed.seed = seed;
        failed.error = e.what();
        cell.runs[t.run] = std::move(failed);
      }
    }
  };
  if (jobs == 0) jobs = std::max(1U, std::thread::hardware_concurrency());
  jobs = std::min(jobs, std::max<std::size_t>(1, tasks.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }
  for (ExperimentResult& r : results) {
    for (CellResult& cell : r.cells) cell.aggregate = Aggregate(cell.runs);
  }
  return results;
}

ExperimentResult RunExperiment(const ExperimentConfig& config, std::size_t jobs) {
  return std::move(Sweep({config}, jobs).front());
}

ExperimentResult ConvergenceExperiment(ExperimentConfig config, std::size_t jobs) {
  config.kind = ExperimentKind::kConvergence;
  return RunExperiment(config, jobs);
}

ExperimentResult WelfareExperiment(ExperimentConfig config, std::size_t jobs) {
  config.kind = ExperimentKind::kWelfare;
  return RunExperiment(config, jobs);
}

ExperimentResult ShockExperiment(ExperimentConfig config, const ShockSpec& shock,
                                 std::size_t jobs) {
  config.kind = ExperimentKind::kShock;
  config.shock = shock;
  return RunExperiment(config, jobs);
}

}  // namespace tradenet
