#include "tradenet/dynamics.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <string>

#include "tradenet/demand.hpp"
#include "tradenet/errors.hpp"

namespace tradenet {

OfferState::OfferState(std::size_t num_trades, std::size_t num_agents, Price epsilon)
    : buyer_(num_trades, 0),
      seller_(num_trades, 0),
      flags_(num_agents, 0),
      position_(num_agents, 0),
      epsilon_(epsilon) {
  if (epsilon <= 0) throw DomainError("step size epsilon must be positive");
}

std::vector<Price> OfferState::AllOffers() const {
  std::vector<Price> out(buyer_);
  out.insert(out.end(), seller_.begin(), seller_.end());
  return out;
}

void OfferState::MarkUnsatisfied(AgentIdx i) {
  if (flags_[i]) return;
  flags_[i] = 1;
  position_[i] = members_.size();
  members_.push_back(i);
}

void OfferState::MarkSatisfied(AgentIdx i) {
  if (!flags_[i]) return;
  flags_[i] = 0;
  const std::size_t pos = position_[i];
  const AgentIdx last = members_.back();
  members_[pos] = last;
  position_[last] = pos;
  members_.pop_back();
}

void OfferState::MarkAllUnsatisfied() {
  for (AgentIdx i = 0; i < flags_.size(); ++i) MarkUnsatisfied(i);
}

std::vector<AgentIdx> OfferState::Unsatisfied() const {
  std::vector<AgentIdx> out(members_);
  std::sort(out.begin(), out.end());
  return out;
}

AgentIdx OfferState::SampleUnsatisfied(Rng& rng) const {
  std::uniform_int_distribution<std::size_t> pick(0, members_.size() - 1);
  return members_[pick(rng)];
}

OfferState InitializeOffers(const Market& market, const InitPolicy& policy, Rng& rng,
                            Price epsilon) {
  OfferState state(market.num_trades(), market.num_agents(), epsilon);
  if (const auto* uniform = std::get_if<UniformOffers>(&policy)) {
    if (uniform->hi < uniform->lo) throw DomainError("uniform offer range with hi < lo");
    std::uniform_int_distribution<Price> draw(uniform->lo, uniform->hi);
    for (TradeIdx t = 0; t < market.num_trades(); ++t) {
      state.set_offer(t, Side::kBuyer, draw(rng));
      state.set_offer(t, Side::kSeller, draw(rng));
    }
  } else if (const auto* given = std::get_if<ExplicitOffers>(&policy)) {
    for (TradeIdx t = 0; t < market.num_trades(); ++t) {
      for (Side side : {Side::kBuyer, Side::kSeller}) {
        const auto it = given->offers.find({t, side});
        if (it == given->offers.end()) {
          throw DomainError("explicit offers miss the " +
                            std::string(side == Side::kBuyer ? "buyer" : "seller") +
                            " offer of trade " + std::to_string(market.trade(t).id));
        }
        state.set_offer(t, side, it->second);
      }
    }
  }
  state.MarkAllUnsatisfied();
  return state;
}

std::int64_t ValueBound(const Market& market, const OfferState& state) {
  const std::vector<Price> offers = state.AllOffers();
  return ValueBound(market, std::span<const Price>(offers));
}

BestResponse ComputeBestResponse(const Market& market, const OfferState& state,
                                 AgentIdx agent) {
  if (agent >= market.num_agents()) throw DomainError("agent index out of range");
  const IncidentTrades& inc = market.incident(agent);
  const Price eps = state.epsilon();

  PriceVector prices(inc.size());
  for (std::size_t k = 0; k < inc.size(); ++k) {
    const Side other = inc.chi[k] > 0 ? Side::kSeller : Side::kBuyer;
    prices[k] = state.offer(inc.trades[k], other);
  }

  BestResponse br;
  br.agent = agent;
  br.demanded = Demand(market.valuation(agent), inc, prices);
  br.offers.resize(inc.size());
  for (std::size_t k = 0; k < inc.size(); ++k) {
    const bool take = (br.demanded >> k) & 1U;
    br.offers[k] = take ? prices[k] : prices[k] - inc.chi[k] * eps;
    const Side own = inc.chi[k] > 0 ? Side::kBuyer : Side::kSeller;
    const Price before = state.offer(inc.trades[k], own);
    if (before != br.offers[k]) {
      br.changes.push_back({inc.trades[k], own, before, br.offers[k]});
    }
  }
  return br;
}

void ApplyBestResponse(const Market& market, OfferState& state, const BestResponse& br) {
  for (const OfferChange& c : br.changes) state.set_offer(c.trade, c.side, c.after);
  state.MarkSatisfied(br.agent);
  for (const OfferChange& c : br.changes) {
    state.MarkUnsatisfied(market.Counterpart(c.trade, br.agent));
  }
}

std::size_t DefaultBudget(const Market& market, const OfferState& state) {
  const auto v = static_cast<std::size_t>(ValueBound(market, state));
  return std::max<std::size_t>(1, 50 * market.num_agents() * (2 * v + 2));
}

TraceStep Step(const Market& market, OfferState& state, Rng& rng) {
  if (state.unsatisfied_count() == 0) {
    throw PreconditionError("step called with no unsatisfied agent");
  }
  const AgentIdx agent = state.SampleUnsatisfied(rng);
  const BestResponse br = ComputeBestResponse(market, state, agent);
  ApplyBestResponse(market, state, br);
  TraceStep step;
  step.agent = agent;
  step.demanded = br.demanded;
  step.changes = br.changes;
  step.unsatisfied_after = state.unsatisfied_count();
  return step;
}

namespace {

bool GapHolds(const OfferState& state, TradeIdx t) {
  const Price b = state.offer(t, Side::kBuyer);
  const Price s = state.offer(t, Side::kSeller);
  return b <= s && s <= b + state.epsilon();
}

double SatisfiedProportion(const OfferState& state) {
  if (state.num_agents() == 0) return 1.0;
  return 1.0 - static_cast<double>(state.unsatisfied_count()) /
                   static_cast<double>(state.num_agents());
}

// Shared driver: applies best responses one at a time and keeps the trace
// and run statistics up to date.
class Driver {
 public:
  Driver(const Market& market, OfferState initial, const RunOptions& options)
      : market_(market), options_(options), responded_(market.num_agents(), 0) {
    result_.final_state = std::move(initial);
    const OfferState& s = result_.final_state;
    result_.stats.min_offer = result_.stats.max_offer = 0;
    bool first = true;
    for (TradeIdx t = 0; t < s.num_trades(); ++t) {
      for (Side side : {Side::kBuyer, Side::kSeller}) {
        const Price p = s.offer(t, side);
        if (first) {
          result_.stats.min_offer = result_.stats.max_offer = p;
          first = false;
        }
        TrackOffer(p);
      }
    }
    if (options.already_in_main_phase || market.num_agents() == 0) EnterMainPhase(0);
    result_.trace.satisfied_series.push_back(SatisfiedProportion(s));
  }

  const OfferState& state() const { return result_.final_state; }
  OfferState& mutable_state() { return result_.final_state; }
  std::size_t iterations() const { return iterations_; }

  void Respond(AgentIdx agent) {
    OfferState& s = result_.final_state;
    const BestResponse br = ComputeBestResponse(market_, s, agent);
    ApplyBestResponse(market_, s, br);
    ++iterations_;

    for (const OfferChange& c : br.changes) TrackOffer(c.after);
    if (!responded_[agent]) {
      responded_[agent] = 1;
      ++responded_count_;
    }
    if (!in_main_phase_ && responded_count_ == market_.num_agents()) {
      EnterMainPhase(iterations_);
    } else if (in_main_phase_) {
      for (const OfferChange& c : br.changes) {
        if (!GapHolds(s, c.trade)) ++result_.stats.gap_violations;
      }
    }

    result_.trace.satisfied_series.push_back(SatisfiedProportion(s));
    if (options_.record_steps || options_.observer) {
      TraceStep step;
      step.iteration = iterations_;
      step.agent = agent;
      step.demanded = br.demanded;
      step.changes = br.changes;
      step.unsatisfied_after = s.unsatisfied_count();
      if (options_.observer) options_.observer(s, step);
      if (options_.record_steps) result_.trace.steps.push_back(std::move(step));
    }
  }

  RunResult Finish(Outcome outcome) {
    result_.trace.outcome = outcome;
    if (std::holds_alternative<Converged>(outcome)) {
      result_.executed = ExecutedTrades(market_, result_.final_state);
      result_.utilities = RealizedUtilities(market_, result_.final_state, result_.executed);
    }
    return std::move(result_);
  }

 private:
  void TrackOffer(Price p) {
    result_.stats.min_offer = std::min(result_.stats.min_offer, p);
    result_.stats.max_offer = std::max(result_.stats.max_offer, p);
  }

  void EnterMainPhase(std::size_t at) {
    in_main_phase_ = true;
    result_.stats.main_phase_start = at;
    const OfferState& s = result_.final_state;
    for (TradeIdx t = 0; t < s.num_trades(); ++t) {
      if (!GapHolds(s, t)) ++result_.stats.gap_violations;
    }
  }

  const Market& market_;
  const RunOptions& options_;
  RunResult result_;
  std::vector<char> responded_;
  std::size_t responded_count_ = 0;
  bool in_main_phase_ = false;
  std::size_t iterations_ = 0;
};

}  // namespace

RunResult Run(const Market& market, OfferState initial, Rng& rng, const RunOptions& options) {
  const std::size_t budget =
      options.max_iterations ? options.max_iterations : DefaultBudget(market, initial);
  Driver driver(market, std::move(initial), options);
  while (driver.state().unsatisfied_count() > 0) {
    if (driver.iterations() >= budget) {
      return driver.Finish(BudgetExhausted{driver.iterations()});
    }
    driver.Respond(driver.state().SampleUnsatisfied(rng));
  }
  return driver.Finish(Converged{driver.iterations()});
}

RunResult RunDeterministic(const Market& market, OfferState initial,
                           std::span<const AgentIdx> sequence, bool repeat,
                           const RunOptions& options) {
  for (AgentIdx a : sequence) {
    if (a >= market.num_agents()) throw DomainError("sequence names an unknown agent");
  }
  if (!repeat) {
    Driver driver(market, std::move(initial), options);
    for (AgentIdx a : sequence) driver.Respond(a);
    const std::size_t n = driver.iterations();
    if (driver.state().unsatisfied_count() == 0) return driver.Finish(Converged{n});
    return driver.Finish(BudgetExhausted{n});
  }

  const std::size_t budget =
      options.max_iterations ? options.max_iterations : DefaultBudget(market, initial);
  Driver driver(market, std::move(initial), options);
  if (sequence.empty()) {
    if (driver.state().unsatisfied_count() == 0) return driver.Finish(Converged{0});
    return driver.Finish(BudgetExhausted{0});
  }
  // (offers, U, turn) -> iteration at which it was first seen. The state
  // space is finite because offers stay bounded, so a non-terminating
  // schedule must revisit a key.
  std::map<std::vector<Price>, std::size_t> seen;
  const auto key = [&](std::size_t turn) {
    const OfferState& s = driver.state();
    std::vector<Price> k = s.AllOffers();
    for (AgentIdx i = 0; i < s.num_agents(); ++i) k.push_back(s.is_unsatisfied(i));
    k.push_back(static_cast<Price>(turn));
    return k;
  };
  seen.emplace(key(0), 0);
  std::size_t turn = 0;
  while (driver.state().unsatisfied_count() > 0) {
    if (driver.iterations() >= budget) {
      return driver.Finish(BudgetExhausted{driver.iterations()});
    }
    driver.Respond(sequence[turn]);
    turn = (turn + 1) % sequence.size();
    const auto [it, inserted] = seen.emplace(key(turn), driver.iterations());
    if (!inserted && driver.state().unsatisfied_count() > 0) {
      return driver.Finish(CycleDetected{driver.iterations() - it->second, it->second});
    }
  }
  return driver.Finish(Converged{driver.iterations()});
}

RunResult RunAlternating(const Market& market, OfferState initial, AgentIdx first,
                         const RunOptions& options) {
  if (market.num_agents() != 2) throw DomainError("alternation needs exactly two agents");
  if (first > 1) throw DomainError("first agent out of range");
  const AgentIdx sequence[2] = {first, static_cast<AgentIdx>(1 - first)};
  return RunDeterministic(market, std::move(initial), sequence, /*repeat=*/true, options);
}

bool IsEquilibrium(const Market& market, const OfferState& state) {
  if (state.unsatisfied_count() != 0) return false;
#ifndef NDEBUG
  for (AgentIdx i = 0; i < market.num_agents(); ++i) {
    assert(ComputeBestResponse(market, state, i).changes.empty());
  }
#else
  (void)market;
#endif
  return true;
}

std::vector<TradeIdx> ExecutedTrades(const Market& market, const OfferState& state) {
  if (state.unsatisfied_count() != 0) {
    throw PreconditionError("executed trades are only defined at equilibrium");
  }
  std::vector<TradeIdx> out;
  for (TradeIdx t = 0; t < market.num_trades(); ++t) {
    if (state.offer(t, Side::kBuyer) == state.offer(t, Side::kSeller)) out.push_back(t);
  }
  return out;
}

std::vector<std::int64_t> RealizedUtilities(const Market& market, const OfferState& state,
                                            std::span<const TradeIdx> executed) {
  std::vector<std::vector<TradeIdx>> per_agent(market.num_agents());
  for (TradeIdx t : executed) {
    const Trade& tr = market.trade(t);
    per_agent[tr.buyer].push_back(t);
    per_agent[tr.seller].push_back(t);
  }
  std::vector<std::int64_t> out(market.num_agents(), 0);
  for (AgentIdx i = 0; i < market.num_agents(); ++i) {
    auto& trades = per_agent[i];
    std::sort(trades.begin(), trades.end());
    const BundleMask bundle = market.BundleFromTrades(i, trades);
    const ExtValue v = Evaluate(market.valuation(i), bundle, market.incident(i));
    if (v.is_neg_inf()) {
      throw PreconditionError("agent " + std::to_string(market.agent(i).id) +
                              " executes an infeasible bundle");
    }
    std::int64_t u = v.value();
    for (TradeIdx t : trades) u -= market.Chi(i, t) * state.offer(t, Side::kBuyer);
    out[i] = u;
  }
  return out;
}

}  // namespace tradenet
