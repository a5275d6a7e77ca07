#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "tradenet/market.hpp"

namespace tradenet {

using Rng = std::mt19937_64;

enum class Side { kBuyer, kSeller };

// The state (U, sigma) of the market dynamic: one buyer offer and one seller
// offer per trade, the set U of unsatisfied agents, and the step size.
class OfferState {
 public:
  OfferState() = default;
  OfferState(std::size_t num_trades, std::size_t num_agents, Price epsilon = 1);

  std::size_t num_trades() const { return buyer_.size(); }
  std::size_t num_agents() const { return flags_.size(); }
  Price epsilon() const { return epsilon_; }

  Price offer(TradeIdx t, Side side) const {
    return side == Side::kBuyer ? buyer_[t] : seller_[t];
  }
  void set_offer(TradeIdx t, Side side, Price p) {
    (side == Side::kBuyer ? buyer_[t] : seller_[t]) = p;
  }
  std::span<const Price> buyer_offers() const { return buyer_; }
  std::span<const Price> seller_offers() const { return seller_; }
  // All offers, buyer side first.
  std::vector<Price> AllOffers() const;

  bool is_unsatisfied(AgentIdx i) const { return flags_[i] != 0; }
  std::size_t unsatisfied_count() const { return members_.size(); }
  void MarkUnsatisfied(AgentIdx i);
  void MarkSatisfied(AgentIdx i);
  void MarkAllUnsatisfied();
  // Sorted copy of U.
  std::vector<AgentIdx> Unsatisfied() const;
  // Uniform draw from U; U must be non-empty.
  AgentIdx SampleUnsatisfied(Rng& rng) const;

  friend bool operator==(const OfferState& a, const OfferState& b) {
    return a.epsilon_ == b.epsilon_ && a.buyer_ == b.buyer_ && a.seller_ == b.seller_ &&
           a.flags_ == b.flags_;
  }

 private:
  std::vector<Price> buyer_;
  std::vector<Price> seller_;
  std::vector<char> flags_;
  // U as a dense array with back-pointers for O(1) insert/erase/sample.
  std::vector<AgentIdx> members_;
  std::vector<std::size_t> position_;
  Price epsilon_ = 1;
};

struct ZeroOffers {};
struct UniformOffers {
  Price lo = 0;
  Price hi = 0;
};
struct ExplicitOffers {
  std::map<std::pair<TradeIdx, Side>, Price> offers;
};
using InitPolicy = std::variant<ZeroOffers, UniformOffers, ExplicitOffers>;

// All agents start unsatisfied. Explicit maps must cover every (trade, side)
// pair, otherwise DomainError.
OfferState InitializeOffers(const Market& market, const InitPolicy& policy, Rng& rng,
                            Price epsilon = 1);

// V over the market's valuations and the state's current offers.
std::int64_t ValueBound(const Market& market, const OfferState& state);

struct OfferChange {
  TradeIdx trade = 0;
  Side side = Side::kBuyer;
  Price before = 0;
  Price after = 0;
  friend bool operator==(const OfferChange&, const OfferChange&) = default;
};

struct BestResponse {
  AgentIdx agent = 0;
  BundleMask demanded = 0;
  std::vector<Price> offers;          // aligned with the agent's incident trades
  std::vector<OfferChange> changes;   // offers whose value strictly changed
};

// The agent's best response to its counterparts' current offers: match on
// demanded trades, step away by epsilon elsewhere. Does not modify `state`.
BestResponse ComputeBestResponse(const Market& market, const OfferState& state,
                                 AgentIdx agent);

// Writes the new offers, removes the responder from U and adds every
// counterpart of a strictly changed offer.
void ApplyBestResponse(const Market& market, OfferState& state, const BestResponse& br);

struct TraceStep {
  std::size_t iteration = 0;  // 1-based
  AgentIdx agent = 0;
  BundleMask demanded = 0;    // in the responder's local trade order
  std::vector<OfferChange> changes;
  std::size_t unsatisfied_after = 0;
};

struct Converged {
  std::size_t iterations = 0;
};
struct CycleDetected {
  std::size_t period = 0;  // best responses per cycle
  std::size_t prefix = 0;  // best responses before the cycle starts
};
struct BudgetExhausted {
  std::size_t iterations = 0;
};
using Outcome = std::variant<Converged, CycleDetected, BudgetExhausted>;

struct DynamicsTrace {
  std::vector<TraceStep> steps;
  // Proportion of satisfied agents; entry 0 is the initial state, entry t the
  // state after the t-th best response.
  std::vector<double> satisfied_series;
  Outcome outcome = BudgetExhausted{};
};

// Offer-range and main-phase bookkeeping gathered while running.
struct RunStats {
  Price min_offer = 0;
  Price max_offer = 0;
  // Best responses until every agent had responded once (main phase start).
  std::optional<std::size_t> main_phase_start;
  // Trades observed with sigma_b > sigma_s or sigma_s > sigma_b + eps inside
  // the main phase.
  std::size_t gap_violations = 0;
};

struct RunResult {
  OfferState final_state;
  DynamicsTrace trace;
  // Filled on convergence only.
  std::vector<TradeIdx> executed;
  std::vector<std::int64_t> utilities;
  RunStats stats;

  bool converged() const { return std::holds_alternative<Converged>(trace.outcome); }
  std::size_t iterations() const { return trace.satisfied_series.empty() ? 0 : trace.satisfied_series.size() - 1; }
};

using StepObserver = std::function<void(const OfferState&, const TraceStep&)>;

struct RunOptions {
  // 0 selects DefaultBudget.
  std::size_t max_iterations = 0;
  bool record_steps = true;
  // Treat every agent as having responded already (resuming a converged run).
  bool already_in_main_phase = false;
  StepObserver observer;
};

// 50 * |I| * (2V + 2).
std::size_t DefaultBudget(const Market& market, const OfferState& state);

// One iteration of the randomized dynamic: sample from U, best respond,
// update U. Throws PreconditionError when U is empty.
TraceStep Step(const Market& market, OfferState& state, Rng& rng);

// Runs the randomized dynamic until U is empty or the budget is spent.
RunResult Run(const Market& market, OfferState initial, Rng& rng,
              const RunOptions& options = {});

// Replays the given best-response sequence exactly, maintaining U for
// bookkeeping. With `repeat`, the sequence is cycled until U is empty, a
// (state, turn) pair repeats (CycleDetected) or the budget is spent.
RunResult RunDeterministic(const Market& market, OfferState initial,
                           std::span<const AgentIdx> sequence, bool repeat = false,
                           const RunOptions& options = {});

// Two-agent alternation starting with `first`.
RunResult RunAlternating(const Market& market, OfferState initial, AgentIdx first,
                         const RunOptions& options = {});

// U is empty. In debug builds also asserts that no best response would change
// any offer.
bool IsEquilibrium(const Market& market, const OfferState& state);

// Trades whose two offers coincide. PreconditionError off-equilibrium.
std::vector<TradeIdx> ExecutedTrades(const Market& market, const OfferState& state);

// Per agent: v(executed incident trades) minus net payments at the agreed
// prices. Infeasible executed bundles raise PreconditionError.
std::vector<std::int64_t> RealizedUtilities(const Market& market, const OfferState& state,
                                            std::span<const TradeIdx> executed);

}  // namespace tradenet
