#include "tradenet/phases.hpp"

namespace tradenet {

SubsetSequence TerminatingSequence(const Market& market, const OfferState& state,
                                   std::span<const AgentIdx> subset, Rng& rng,
                                   std::size_t budget) {
  const RestrictedMarket restricted = RestrictMarket(market, subset, state);
  RunOptions options;
  options.max_iterations = budget;
  const RunResult run = Run(restricted.market, RestrictState(restricted, state), rng, options);
  SubsetSequence out;
  out.terminated = run.converged();
  for (const TraceStep& step : run.trace.steps) {
    out.agents.push_back(restricted.agent_map[step.agent]);
  }
  return out;
}

PhasePlan BuildAlternatingPhases(const Market& market, const AgentPartition& partition,
                                 const OfferState& initial, Rng& rng, std::size_t max_phases,
                                 std::size_t budget) {
  ValidatePartition(market, partition);
  PhasePlan plan;
  OfferState state = initial;
  for (std::size_t k = 0; k < max_phases; ++k) {
    if (state.unsatisfied_count() == 0) {
      plan.converged = true;
      return plan;
    }
    const int side = static_cast<int>(k % 2) + 1;
    SubsetSequence seq = TerminatingSequence(market, state, partition.side(side), rng, budget);
    if (!seq.terminated) {
      plan.phase_exhausted = true;
      return plan;
    }
    RunOptions options;
    options.record_steps = false;
    OfferState next =
        RunDeterministic(market, state, seq.agents, /*repeat=*/false, options).final_state;
    plan.phases.push_back({side, std::move(state), std::move(seq.agents)});
    state = std::move(next);
  }
  plan.converged = state.unsatisfied_count() == 0;
  return plan;
}

}  // namespace tradenet
