#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tradenet/dynamics.hpp"
#include "tradenet/reduction.hpp"

namespace tradenet {

// Generators of best-response sequences used to exercise the restriction and
// merge lemmas. Not part of the dynamics proper.

struct SubsetSequence {
  std::vector<AgentIdx> agents;  // source agent positions
  bool terminated = false;       // every subset agent satisfied at the end
};

// Runs the randomized dynamic on RestrictMarket(subset, state) and maps its
// responders back to source positions.
SubsetSequence TerminatingSequence(const Market& market, const OfferState& state,
                                   std::span<const AgentIdx> subset, Rng& rng,
                                   std::size_t budget = 0);

struct Phase {
  int side = 1;       // 1 or 2
  OfferState start;   // state before the phase
  std::vector<AgentIdx> agents;
};

struct PhasePlan {
  std::vector<Phase> phases;
  bool converged = false;        // all agents satisfied after the last phase
  bool phase_exhausted = false;  // some restricted run hit its budget
};

// Alternates sides 1, 2, 1, ...: each phase is a terminating sequence of the
// market restricted to that side at the current offers. Stops when every agent
// is satisfied, after `max_phases`, or when a restricted run does not
// terminate within `budget`.
PhasePlan BuildAlternatingPhases(const Market& market, const AgentPartition& partition,
                                 const OfferState& initial, Rng& rng, std::size_t max_phases,
                                 std::size_t budget = 0);

}  // namespace tradenet
