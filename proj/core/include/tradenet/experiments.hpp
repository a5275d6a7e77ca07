#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tradenet/dynamics.hpp"
#include "tradenet/topology.hpp"

namespace tradenet {

enum class ExperimentKind { kConvergence, kWelfare, kShock };
const char* ExperimentKindName(ExperimentKind kind);
std::optional<ExperimentKind> ParseExperimentKind(std::string_view name);

enum class SweepAxis {
  kNone,
  kMarketSize,         // total buyers + sellers (BS, BIS) or n (general)
  kBuyerProportion,    // buyers / (buyers + sellers), total kept
  kIntermediaryCount,  // BIS only
  kLambda,             // general only
  kShockSize,
  kShockedProportion,
};
const char* SweepAxisName(SweepAxis axis);
std::optional<SweepAxis> ParseSweepAxis(std::string_view name);

// Post-convergence resampling of scalar values. A shocked agent with value c
// draws its new value uniformly from the integers of
// [ceil(c (1 - size)), floor(c (1 + size))] that lie in C.
struct ShockSpec {
  double shocked_proportion = 0.25;
  double size = 0.1;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kConvergence;
  TopologyConfig topology;  // topology.seed is ignored; runs use base_seed
  ValueSet values;
  InitPolicy init = UniformOffers{1, 100};
  Price epsilon = 1;
  std::size_t runs = 100;
  SweepAxis axis = SweepAxis::kNone;
  std::vector<double> sweep_values;
  std::uint64_t base_seed = 1;
  std::size_t budget = 0;  // 0: DefaultBudget per run
  ShockSpec shock;
  bool record_series = true;
};

// DomainError on runs == 0, unordered or non-finite sweep values, an axis the
// topology does not have, invalid shock parameters or ExplicitOffers init.
void ValidateExperiment(const ExperimentConfig& config);

// The topology and shock used by one sweep cell.
struct CellSetup {
  double sweep_value = 0.0;
  TopologyConfig topology;
  ShockSpec shock;
};
std::vector<CellSetup> ExpandCells(const ExperimentConfig& config);

// Seed of run `run` in cell `cell`; independent of scheduling.
std::uint64_t RunSeed(std::uint64_t base_seed, std::size_t cell, std::size_t run);

enum AgentClass { kBuyerClass = 0, kSellerClass = 1, kIntermediaryClass = 2 };
inline constexpr std::array<const char*, 3> kAgentClassNames = {"buyer", "seller",
                                                               "intermediary"};

struct RunRecord {
  std::uint64_t seed = 0;
  std::size_t num_agents = 0;
  std::size_t num_trades = 0;
  bool converged = false;
  std::size_t iterations = 0;
  std::vector<double> satisfied_series;
  std::int64_t value_bound = 0;
  Price min_offer = 0;
  Price max_offer = 0;
  bool offers_within_bound = true;  // all offers in [-2V-1, 2V+1]
  std::size_t gap_violations = 0;
  // Mean realized utility per class at equilibrium; empty for classes without
  // agents and for non-converged runs.
  std::array<std::optional<double>, 3> class_utility;
  std::int64_t payment_balance = 0;  // sum of all net payments, 0 at equilibrium
  // Shock runs only.
  std::size_t shocked = 0;
  double propagation = 0.0;
  bool reconverged = false;
  std::size_t reconvergence_iterations = 0;
  std::optional<double> normalized_reconvergence;  // T1 / T0
  // Non-empty if the run failed with an error.
  std::string error;
};

// Mean and sample standard deviation (n - 1 denominator; 0 when n < 2).
struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;
};
Summary Summarize(const std::vector<double>& xs);

struct CellAggregate {
  std::size_t runs = 0;
  std::size_t converged = 0;
  std::size_t failed = 0;
  double converged_fraction = 0.0;
  Summary iterations;  // converged runs only
  std::array<Summary, 3> class_utility;
  Summary propagation;
  Summary normalized_reconvergence;
};

struct CellResult {
  CellSetup setup;
  std::vector<RunRecord> runs;
  CellAggregate aggregate;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<CellResult> cells;
};

CellAggregate Aggregate(const std::vector<RunRecord>& runs);

// One run of a cell, fully determined by the setup, config and seed.
RunRecord ExecuteRun(const ExperimentConfig& config, const CellSetup& setup,
                     std::uint64_t seed);

// Runs every cell of every config on `jobs` threads (0 = hardware
// concurrency). Per-run errors are recorded, never thrown. Results do not
// depend on `jobs`.
std::vector<ExperimentResult> Sweep(const std::vector<ExperimentConfig>& configs,
                                    std::size_t jobs = 1);
ExperimentResult RunExperiment(const ExperimentConfig& config, std::size_t jobs = 1);

ExperimentResult ConvergenceExperiment(ExperimentConfig config, std::size_t jobs = 1);
ExperimentResult WelfareExperiment(ExperimentConfig config, std::size_t jobs = 1);
ExperimentResult ShockExperiment(ExperimentConfig config, const ShockSpec& shock,
                                 std::size_t jobs = 1);

// Outcome of shocking a converged state.
struct ShockOutcome {
  Market market;  // with resampled values
  std::vector<AgentIdx> shocked;
  RunResult rerun;
  double propagation = 0.0;
};

// Resamples the values of round(proportion * #buyers-and-sellers) uniformly
// chosen buyers/sellers, marks them unsatisfied and resumes the randomized
// dynamic. PreconditionError if `state` is not converged.
ShockOutcome ApplyShock(const Market& market, const OfferState& state, const ShockSpec& shock,
                        ValueSet values, Rng& rng, const RunOptions& options = {});

}  // namespace tradenet
