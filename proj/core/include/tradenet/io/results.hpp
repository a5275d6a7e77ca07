#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tradenet/dynamics.hpp"
#include "tradenet/experiments.hpp"
#include "tradenet/market.hpp"

namespace tradenet::io {

// CSV conventions: comma separated, '\n' line ends, header row first, reals
// printed with "%.9g" in the C locale, no quoting (no field contains a comma).

// iteration,satisfied_proportion,unsatisfied_count
std::string SeriesCsv(const std::vector<double>& satisfied_series, std::size_t num_agents);
// sweep_value,mean_iterations,std_iterations,converged_fraction
std::string AggregatesCsv(const std::vector<ExperimentResult>& results);
// sweep_value,class,mean_utility,std_utility (classes with at least one value)
std::string WelfareCsv(const std::vector<ExperimentResult>& results);
// shock_size,shocked_proportion,propagation_mean,propagation_std,
// reconv_norm_mean,reconv_norm_std (shock experiments only)
std::string ShocksCsv(const std::vector<ExperimentResult>& results);
// One row per run with its raw record.
std::string RunsCsv(const std::vector<ExperimentResult>& results);
// sweep_value,iteration,mean_satisfied,std_satisfied: satisfied proportion
// across the runs of each cell, finished runs held at their last value, at
// no more than `max_points` evenly spaced iterations per cell.
std::string PathsCsv(const std::vector<ExperimentResult>& results, std::size_t max_points = 500);
// iteration,agent,demanded,changes with trade and agent ids.
std::string TraceCsv(const Market& market, const DynamicsTrace& trace);

std::string FormatReal(double x);

inline constexpr const char* kArtifactVersion = "0.3.0";

// Writes metadata.json, summary.json and the CSV files above into `dir`.
void WriteSweepBundle(const std::filesystem::path& dir,
                      const std::vector<ExperimentResult>& results);

struct RunBundleInfo {
  std::string command;        // "run" or "shock"
  std::string market_source;  // file name or "<generated>"
  std::uint64_t seed = 0;
  std::string schedule;       // "random" or "alternating"
  std::string init;           // textual init policy
  std::size_t budget = 0;
  bool write_trace = false;
};

// Writes metadata.json, summary.json, series.csv and, if requested,
// trace.csv for a single run.
void WriteRunBundle(const std::filesystem::path& dir, const Market& market,
                    const OfferState& initial, const RunResult& result,
                    const RunBundleInfo& info);

}  // namespace tradenet::io
