#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tradenet/experiments.hpp"

namespace tradenet::io {

inline constexpr const char* kExperimentSchema = "tradenet.experiment/1";

// Accepts one experiment object or {"experiments": [...]}. Missing fields
// take the ExperimentConfig defaults. Throws ParseError with the field path,
// DomainError from ValidateExperiment.
std::vector<ExperimentConfig> ParseExperimentConfigs(std::string_view text);
// Complete, canonical echo of a config (every field written).
std::string SerializeExperimentConfig(const ExperimentConfig& config);

}  // namespace tradenet::io
