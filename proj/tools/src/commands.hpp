#pragma once

#include <functional>

#include "CLI11.hpp"

namespace tradenet::cli {

// Each registers a subcommand; when it is selected, `action` is set to the
// code that runs it and returns the exit code.
using Action = std::function<int()>;

void RegisterGenerate(CLI::App& app, Action& action);
void RegisterRun(CLI::App& app, Action& action);
void RegisterShock(CLI::App& app, Action& action);
void RegisterSweep(CLI::App& app, Action& action);
void RegisterVerify(CLI::App& app, Action& action);
void RegisterPlot(CLI::App& app, Action& action);

}  // namespace tradenet::cli
