#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>

#include "CLI11.hpp"
#include "tradenet/errors.hpp"
#include "tradenet/experiments.hpp"
#include "tradenet/io/market_file.hpp"

namespace tradenet::cli {

// Exit codes.
enum Exit : int {
  kOk = 0,
  kOther = 1,
  kUsage = 2,
  kIo = 3,
  kInvalidInput = 4,
  kVerifyFailed = 5,
  kCapacity = 6,
  kPrecondition = 7,
};

// Bad flag values that CLI11 cannot catch itself.
class UsageError : public Error {
 public:
  using Error::Error;
  const char* error_class() const noexcept override { return "usage"; }
};

// Options shared by most subcommands.
struct CommonOptions {
  std::uint64_t seed = 1;
  std::int64_t epsilon = 1;
  std::size_t budget = 0;
  std::size_t jobs = 1;
  std::string out;
};

// Adds --seed/--epsilon/--budget/--jobs/--out (only those requested).
void AddCommonOptions(CLI::App& app, CommonOptions& opts, bool jobs = false);
// --out, else $TRADENET_OUT, else ./tradenet-out.
std::filesystem::path OutputDir(const CommonOptions& opts);

// "LO:HI" with LO <= HI.
std::pair<std::int64_t, std::int64_t> ParseIntRange(const std::string& text,
                                                    const std::string& flag);
std::vector<std::int64_t> ParseIdList(const std::string& text, const std::string& flag);
std::vector<double> ParseRealList(const std::string& text, const std::string& flag);

// A market file, or one of the built-in fixtures "@example2" / "@coffee".
io::MarketDocument LoadMarketArg(const std::string& arg);

struct TopologyFlags {
  std::string kind = "bs";
  std::size_t buyers = 10;
  std::size_t sellers = 10;
  std::size_t intermediaries = 2;
  double r = 0.2;
  std::size_t n = 50;
  double lambda = 2.0;
  std::string values = "1:100";
};
void AddTopologyOptions(CLI::App& app, TopologyFlags& flags);
TopologyConfig TopologyFromFlags(const TopologyFlags& flags);

// Writes one status line to stdout.
void Report(const std::string& line);

}  // namespace tradenet::cli
