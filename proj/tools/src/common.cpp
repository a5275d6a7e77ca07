#include "common.hpp"

#include <cstdlib>
#include <iostream>
#include <sstream>

#include "fixtures.hpp"

namespace tradenet::cli {

void AddCommonOptions(CLI::App& app, CommonOptions& opts, bool jobs) {
  app.add_option("--seed", opts.seed, "Random seed")->capture_default_str();
  app.add_option("--epsilon", opts.epsilon, "Offer step size (positive integer)")
      ->capture_default_str();
  app.add_option("--budget", opts.budget,
                 "Best-response budget per run; 0 means 50*|I|*(2V+2)")
      ->capture_default_str();
  if (jobs) {
    app.add_option("--jobs", opts.jobs, "Worker threads; 0 uses all cores")->capture_default_str();
  }
  app.add_option("--out", opts.out,
                 "Output directory (default: $TRADENET_OUT, else ./tradenet-out)");
}

std::filesystem::path OutputDir(const CommonOptions& opts) {
  if (!opts.out.empty()) return opts.out;
  if (const char* env = std::getenv("TRADENET_OUT"); env && *env) return env;
  return "tradenet-out";
}

namespace {

std::int64_t ToInt(const std::string& s, const std::string& flag) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError(flag + ": \"" + s + "\" is not an integer");
  }
}

double ToReal(const std::string& s, const std::string& flag) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError(flag + ": \"" + s + "\" is not a number");
  }
}

std::vector<std::string> Split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

std::pair<std::int64_t, std::int64_t> ParseIntRange(const std::string& text,
                                                    const std::string& flag) {
  // Leading '-' belongs to the number, so split at the first ':' after it.
  const auto colon = text.find(':', 1);
  if (colon == std::string::npos) throw UsageError(flag + ": expected LO:HI, got \"" + text + "\"");
  const std::int64_t lo = ToInt(text.substr(0, colon), flag);
  const std::int64_t hi = ToInt(text.substr(colon + 1), flag);
  if (lo > hi) throw UsageError(flag + ": empty range \"" + text + "\"");
  return {lo, hi};
}

std::vector<std::int64_t> ParseIdList(const std::string& text, const std::string& flag) {
  std::vector<std::int64_t> out;
  for (const std::string& s : Split(text, ',')) out.push_back(ToInt(s, flag));
  return out;
}

std::vector<double> ParseRealList(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  for (const std::string& s : Split(text, ',')) out.push_back(ToReal(s, flag));
  return out;
}

io::MarketDocument LoadMarketArg(const std::string& arg) {
  if (arg == "@example2") return io::ParseMarket(kExample2Json);
  if (arg == "@coffee") return io::ParseMarket(kCoffeeJson);
  return io::LoadMarket(arg);
}

void AddTopologyOptions(CLI::App& app, TopologyFlags& f) {
  app.add_option("--topology", f.kind, "bs, bis or general")
      ->check(CLI::IsMember({"bs", "bis", "general"}))
      ->capture_default_str();
  app.add_option("--buyers", f.buyers, "Buyers (bs, bis)")->capture_default_str();
  app.add_option("--sellers", f.sellers, "Sellers (bs, bis)")->capture_default_str();
  app.add_option("--intermediaries", f.intermediaries, "Intermediaries (bis)")
      ->capture_default_str();
  app.add_option("--r", f.r, "Trade probability per eligible pair (bs, bis)")
      ->capture_default_str();
  app.add_option("--n", f.n, "Network size before taking the largest component (general)")
      ->capture_default_str();
  app.add_option("--lambda", f.lambda, "Mean degree; edge probability lambda/n (general)")
      ->capture_default_str();
  app.add_option("--values", f.values, "Value set C as LO:HI")->capture_default_str();
}

TopologyConfig TopologyFromFlags(const TopologyFlags& f) {
  TopologyConfig t;
  if (f.kind == "bs") {
    t.kind = BsTopology{f.buyers, f.sellers, f.r};
  } else if (f.kind == "bis") {
    t.kind = BisTopology{f.buyers, f.sellers, f.intermediaries, f.r};
  } else {
    t.kind = GeneralTopology{f.n, f.lambda};
  }
  ValidateTopology(t);
  return t;
}

void Report(const std::string& line) { std::cout << line << '\n'; }

}  // namespace tradenet::cli
