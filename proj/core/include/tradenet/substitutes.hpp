#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tradenet/market.hpp"

namespace tradenet {

// Inclusive integer price range for one incident trade.
struct PriceRange {
  Price lo = 0;
  Price hi = 0;
};

// A pair of price vectors meeting the premise of one full-substitutability
// condition whose demanded bundles break its conclusion. Re-running Demand at
// `prices` and `prices_other` reproduces `bundle` and `bundle_other`.
struct FsWitness {
  int condition = 1;  // 1: buying prices fall, 2: selling prices rise
  std::vector<Price> prices;
  std::vector<Price> prices_other;
  BundleMask bundle = 0;
  BundleMask bundle_other = 0;
};

struct FsReport {
  bool is_fully_substitutable = true;
  std::optional<FsWitness> witness;
  std::uint64_t prices_checked = 0;
};

// Guard on the number of price vectors in a box (pairs are enumerated).
inline constexpr std::uint64_t kMaxFsPriceVectors = 1U << 15;
// Guard for FsScan::kUnitSteps, which keeps one bundle per price vector.
inline constexpr std::uint64_t kMaxFsUnitStepVectors = 1U << 22;

// kAllPairs compares every ordered pair of price vectors. kUnitSteps only
// compares vectors one unit apart in a single coordinate: demand is
// single-valued, any premise pair is joined inside the box by a monotone
// path of such steps, and both conclusions compose along the path, so the
// verdict is the same at a fraction of the cost. Witnesses then differ in
// one coordinate by one unit.
enum class FsScan { kAllPairs, kUnitSteps };

// Exhaustively checks both conditions of full substitutability over every
// ordered pair of price vectors drawn from `box` (one range per incident
// trade):
//  (1) selling prices equal, buying prices p >= p':
//      Psi_sell within Psi'_sell, and {w in Psi'_buy : p_w = p'_w} within Psi_buy;
//  (2) buying prices equal, selling prices p <= p':
//      Psi_buy within Psi'_buy, and {w in Psi'_sell : p_w = p'_w} within Psi_sell.
// A clean report certifies the property on the box only.
FsReport CheckFullSubstitutability(const Valuation& valuation,
                                   const IncidentTrades& incident,
                                   std::span<const PriceRange> box,
                                   FsScan scan = FsScan::kAllPairs);
FsReport CheckFullSubstitutability(const Market& market, AgentIdx agent,
                                   std::span<const PriceRange> box,
                                   FsScan scan = FsScan::kAllPairs);
// Same range on every incident trade.
FsReport CheckFullSubstitutability(const Market& market, AgentIdx agent, PriceRange range,
                                   FsScan scan = FsScan::kAllPairs);

}  // namespace tradenet
