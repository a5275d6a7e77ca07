#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "tradenet/value.hpp"

namespace tradenet {

using AgentIdx = std::uint32_t;
using TradeIdx = std::uint32_t;

// A bundle of an agent's incident trades. Bit k stands for the k-th incident
// trade in ascending trade order.
using BundleMask = std::uint32_t;

// Demand and valuation tables enumerate all 2^k bundles; k is capped here.
inline constexpr std::size_t kMaxIncidentTrades = 24;

// The trades an agent takes part in, in ascending trade order, together with
// the sign chi (+1 buying, -1 selling) of each.
struct IncidentTrades {
  std::vector<TradeIdx> trades;
  std::vector<int> chi;
  BundleMask buying = 0;
  BundleMask selling = 0;

  std::size_t size() const { return trades.size(); }
  BundleMask full_mask() const {
    return trades.empty() ? 0 : static_cast<BundleMask>((1ULL << trades.size()) - 1);
  }
};

struct UnitBuyer {
  std::int64_t value = 0;
  friend bool operator==(const UnitBuyer&, const UnitBuyer&) = default;
};

struct UnitSeller {
  std::int64_t cost = 0;
  friend bool operator==(const UnitSeller&, const UnitSeller&) = default;
};

// Flow balance: value 0 when the bundle holds as many buying as selling
// trades, infeasible otherwise.
struct Intermediary {
  friend bool operator==(const Intermediary&, const Intermediary&) = default;
};

// Dense table over all 2^k bundles, indexed by BundleMask.
struct TableValuation {
  std::vector<ExtValue> values;
  friend bool operator==(const TableValuation&, const TableValuation&) = default;
};

enum class TieBreakRule {
  // Numerically smallest mask wins: {} < {t0} < {t1} < {t0,t1} < ...
  kLexicographic,
  // Bundle values are perturbed by 2^-(k+1) per contained trade k; the larger
  // perturbed value wins. Stored values stay integral.
  kPerturbation,
  // Caller-supplied strict order over all 2^k bundles.
  kExplicit,
};

// A strict total order over an agent's bundles, fixed at construction.
// `Key(mask, k)` maps a bundle to its rank; among utility ties the lowest
// rank is demanded.
class TieBreak {
 public:
  TieBreak() = default;

  static TieBreak Lexicographic() { return TieBreak(); }
  static TieBreak Perturbation() {
    TieBreak t;
    t.rule_ = TieBreakRule::kPerturbation;
    return t;
  }
  // `best_first` lists every bundle exactly once, most preferred first.
  static TieBreak Explicit(const std::vector<BundleMask>& best_first);

  TieBreakRule rule() const { return rule_; }
  // For explicit orders: rank_[mask]. Empty otherwise.
  const std::vector<std::uint32_t>& ranks() const { return ranks_; }
  std::vector<BundleMask> ExplicitOrder() const;

  std::uint64_t Key(BundleMask mask, std::size_t k) const {
    switch (rule_) {
      case TieBreakRule::kLexicographic:
        return mask;
      case TieBreakRule::kPerturbation:
        return ((1ULL << k) - 1) - Reverse(mask, k);
      case TieBreakRule::kExplicit:
        return ranks_[mask];
    }
    return mask;
  }

  friend bool operator==(const TieBreak&, const TieBreak&) = default;

 private:
  static std::uint64_t Reverse(BundleMask mask, std::size_t k) {
    std::uint64_t r = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (mask & (1U << j)) r |= 1ULL << (k - 1 - j);
    }
    return r;
  }

  TieBreakRule rule_ = TieBreakRule::kLexicographic;
  std::vector<std::uint32_t> ranks_;
};

class Valuation {
 public:
  using Kind = std::variant<UnitBuyer, UnitSeller, Intermediary, TableValuation>;

  Valuation() : kind_(Intermediary{}) {}
  explicit Valuation(Kind kind, TieBreak tie_break = TieBreak::Lexicographic())
      : kind_(std::move(kind)), tie_break_(std::move(tie_break)) {}

  static Valuation Buyer(std::int64_t value) { return Valuation(UnitBuyer{value}); }
  static Valuation Seller(std::int64_t cost) { return Valuation(UnitSeller{cost}); }
  static Valuation Flow() { return Valuation(Intermediary{}); }
  static Valuation Table(std::vector<ExtValue> values,
                         TieBreak tie_break = TieBreak::Lexicographic()) {
    return Valuation(TableValuation{std::move(values)}, std::move(tie_break));
  }

  const Kind& kind() const { return kind_; }
  const TieBreak& tie_break() const { return tie_break_; }
  void set_tie_break(TieBreak t) { tie_break_ = std::move(t); }

  bool is_table() const { return std::holds_alternative<TableValuation>(kind_); }
  const TableValuation* table() const { return std::get_if<TableValuation>(&kind_); }

  friend bool operator==(const Valuation&, const Valuation&) = default;

 private:
  Kind kind_;
  TieBreak tie_break_;
};

// v(bundle). Throws DomainError if the mask names trades beyond `incident`,
// or if a table does not cover 2^k bundles.
ExtValue Evaluate(const Valuation& valuation, BundleMask bundle,
                  const IncidentTrades& incident);

// Same as Evaluate without argument checks; the mask must be in range.
inline ExtValue EvaluateUnchecked(const Valuation& valuation, BundleMask bundle,
                                  const IncidentTrades& incident) {
  const auto& kind = valuation.kind();
  switch (kind.index()) {
    case 0: {  // UnitBuyer
      const int n = std::popcount(bundle);
      if (n == 0) return 0;
      if (n == 1) return std::get<UnitBuyer>(kind).value;
      return kNegInf;
    }
    case 1: {  // UnitSeller
      const int n = std::popcount(bundle);
      if (n == 0) return 0;
      if (n == 1) return -std::get<UnitSeller>(kind).cost;
      return kNegInf;
    }
    case 2:  // Intermediary
      return std::popcount(bundle & incident.buying) ==
                     std::popcount(bundle & incident.selling)
                 ? ExtValue(0)
                 : kNegInf;
    default:
      return std::get<TableValuation>(kind).values[bundle];
  }
}

// Largest |v(bundle)| over the finite-valued bundles.
std::int64_t MaxAbsFiniteValue(const Valuation& valuation,
                               const IncidentTrades& incident);

}  // namespace tradenet
