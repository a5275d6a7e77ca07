#include "tradenet/valuation.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "tradenet/errors.hpp"

namespace tradenet {

TieBreak TieBreak::Explicit(const std::vector<BundleMask>& best_first) {
  const std::size_t n = best_first.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw DomainError("explicit tie-break order must list 2^k bundles, got " +
                      std::to_string(n));
  }
  TieBreak t;
  t.rule_ = TieBreakRule::kExplicit;
  t.ranks_.assign(n, static_cast<std::uint32_t>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const BundleMask m = best_first[r];
    if (m >= n || t.ranks_[m] != n) {
      throw DomainError("explicit tie-break order is not a permutation of bundles");
    }
    t.ranks_[m] = static_cast<std::uint32_t>(r);
  }
  return t;
}

std::vector<BundleMask> TieBreak::ExplicitOrder() const {
  std::vector<BundleMask> order(ranks_.size());
  for (std::size_t m = 0; m < ranks_.size(); ++m) order[ranks_[m]] = static_cast<BundleMask>(m);
  return order;
}

ExtValue Evaluate(const Valuation& valuation, BundleMask bundle,
                  const IncidentTrades& incident) {
  if ((bundle & ~incident.full_mask()) != 0) {
    throw DomainError("bundle contains a trade the agent is not party to");
  }
  if (const auto* table = valuation.table()) {
    if (table->values.size() != (std::size_t{1} << incident.size())) {
      throw DomainError("table valuation does not cover all 2^k bundles");
    }
  }
  return EvaluateUnchecked(valuation, bundle, incident);
}

std::int64_t MaxAbsFiniteValue(const Valuation& valuation,
                               const IncidentTrades& incident) {
  return std::visit(
      [&](const auto& kind) -> std::int64_t {
        using T = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<T, UnitBuyer>) {
          return incident.size() > 0 ? std::llabs(kind.value) : 0;
        } else if constexpr (std::is_same_v<T, UnitSeller>) {
          return incident.size() > 0 ? std::llabs(kind.cost) : 0;
        } else if constexpr (std::is_same_v<T, Intermediary>) {
          return 0;
        } else {
          std::int64_t best = 0;
          for (const ExtValue& v : kind.values) {
            if (v.is_finite()) best = std::max<std::int64_t>(best, std::llabs(v.value()));
          }
          return best;
        }
      },
      valuation.kind());
}

}  // namespace tradenet
