#pragma once

#include "tradenet/market.hpp"

namespace tradenet::testing {

// The two-trade cycling example: agent 0 buys, agent 1 sells, trade 0 is
// omega and trade 1 is phi.
inline Market Example2Market() {
  std::vector<Agent> agents = {{0, "buyer", Role::kGeneric}, {1, "seller", Role::kGeneric}};
  std::vector<Trade> trades = {{0, "omega", 0, 1}, {1, "phi", 0, 1}};
  return Market(agents, trades,
                {Valuation::Table({0, 8, 9, kNegInf}), Valuation::Table({0, -6, -7, -9})});
}

// One trade from a UnitSeller to a UnitBuyer.
inline Market UnitPair(std::int64_t value, std::int64_t cost) {
  std::vector<Agent> agents = {{0, "b", Role::kBuyer}, {1, "s", Role::kSeller}};
  return Market(agents, {{0, "t", 0, 1}}, {Valuation::Buyer(value), Valuation::Seller(cost)});
}

// s -> m -> b with a UnitSeller, a flow intermediary and a UnitBuyer.
inline Market Chain(std::int64_t cost, std::int64_t value) {
  std::vector<Agent> agents = {
      {0, "s", Role::kSeller}, {1, "m", Role::kIntermediary}, {2, "b", Role::kBuyer}};
  std::vector<Trade> trades = {{0, "sm", 1, 0}, {1, "mb", 2, 1}};
  return Market(agents, trades,
                {Valuation::Seller(cost), Valuation::Flow(), Valuation::Buyer(value)});
}

}  // namespace tradenet::testing
