#include "tradenet/topology.hpp"

#include <algorithm>
#include <queue>
#include <string>

#include "tradenet/errors.hpp"

namespace tradenet {
namespace {

bool Draw(Rng& rng, double p) {
  if (p >= 1.0) return true;
  if (p <= 0.0) return false;
  return std::bernoulli_distribution(p)(rng);
}

void AddAgents(MarketSkeleton& m, std::size_t count, Role role, const char* prefix) {
  for (std::size_t k = 0; k < count; ++k) {
    const auto id = static_cast<std::int64_t>(m.agents.size());
    m.agents.push_back({id, prefix + std::to_string(k), role});
  }
}

void AddTrade(MarketSkeleton& m, std::size_t seller, std::size_t buyer) {
  const auto id = static_cast<std::int64_t>(m.trades.size());
  m.trades.push_back({id, m.agents[seller].name + "->" + m.agents[buyer].name,
                      static_cast<AgentIdx>(buyer), static_cast<AgentIdx>(seller)});
}

void CheckProbability(double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("trade probability r must lie in [0, 1]");
}

}  // namespace

void ValidateTopology(const TopologyConfig& config) {
  if (const auto* bs = std::get_if<BsTopology>(&config.kind)) {
    if (bs->buyers == 0 || bs->sellers == 0) {
      throw DomainError("buyer and seller counts must be positive");
    }
    CheckProbability(bs->r);
  } else if (const auto* bis = std::get_if<BisTopology>(&config.kind)) {
    if (bis->buyers == 0 || bis->sellers == 0) {
      throw DomainError("buyer and seller counts must be positive");
    }
    CheckProbability(bis->r);
  } else {
    const auto& g = std::get<GeneralTopology>(config.kind);
    if (g.n == 0) throw DomainError("network size n must be positive");
    if (!(g.lambda > 0.0)) throw DomainError("lambda must be positive");
  }
}

MarketSkeleton GenerateBs(const BsTopology& config, Rng& rng) {
  MarketSkeleton m;
  AddAgents(m, config.buyers, Role::kBuyer, "b");
  AddAgents(m, config.sellers, Role::kSeller, "s");
  for (std::size_t b = 0; b < config.buyers; ++b) {
    for (std::size_t s = 0; s < config.sellers; ++s) {
      if (Draw(rng, config.r)) AddTrade(m, config.buyers + s, b);
    }
  }
  return m;
}

MarketSkeleton GenerateBis(const BisTopology& config, Rng& rng) {
  MarketSkeleton m;
  AddAgents(m, config.buyers, Role::kBuyer, "b");
  AddAgents(m, config.sellers, Role::kSeller, "s");
  AddAgents(m, config.intermediaries, Role::kIntermediary, "i");
  const std::size_t first_seller = config.buyers;
  const std::size_t first_inter = config.buyers + config.sellers;
  for (std::size_t i = 0; i < config.intermediaries; ++i) {
    for (std::size_t s = 0; s < config.sellers; ++s) {
      if (Draw(rng, config.r)) AddTrade(m, first_seller + s, first_inter + i);
    }
    for (std::size_t b = 0; b < config.buyers; ++b) {
      if (Draw(rng, config.r)) AddTrade(m, first_inter + i, b);
    }
  }
  return m;
}

std::vector<std::size_t> LargestComponent(const Multigraph& graph) {
  const std::size_t n = graph.size();
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> best;
  for (std::size_t root = 0; root < n; ++root) {
    if (seen[root]) continue;
    std::vector<std::size_t> comp;
    std::queue<std::size_t> q;
    q.push(root);
    seen[root] = 1;
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      comp.push_back(u);
      for (std::size_t v = 0; v < n; ++v) {
        if (!seen[v] && graph.weight(u, v) > 0) {
          seen[v] = 1;
          q.push(v);
        }
      }
    }
    if (comp.size() > best.size()) best = std::move(comp);
  }
  std::sort(best.begin(), best.end());
  return best;
}

MarketSkeleton BuildGeneralMarket(const Multigraph& graph, Rng& rng) {
  const std::size_t n = graph.size();
  std::vector<std::size_t> degree(n, 0);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) degree[u] += graph.weight(u, v) > 0;
  }
  std::vector<Role> roles(n, Role::kIntermediary);
  for (std::size_t u = 0; u < n; ++u) {
    if (degree[u] <= 1) roles[u] = Draw(rng, 0.5) ? Role::kBuyer : Role::kSeller;
  }

  MarketSkeleton m;
  std::size_t counts[3] = {0, 0, 0};
  for (std::size_t u = 0; u < n; ++u) {
    const int r = static_cast<int>(roles[u]);
    const char* prefix = roles[u] == Role::kBuyer ? "b" : roles[u] == Role::kSeller ? "s" : "i";
    m.agents.push_back(
        {static_cast<std::int64_t>(u), prefix + std::to_string(counts[r]++), roles[u]});
  }
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if (graph.weight(u, v) == 0) continue;
      const Role ru = roles[u];
      const Role rv = roles[v];
      if (ru == Role::kIntermediary && rv == Role::kIntermediary) {
        AddTrade(m, u, v);
        AddTrade(m, v, u);
      } else if (ru == Role::kBuyer && rv != Role::kBuyer) {
        AddTrade(m, v, u);
      } else if (rv == Role::kBuyer && ru != Role::kBuyer) {
        AddTrade(m, u, v);
      } else if (ru == Role::kSeller && rv == Role::kIntermediary) {
        AddTrade(m, u, v);
      } else if (rv == Role::kSeller && ru == Role::kIntermediary) {
        AddTrade(m, v, u);
      }
      // Remaining case: two leaves of the same role, no trade possible.
    }
  }
  return m;
}

MarketSkeleton GenerateGeneral(const GeneralTopology& config, Rng& rng) {
  const std::size_t n = config.n;
  const double p = std::min(1.0, config.lambda / static_cast<double>(n));
  Multigraph g(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if (Draw(rng, p)) g.AddEdge(u, v);
    }
  }
  const std::vector<std::size_t> comp = LargestComponent(g);
  Multigraph sub(comp.size());
  for (std::size_t a = 0; a < comp.size(); ++a) {
    for (std::size_t b = a + 1; b < comp.size(); ++b) {
      if (g.weight(comp[a], comp[b]) > 0) sub.AddEdge(a, b);
    }
  }
  return BuildGeneralMarket(sub, rng);
}

MarketSkeleton Generate(const TopologyConfig& config, Rng& rng) {
  ValidateTopology(config);
  return std::visit(
      [&](const auto& kind) -> MarketSkeleton {
        using T = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<T, BsTopology>) {
          return GenerateBs(kind, rng);
        } else if constexpr (std::is_same_v<T, BisTopology>) {
          return GenerateBis(kind, rng);
        } else {
          return GenerateGeneral(kind, rng);
        }
      },
      config.kind);
}

MarketSkeleton Generate(const TopologyConfig& config) {
  Rng rng(config.seed);
  return Generate(config, rng);
}

Market AssignValuations(const MarketSkeleton& skeleton, ValueSet values, Rng& rng) {
  if (values.lo > values.hi) throw DomainError("value set is empty");
  std::vector<char> buys(skeleton.agents.size(), 0);
  std::vector<char> sells(skeleton.agents.size(), 0);
  for (const Trade& t : skeleton.trades) {
    if (t.buyer < buys.size()) buys[t.buyer] = 1;
    if (t.seller < sells.size()) sells[t.seller] = 1;
  }
  std::uniform_int_distribution<std::int64_t> draw(values.lo, values.hi);
  std::vector<Valuation> valuations;
  for (std::size_t i = 0; i < skeleton.agents.size(); ++i) {
    const Agent& a = skeleton.agents[i];
    switch (a.role) {
      case Role::kBuyer:
        if (sells[i]) throw DomainError("buyer " + a.name + " has a selling trade");
        valuations.push_back(Valuation::Buyer(draw(rng)));
        break;
      case Role::kSeller:
        if (buys[i]) throw DomainError("seller " + a.name + " has a buying trade");
        valuations.push_back(Valuation::Seller(draw(rng)));
        break;
      case Role::kIntermediary:
        valuations.push_back(Valuation::Flow());
        break;
      case Role::kGeneric:
        throw DomainError("agent " + a.name + " has no buyer/seller/intermediary role");
    }
  }
  return Market(skeleton.agents, skeleton.trades, std::move(valuations));
}

}  // namespace tradenet
