#include "tradenet/io/market_file.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "json_util.hpp"

namespace tradenet::io {

using detail::AsInt;
using detail::AsString;
using detail::Child;
using detail::Json;
using detail::Require;

ParseError::ParseError(const std::string& message, std::string field, std::size_t line,
                       std::size_t column)
    : Error(message), field_(std::move(field)), line_(line), column_(column) {}

namespace {

std::string JoinViolations(const std::vector<Violation>& violations) {
  std::string out = std::to_string(violations.size()) + " validation problem(s): ";
  for (std::size_t k = 0; k < violations.size(); ++k) {
    if (k) out += "; ";
    out += violations[k].subject + ": " + violations[k].message;
  }
  return out;
}

struct RawAgent {
  Agent agent;
  Json valuation;
  Json tie_break;
  std::string ptr;
};

struct RawTrade {
  Trade trade;
  std::int64_t buyer_id = 0;
  std::int64_t seller_id = 0;
};

// Bundle mask of a list of trade ids for agent i. Returns false if some id is
// not one of the agent's trades.
bool MaskFromIds(const Market& m, AgentIdx i, const Json& ids, const std::string& ptr,
                 BundleMask& mask) {
  detail::ExpectArray(ids, ptr);
  mask = 0;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const auto t = m.FindTrade(AsInt(ids[k], Child(ptr, k)));
    if (!t) return false;
    const auto local = m.LocalIndex(i, *t);
    if (!local) return false;
    mask |= 1U << *local;
  }
  return true;
}

Json IdsFromMask(const Market& m, AgentIdx i, BundleMask mask) {
  Json ids = Json::array();
  for (TradeIdx t : m.TradesInBundle(i, mask)) ids.push_back(m.trade(t).id);
  return ids;
}

Valuation ParseValuation(const Market& skeleton, AgentIdx i, const RawAgent& raw,
                         std::vector<Violation>& violations) {
  const std::string ptr = Child(raw.ptr, "valuation");
  const std::string subject = "agent " + std::to_string(raw.agent.id);
  const std::string kind = AsString(Require(raw.valuation, "kind", ptr), Child(ptr, "kind"));
  Valuation v;
  if (kind == "unit_buyer") {
    detail::RejectUnknownKeys(raw.valuation, {"kind", "value"}, ptr);
    v = Valuation::Buyer(AsInt(Require(raw.valuation, "value", ptr), Child(ptr, "value")));
  } else if (kind == "unit_seller") {
    detail::RejectUnknownKeys(raw.valuation, {"kind", "cost"}, ptr);
    v = Valuation::Seller(AsInt(Require(raw.valuation, "cost", ptr), Child(ptr, "cost")));
  } else if (kind == "intermediary") {
    detail::RejectUnknownKeys(raw.valuation, {"kind"}, ptr);
    v = Valuation::Flow();
  } else if (kind == "table") {
    detail::RejectUnknownKeys(raw.valuation, {"kind", "values"}, ptr);
    const std::size_t k = skeleton.incident(i).size();
    if (k > kMaxIncidentTrades) {
      violations.push_back({subject, "table valuation over more than " +
                                         std::to_string(kMaxIncidentTrades) + " trades"});
      return Valuation::Table({0});
    }
    std::vector<ExtValue> values(std::size_t{1} << k, kNegInf);
    std::vector<char> seen(values.size(), 0);
    const std::string vptr = Child(ptr, "values");
    const Json& entries = detail::ExpectArray(Require(raw.valuation, "values", ptr), vptr);
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const std::string eptr = Child(vptr, e);
      detail::RejectUnknownKeys(entries[e], {"bundle", "value"}, eptr);
      BundleMask mask = 0;
      if (!MaskFromIds(skeleton, i, Require(entries[e], "bundle", eptr), Child(eptr, "bundle"),
                       mask)) {
        violations.push_back({subject, "table bundle at " + eptr +
                                           " names a trade the agent is not party to"});
        continue;
      }
      if (seen[mask]++) {
        violations.push_back({subject, "table lists a bundle twice (" + eptr + ")"});
        continue;
      }
      const Json& value = Require(entries[e], "value", eptr);
      if (value.is_string() && value.get<std::string>() == "-inf") {
        values[mask] = kNegInf;
      } else {
        values[mask] = AsInt(value, Child(eptr, "value"));
      }
    }
    // Tables must be complete: a silent default would hide modeling mistakes.
    const auto missing = std::count(seen.begin(), seen.end(), 0);
    if (missing > 0) {
      const auto first = static_cast<BundleMask>(std::find(seen.begin(), seen.end(), 0) - seen.begin());
      violations.push_back({subject, "table omits " + std::to_string(missing) +
                                         " bundle(s), first " + Json(IdsFromMask(skeleton, i, first)).dump()});
    }
    v = Valuation::Table(std::move(values));
  } else {
    throw ParseError("unknown valuation kind \"" + kind + "\" at " + Child(ptr, "kind"),
                     Child(ptr, "kind"));
  }

  if (raw.tie_break.is_null()) return v;
  const std::string tptr = Child(raw.ptr, "tie_break");
  if (raw.tie_break.is_string()) {
    const std::string rule = raw.tie_break.get<std::string>();
    if (rule == "lexicographic") {
      v.set_tie_break(TieBreak::Lexicographic());
    } else if (rule == "perturbation") {
      v.set_tie_break(TieBreak::Perturbation());
    } else {
      throw ParseError("unknown tie-break rule \"" + rule + "\" at " + tptr, tptr);
    }
    return v;
  }
  detail::RejectUnknownKeys(raw.tie_break, {"order"}, tptr);
  const std::string optr = Child(tptr, "order");
  const Json& order = detail::ExpectArray(Require(raw.tie_break, "order", tptr), optr);
  std::vector<BundleMask> best_first;
  for (std::size_t r = 0; r < order.size(); ++r) {
    BundleMask mask = 0;
    if (!MaskFromIds(skeleton, i, order[r], Child(optr, r), mask)) {
      violations.push_back({subject, "tie-break order entry " + Child(optr, r) +
                                         " names a trade the agent is not party to"});
      return v;
    }
    best_first.push_back(mask);
  }
  try {
    v.set_tie_break(TieBreak::Explicit(best_first));
  } catch (const DomainError& e) {
    violations.push_back({subject, e.what()});
  }
  return v;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(JoinViolations(violations)), violations_(std::move(violations)) {}

MarketDocument ParseMarket(std::string_view text) {
  const Json root = detail::ParseJson(text);
  detail::ExpectObject(root, "");
  detail::RejectUnknownKeys(root, {"schema", "agents", "trades", "initial_offers"}, "");
  const std::string schema = AsString(Require(root, "schema", ""), "/schema");
  if (schema != kMarketSchema) {
    throw ParseError("unsupported schema \"" + schema + "\", expected \"" + kMarketSchema + "\"",
                     "/schema");
  }

  std::vector<RawAgent> agents;
  const Json& agents_json = detail::ExpectArray(Require(root, "agents", ""), "/agents");
  for (std::size_t k = 0; k < agents_json.size(); ++k) {
    const std::string ptr = Child("/agents", k);
    const Json& a = agents_json[k];
    detail::RejectUnknownKeys(a, {"id", "name", "role", "valuation", "tie_break"}, ptr);
    RawAgent raw;
    raw.ptr = ptr;
    raw.agent.id = AsInt(Require(a, "id", ptr), Child(ptr, "id"));
    raw.agent.name = a.contains("name") ? AsString(a["name"], Child(ptr, "name"))
                                        : "agent" + std::to_string(raw.agent.id);
    const std::string role = AsString(Require(a, "role", ptr), Child(ptr, "role"));
    const auto parsed = ParseRole(role);
    if (!parsed) {
      throw ParseError("unknown role \"" + role + "\" at " + Child(ptr, "role"),
                       Child(ptr, "role"));
    }
    raw.agent.role = *parsed;
    raw.valuation = Require(a, "valuation", ptr);
    detail::ExpectObject(raw.valuation, Child(ptr, "valuation"));
    if (a.contains("tie_break")) raw.tie_break = a["tie_break"];
    agents.push_back(std::move(raw));
  }
  std::stable_sort(agents.begin(), agents.end(),
                   [](const RawAgent& x, const RawAgent& y) { return x.agent.id < y.agent.id; });
  std::map<std::int64_t, AgentIdx> agent_pos;
  for (AgentIdx i = 0; i < agents.size(); ++i) agent_pos.emplace(agents[i].agent.id, i);

  std::vector<RawTrade> trades;
  const Json& trades_json = detail::ExpectArray(Require(root, "trades", ""), "/trades");
  for (std::size_t k = 0; k < trades_json.size(); ++k) {
    const std::string ptr = Child("/trades", k);
    const Json& t = trades_json[k];
    detail::RejectUnknownKeys(t, {"id", "name", "buyer", "seller"}, ptr);
    RawTrade raw;
    raw.trade.id = AsInt(Require(t, "id", ptr), Child(ptr, "id"));
    raw.trade.name = t.contains("name") ? AsString(t["name"], Child(ptr, "name"))
                                        : "trade" + std::to_string(raw.trade.id);
    raw.buyer_id = AsInt(Require(t, "buyer", ptr), Child(ptr, "buyer"));
    raw.seller_id = AsInt(Require(t, "seller", ptr), Child(ptr, "seller"));
    trades.push_back(std::move(raw));
  }
  std::stable_sort(trades.begin(), trades.end(),
                   [](const RawTrade& x, const RawTrade& y) { return x.trade.id < y.trade.id; });

  std::vector<Violation> violations;
  std::vector<Trade> trade_list;
  const auto invalid = static_cast<AgentIdx>(agents.size());
  for (RawTrade& raw : trades) {
    const std::string subject = "trade " + std::to_string(raw.trade.id);
    const auto b = agent_pos.find(raw.buyer_id);
    const auto s = agent_pos.find(raw.seller_id);
    if (b == agent_pos.end()) {
      violations.push_back({subject, "buyer " + std::to_string(raw.buyer_id) + " is not an agent"});
    }
    if (s == agent_pos.end()) {
      violations.push_back(
          {subject, "seller " + std::to_string(raw.seller_id) + " is not an agent"});
    }
    raw.trade.buyer = b == agent_pos.end() ? invalid : b->second;
    raw.trade.seller = s == agent_pos.end() ? invalid : s->second;
    trade_list.push_back(raw.trade);
  }

  std::vector<Agent> agent_list;
  for (const RawAgent& raw : agents) agent_list.push_back(raw.agent);
  const Market skeleton(agent_list, trade_list,
                        std::vector<Valuation>(agent_list.size(), Valuation::Flow()));
  std::vector<Valuation> valuations;
  for (AgentIdx i = 0; i < agents.size(); ++i) {
    valuations.push_back(ParseValuation(skeleton, i, agents[i], violations));
  }
  MarketDocument doc;
  doc.market = Market(std::move(agent_list), std::move(trade_list), std::move(valuations));

  for (Violation& v : ValidateMarket(doc.market)) {
    // Unknown endpoints were already reported with the offending id.
    if (v.message == "endpoint is not an agent of the market") continue;
    violations.push_back(std::move(v));
  }

  if (root.contains("initial_offers")) {
    const std::string ptr = "/initial_offers";
    const Json& io = root["initial_offers"];
    detail::RejectUnknownKeys(io, {"epsilon", "offers"}, ptr);
    const Price eps = io.contains("epsilon") ? AsInt(io["epsilon"], Child(ptr, "epsilon")) : 1;
    if (eps <= 0) throw ParseError("epsilon must be positive at /initial_offers/epsilon",
                                   "/initial_offers/epsilon");
    OfferState state(doc.market.num_trades(), doc.market.num_agents(), eps);
    std::vector<char> covered(doc.market.num_trades(), 0);
    const std::string optr = Child(ptr, "offers");
    const Json& offers = detail::ExpectArray(Require(io, "offers", ptr), optr);
    for (std::size_t k = 0; k < offers.size(); ++k) {
      const std::string eptr = Child(optr, k);
      detail::RejectUnknownKeys(offers[k], {"trade", "buyer", "seller"}, eptr);
      const std::int64_t id = AsInt(Require(offers[k], "trade", eptr), Child(eptr, "trade"));
      const auto t = doc.market.FindTrade(id);
      if (!t) {
        violations.push_back({"initial offers", "trade " + std::to_string(id) + " is unknown"});
        continue;
      }
      if (covered[*t]++) {
        violations.push_back({"initial offers", "trade " + std::to_string(id) + " listed twice"});
      }
      state.set_offer(*t, Side::kBuyer,
                      AsInt(Require(offers[k], "buyer", eptr), Child(eptr, "buyer")));
      state.set_offer(*t, Side::kSeller,
                      AsInt(Require(offers[k], "seller", eptr), Child(eptr, "seller")));
    }
    for (TradeIdx t = 0; t < doc.market.num_trades(); ++t) {
      if (!covered[t]) {
        violations.push_back({"initial offers", "trade " +
                                                    std::to_string(doc.market.trade(t).id) +
                                                    " has no offers"});
      }
    }
    state.MarkAllUnsatisfied();
    doc.offers = std::move(state);
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return doc;
}

std::string SerializeMarket(const Market& market, const OfferState* offers) {
  std::vector<AgentIdx> agent_order(market.num_agents());
  std::iota(agent_order.begin(), agent_order.end(), AgentIdx{0});
  std::stable_sort(agent_order.begin(), agent_order.end(), [&](AgentIdx a, AgentIdx b) {
    return market.agent(a).id < market.agent(b).id;
  });
  std::vector<TradeIdx> trade_order(market.num_trades());
  std::iota(trade_order.begin(), trade_order.end(), TradeIdx{0});
  std::stable_sort(trade_order.begin(), trade_order.end(), [&](TradeIdx a, TradeIdx b) {
    return market.trade(a).id < market.trade(b).id;
  });

  Json root;
  root["schema"] = kMarketSchema;
  Json agents = Json::array();
  for (AgentIdx i : agent_order) {
    const Agent& a = market.agent(i);
    const Valuation& val = market.valuation(i);
    Json ja;
    ja["id"] = a.id;
    ja["name"] = a.name;
    ja["role"] = RoleName(a.role);
    Json jv;
    std::visit(
        [&](const auto& kind) {
          using T = std::decay_t<decltype(kind)>;
          if constexpr (std::is_same_v<T, UnitBuyer>) {
            jv["kind"] = "unit_buyer";
            jv["value"] = kind.value;
          } else if constexpr (std::is_same_v<T, UnitSeller>) {
            jv["kind"] = "unit_seller";
            jv["cost"] = kind.cost;
          } else if constexpr (std::is_same_v<T, Intermediary>) {
            jv["kind"] = "intermediary";
          } else {
            jv["kind"] = "table";
            Json values = Json::array();
            for (BundleMask m = 0; m < kind.values.size(); ++m) {
              Json e;
              e["bundle"] = IdsFromMask(market, i, m);
              if (kind.values[m].is_finite()) {
                e["value"] = kind.values[m].value();
              } else {
                e["value"] = "-inf";
              }
              values.push_back(std::move(e));
            }
            jv["values"] = std::move(values);
          }
        },
        val.kind());
    ja["valuation"] = std::move(jv);
    switch (val.tie_break().rule()) {
      case TieBreakRule::kLexicographic:
        ja["tie_break"] = "lexicographic";
        break;
      case TieBreakRule::kPerturbation:
        ja["tie_break"] = "perturbation";
        break;
      case TieBreakRule::kExplicit: {
        Json order = Json::array();
        for (BundleMask m : val.tie_break().ExplicitOrder()) {
          order.push_back(IdsFromMask(market, i, m));
        }
        ja["tie_break"]["order"] = std::move(order);
        break;
      }
    }
    agents.push_back(std::move(ja));
  }
  root["agents"] = std::move(agents);

  Json trades = Json::array();
  for (TradeIdx t : trade_order) {
    const Trade& tr = market.trade(t);
    Json jt;
    jt["id"] = tr.id;
    jt["name"] = tr.name;
    jt["buyer"] = market.agent(tr.buyer).id;
    jt["seller"] = market.agent(tr.seller).id;
    trades.push_back(std::move(jt));
  }
  root["trades"] = std::move(trades);

  if (offers) {
    Json jo;
    jo["epsilon"] = offers->epsilon();
    Json list = Json::array();
    for (TradeIdx t : trade_order) {
      Json e;
      e["trade"] = market.trade(t).id;
      e["buyer"] = offers->offer(t, Side::kBuyer);
      e["seller"] = offers->offer(t, Side::kSeller);
      list.push_back(std::move(e));
    }
    jo["offers"] = std::move(list);
    root["initial_offers"] = std::move(jo);
  }
  return root.dump(2) + "\n";
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::filesystem::path& path, std::string_view contents) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

MarketDocument LoadMarket(const std::filesystem::path& path) {
  return ParseMarket(ReadFile(path));
}

}  // namespace tradenet::io
