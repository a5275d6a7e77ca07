#include "tradenet/io/experiment_file.hpp"

#include "json_util.hpp"
#include "tradenet/io/market_file.hpp"

namespace tradenet::io {
namespace {

using detail::AsDouble;
using detail::AsInt;
using detail::AsString;
using detail::AsUint;
using detail::Child;
using detail::Json;
using detail::Require;

TopologyConfig ParseTopology(const Json& j, const std::string& ptr) {
  const std::string kind = AsString(Require(j, "kind", ptr), Child(ptr, "kind"));
  TopologyConfig t;
  const auto count = [&](const char* key, std::size_t fallback) -> std::size_t {
    return j.contains(key) ? AsUint(j[key], Child(ptr, key)) : fallback;
  };
  const auto real = [&](const char* key, double fallback) {
    return j.contains(key) ? AsDouble(j[key], Child(ptr, key)) : fallback;
  };
  if (kind == "bs") {
    detail::RejectUnknownKeys(j, {"kind", "buyers", "sellers", "r"}, ptr);
    t.kind = BsTopology{count("buyers", 1), count("sellers", 1), real("r", 1.0)};
  } else if (kind == "bis") {
    detail::RejectUnknownKeys(j, {"kind", "buyers", "sellers", "intermediaries", "r"}, ptr);
    t.kind = BisTopology{count("buyers", 1), count("sellers", 1), count("intermediaries", 1),
                         real("r", 1.0)};
  } else if (kind == "general") {
    detail::RejectUnknownKeys(j, {"kind", "n", "lambda"}, ptr);
    t.kind = GeneralTopology{count("n", 2), real("lambda", 1.0)};
  } else {
    throw ParseError("unknown topology kind \"" + kind + "\" at " + Child(ptr, "kind"),
                     Child(ptr, "kind"));
  }
  return t;
}

Json TopologyJson(const TopologyConfig& t) {
  Json j;
  if (const auto* bs = std::get_if<BsTopology>(&t.kind)) {
    j["kind"] = "bs";
    j["buyers"] = bs->buyers;
    j["sellers"] = bs->sellers;
    j["r"] = bs->r;
  } else if (const auto* bis = std::get_if<BisTopology>(&t.kind)) {
    j["kind"] = "bis";
    j["buyers"] = bis->buyers;
    j["sellers"] = bis->sellers;
    j["intermediaries"] = bis->intermediaries;
    j["r"] = bis->r;
  } else {
    const auto& g = std::get<GeneralTopology>(t.kind);
    j["kind"] = "general";
    j["n"] = g.n;
    j["lambda"] = g.lambda;
  }
  return j;
}

ExperimentConfig ParseOne(const Json& j, const std::string& ptr) {
  detail::ExpectObject(j, ptr);
  detail::RejectUnknownKeys(j,
                            {"schema", "kind", "topology", "values", "init", "epsilon", "runs",
                             "sweep", "base_seed", "budget", "shock", "record_series"},
                            ptr);
  if (j.contains("schema")) {
    const std::string schema = AsString(j["schema"], Child(ptr, "schema"));
    if (schema != kExperimentSchema) {
      throw ParseError("unsupported schema \"" + schema + "\"", Child(ptr, "schema"));
    }
  }
  ExperimentConfig c;
  if (j.contains("kind")) {
    const std::string kind = AsString(j["kind"], Child(ptr, "kind"));
    const auto k = ParseExperimentKind(kind);
    if (!k) throw ParseError("unknown experiment kind \"" + kind + "\"", Child(ptr, "kind"));
    c.kind = *k;
  }
  if (j.contains("topology")) c.topology = ParseTopology(j["topology"], Child(ptr, "topology"));
  if (j.contains("values")) {
    const std::string vptr = Child(ptr, "values");
    const Json& v = j["values"];
    detail::ExpectObject(v, vptr);
    detail::RejectUnknownKeys(v, {"lo", "hi"}, vptr);
    c.values.lo = AsInt(Require(v, "lo", vptr), Child(vptr, "lo"));
    c.values.hi = AsInt(Require(v, "hi", vptr), Child(vptr, "hi"));
  }
  if (j.contains("init")) {
    const std::string iptr = Child(ptr, "init");
    const Json& v = j["init"];
    const std::string kind = AsString(Require(v, "kind", iptr), Child(iptr, "kind"));
    if (kind == "zero") {
      detail::RejectUnknownKeys(v, {"kind"}, iptr);
      c.init = ZeroOffers{};
    } else if (kind == "uniform") {
      detail::RejectUnknownKeys(v, {"kind", "lo", "hi"}, iptr);
      c.init = UniformOffers{AsInt(Require(v, "lo", iptr), Child(iptr, "lo")),
                             AsInt(Require(v, "hi", iptr), Child(iptr, "hi"))};
    } else {
      throw ParseError("unknown init kind \"" + kind + "\"", Child(iptr, "kind"));
    }
  }
  if (j.contains("epsilon")) c.epsilon = AsInt(j["epsilon"], Child(ptr, "epsilon"));
  if (j.contains("runs")) c.runs = AsUint(j["runs"], Child(ptr, "runs"));
  if (j.contains("sweep")) {
    const std::string sptr = Child(ptr, "sweep");
    const Json& s = j["sweep"];
    detail::ExpectObject(s, sptr);
    detail::RejectUnknownKeys(s, {"axis", "values"}, sptr);
    const std::string axis = AsString(Require(s, "axis", sptr), Child(sptr, "axis"));
    const auto a = ParseSweepAxis(axis);
    if (!a) throw ParseError("unknown sweep axis \"" + axis + "\"", Child(sptr, "axis"));
    c.axis = *a;
    if (s.contains("values")) {
      const Json& vals = detail::ExpectArray(s["values"], Child(sptr, "values"));
      for (std::size_t k = 0; k < vals.size(); ++k) {
        c.sweep_values.push_back(AsDouble(vals[k], Child(Child(sptr, "values"), k)));
      }
    }
  }
  if (j.contains("base_seed")) c.base_seed = AsUint(j["base_seed"], Child(ptr, "base_seed"));
  if (j.contains("budget")) c.budget = AsUint(j["budget"], Child(ptr, "budget"));
  if (j.contains("shock")) {
    const std::string sptr = Child(ptr, "shock");
    const Json& s = j["shock"];
    detail::ExpectObject(s, sptr);
    detail::RejectUnknownKeys(s, {"shocked_proportion", "size"}, sptr);
    if (s.contains("shocked_proportion")) {
      c.shock.shocked_proportion =
          AsDouble(s["shocked_proportion"], Child(sptr, "shocked_proportion"));
    }
    if (s.contains("size")) c.shock.size = AsDouble(s["size"], Child(sptr, "size"));
  }
  if (j.contains("record_series")) {
    c.record_series = detail::AsBool(j["record_series"], Child(ptr, "record_series"));
  }
  ValidateExperiment(c);
  return c;
}

}  // namespace

std::vector<ExperimentConfig> ParseExperimentConfigs(std::string_view text) {
  const Json root = detail::ParseJson(text);
  detail::ExpectObject(root, "");
  std::vector<ExperimentConfig> out;
  if (root.contains("experiments")) {
    detail::RejectUnknownKeys(root, {"experiments"}, "");
    const Json& list = detail::ExpectArray(root["experiments"], "/experiments");
    for (std::size_t k = 0; k < list.size(); ++k) {
      out.push_back(ParseOne(list[k], Child("/experiments", k)));
    }
  } else {
    out.push_back(ParseOne(root, ""));
  }
  return out;
}

std::string SerializeExperimentConfig(const ExperimentConfig& c) {
  Json j;
  j["schema"] = kExperimentSchema;
  j["kind"] = ExperimentKindName(c.kind);
  j["topology"] = TopologyJson(c.topology);
  j["values"] = {{"lo", c.values.lo}, {"hi", c.values.hi}};
  if (const auto* u = std::get_if<UniformOffers>(&c.init)) {
    j["init"] = {{"kind", "uniform"}, {"lo", u->lo}, {"hi", u->hi}};
  } else {
    j["init"] = {{"kind", "zero"}};
  }
  j["epsilon"] = c.epsilon;
  j["runs"] = c.runs;
  j["sweep"] = {{"axis", SweepAxisName(c.axis)}, {"values", c.sweep_values}};
  j["base_seed"] = c.base_seed;
  j["budget"] = c.budget;
  j["shock"] = {{"shocked_proportion", c.shock.shocked_proportion}, {"size", c.shock.size}};
  j["record_series"] = c.record_series;
  return j.dump(2) + "\n";
}

}  // namespace tradenet::io
