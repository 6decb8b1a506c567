#include "adapterforge/codec.hpp"

#include "adapterforge/error.hpp"
#include "adapterforge/spec_lang.hpp"

namespace adapterforge::codec {

namespace {

template <class F>
auto guard(std::string_view what, F&& f) -> decltype(f())
{
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string(what) + ": " + e.what());
  } catch (const ParseError& e) {
    throw Error(ErrorCode::InvalidSpec, std::string(what) + ": " + e.detail());
  }
}

spec::ConceptId strict_concept(const json& j)
{
  auto text = j.get<std::string>();
  auto id = spec::ConceptId::parse(text);
  if (!id) throw Error(ErrorCode::InvalidSpec, "malformed concept '" + text + "'");
  return *id;
}

json encode_key(const analyser::TypeKey& k)
{
  json j = {{"type", k.type.to_string()}};
  if (k.unit) j["unit"] = *k.unit;
  return j;
}

analyser::TypeKey decode_key(const json& j)
{
  analyser::TypeKey k;
  k.type = decode_type(j.at("type"));
  if (j.contains("unit")) k.unit = j.at("unit").get<std::string>();
  return k;
}

json optional_index(const std::optional<std::size_t>& i)
{
  return i ? json(*i) : json(nullptr);
}

std::optional<std::size_t> decode_optional_index(const json& j)
{
  if (j.is_null()) return std::nullopt;
  return j.get<std::size_t>();
}

}  // namespace

std::string canonical(const json& doc)
{
  return doc.dump(2, ' ', false, json::error_handler_t::strict) + "\n";
}

json parse_json(std::string_view text, std::string_view what)
{
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string(what) + " is not valid JSON: " + e.what());
  }
}

json encode(const spec::Value& v)
{
  return spec::format_literal(v);
}

spec::Value decode_value(const json& j)
{
  return guard("literal", [&] { return spec::parse_literal(j.get<std::string>()); });
}

json encode(const spec::SemType& t)
{
  return t.to_string();
}

spec::SemType decode_type(const json& j)
{
  return guard("type", [&] { return spec::parse_type(j.get<std::string>()); });
}

json encode(const spec::InterfaceSpec& iface)
{
  json ops = json::array();
  for (const auto& op : iface.operations) {
    json params = json::array();
    for (const auto& p : op.params) {
      json jp = {{"name", p.name}, {"type", encode(p.ty)}};
      if (p.concept_id) jp["concept"] = p.concept_id->to_string();
      if (p.unit) jp["unit"] = *p.unit;
      if (p.default_value) jp["default"] = encode(*p.default_value);
      params.push_back(std::move(jp));
    }
    ops.push_back({{"name", op.name}, {"concept", op.concept_id.to_string()}, {"returns", encode(op.returns)},
                   {"params", std::move(params)}});
  }
  return {{"name", iface.name}, {"direction", std::string(spec::to_string(iface.direction))}, {"operations", std::move(ops)}};
}

spec::InterfaceSpec decode_interface(const json& j)
{
  return guard("interface", [&] {
    spec::InterfaceSpec iface;
    iface.name = j.at("name").get<std::string>();
    auto dir = j.at("direction").get<std::string>();
    if (dir != "provides" && dir != "requires") throw Error(ErrorCode::InvalidSpec, "bad direction '" + dir + "'");
    iface.direction = dir == "provides" ? spec::Direction::Provided : spec::Direction::Required;
    for (const auto& jo : j.at("operations")) {
      spec::OperationSig op;
      op.name = jo.at("name").get<std::string>();
      op.concept_id = strict_concept(jo.at("concept"));
      op.returns = decode_type(jo.at("returns"));
      for (const auto& jp : jo.at("params")) {
        spec::ParamSig p;
        p.name = jp.at("name").get<std::string>();
        p.ty = decode_type(jp.at("type"));
        if (jp.contains("concept")) p.concept_id = strict_concept(jp.at("concept"));
        if (jp.contains("unit")) p.unit = jp.at("unit").get<std::string>();
        if (jp.contains("default")) p.default_value = decode_value(jp.at("default"));
        op.params.push_back(std::move(p));
      }
      iface.operations.push_back(std::move(op));
    }
    return iface;
  });
}

json encode(const spec::Connection& c)
{
  return {{"consumer", {{"component", c.consumer.component}, {"interface", c.consumer.interface_name}}},
          {"provider", {{"component", c.provider.component}, {"interface", c.provider.interface_name}}}};
}

spec::Connection decode_connection(const json& j)
{
  return guard("connection", [&] {
    spec::Connection c;
    c.consumer = {j.at("consumer").at("component").get<std::string>(), j.at("consumer").at("interface").get<std::string>()};
    c.provider = {j.at("provider").at("component").get<std::string>(), j.at("provider").at("interface").get<std::string>()};
    return c;
  });
}

json encode(const Rational& r)
{
  return r.to_string();
}

Rational decode_rational(const json& j)
{
  return guard("rational", [&] {
    try {
      return Rational::parse(j.get<std::string>());
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidSpec, e.detail());
    }
  });
}

json encode(const analyser::ConversionRule& r)
{
  return {{"from", encode_key(r.from)},
          {"to", encode_key(r.to)},
          {"rule", std::string(analyser::to_string(r.kind))},
          {"factor", encode(r.factor)},
          {"runtime_checked", r.runtime_checked()}};
}

analyser::ConversionRule decode_rule(const json& j)
{
  return guard("conversion rule", [&] {
    analyser::ConversionRule r;
    r.from = decode_key(j.at("from"));
    r.to = decode_key(j.at("to"));
    auto kind = analyser::rule_from_string(j.at("rule").get<std::string>());
    if (!kind) throw Error(ErrorCode::InvalidSpec, "unknown conversion rule");
    r.kind = *kind;
    r.factor = decode_rational(j.at("factor"));
    return r;
  });
}

json encode(const analyser::Mismatch& m)
{
  using namespace analyser;
  json j = {{"kind", std::string(to_string(m.kind()))}, {"operation", m.operation}};
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, RenameDetail>) {
          j["required_name"] = d.required_name;
          j["provided_name"] = d.provided_name;
        } else if constexpr (std::is_same_v<T, PermutationDetail>) {
          j["order"] = d.order;
        } else if constexpr (std::is_same_v<T, ConversionDetail>) {
          j["slot"] = optional_index(d.slot);
          j["consumer_index"] = optional_index(d.consumer_index);
          j["conversion"] = encode(d.rule);
        } else if constexpr (std::is_same_v<T, FillDetail>) {
          j["slot"] = d.slot;
          j["value"] = encode(d.value);
        } else if constexpr (std::is_same_v<T, MissingDetail>) {
          j["concept"] = d.concept_id.to_string();
        } else {
          j["hops"] = d.hops;
        }
      },
      m.detail);
  return j;
}

analyser::Mismatch decode_mismatch(const json& j)
{
  using namespace analyser;
  return guard("mismatch", [&] {
    Mismatch m;
    m.operation = j.at("operation").get<std::string>();
    auto kind = j.at("kind").get<std::string>();
    if (kind == "RENAME") {
      m.detail = RenameDetail{j.at("required_name").get<std::string>(), j.at("provided_name").get<std::string>()};
    } else if (kind == "PARAM_PERMUTATION") {
      m.detail = PermutationDetail{j.at("order").get<std::vector<std::size_t>>()};
    } else if (kind == "TYPE_CONVERSION") {
      m.detail = ConversionDetail{decode_optional_index(j.at("slot")), decode_optional_index(j.at("consumer_index")),
                                  decode_rule(j.at("conversion"))};
    } else if (kind == "DEFAULT_FILL") {
      m.detail = FillDetail{j.at("slot").get<std::size_t>(), decode_value(j.at("value"))};
    } else if (kind == "MISSING_OPERATION") {
      m.detail = MissingDetail{spec::ConceptId::from_path(j.at("concept").get<std::string>())};
    } else if (kind == "CONCEPT_DISTANCE") {
      m.detail = DistanceDetail{j.at("hops").get<int>()};
    } else {
      throw Error(ErrorCode::InvalidSpec, "unknown mismatch kind '" + kind + "'");
    }
    return m;
  });
}

json encode(const analyser::OperationMatch& m)
{
  json mismatches = json::array();
  for (const auto& mm : m.mismatches) mismatches.push_back(encode(mm));
  return {{"required", m.required_op}, {"provided", m.provided_op}, {"score", encode(m.score)}, {"mismatches", mismatches}};
}

analyser::OperationMatch decode_operation_match(const json& j)
{
  return guard("operation match", [&] {
    analyser::OperationMatch m;
    m.required_op = j.at("required").get<std::string>();
    m.provided_op = j.at("provided").get<std::string>();
    m.score = decode_rational(j.at("score"));
    for (const auto& mm : j.at("mismatches")) m.mismatches.push_back(decode_mismatch(mm));
    return m;
  });
}

json encode(const analyser::Demand& d)
{
  json j = {{"concept", d.concept_id.to_string()}, {"operation", d.operation}, {"origin", d.origin}};
  if (d.shape) {
    json params = json::array();
    for (const auto& p : d.shape->params) {
      json jp = {{"concept", p.concept_id.to_string()}, {"type", encode(p.ty)}};
      if (p.unit) jp["unit"] = *p.unit;
      params.push_back(std::move(jp));
    }
    j["shape"] = {{"params", std::move(params)}, {"returns", encode(d.shape->returns)}};
  }
  return j;
}

analyser::Demand decode_demand(const json& j)
{
  return guard("demand", [&] {
    analyser::Demand d;
    d.concept_id = spec::ConceptId::from_path(j.at("concept").get<std::string>());
    d.operation = j.at("operation").get<std::string>();
    d.origin = j.at("origin").get<std::string>();
    if (j.contains("shape")) {
      analyser::Shape s;
      for (const auto& jp : j.at("shape").at("params")) {
        analyser::ShapeParam p;
        p.concept_id = spec::ConceptId::from_path(jp.at("concept").get<std::string>());
        p.ty = decode_type(jp.at("type"));
        if (jp.contains("unit")) p.unit = jp.at("unit").get<std::string>();
        s.params.push_back(std::move(p));
      }
      s.returns = decode_type(j.at("shape").at("returns"));
      d.shape = std::move(s);
    }
    return d;
  });
}

json encode(const analyser::MatchReport& r)
{
  json conns = json::array();
  for (const auto& c : r.connections) {
    json matched = json::array();
    for (const auto& m : c.matched) matched.push_back(encode(m));
    json mismatches = json::array();
    for (const auto& m : c.mismatches) mismatches.push_back(encode(m));
    conns.push_back({{"connection", encode(c.connection)},
                     {"verdict", std::string(analyser::to_string(c.verdict))},
                     {"score", encode(c.score)},
                     {"reason", c.reason},
                     {"matched", std::move(matched)},
                     {"mismatches", std::move(mismatches)}});
  }
  json demands = json::array();
  for (const auto& d : r.demands) demands.push_back(encode(d));
  return {{"connections", std::move(conns)}, {"demands", std::move(demands)}};
}

analyser::MatchReport decode_match_report(const json& j)
{
  using namespace analyser;
  return guard("match report", [&] {
    MatchReport r;
    for (const auto& jc : j.at("connections")) {
      ConnectionReport c;
      c.connection = decode_connection(jc.at("connection"));
      auto verdict = jc.at("verdict").get<std::string>();
      if (verdict == "EXACT") {
        c.verdict = Verdict::Exact;
      } else if (verdict == "ADAPTABLE") {
        c.verdict = Verdict::Adaptable;
      } else if (verdict == "INCOMPATIBLE") {
        c.verdict = Verdict::Incompatible;
      } else {
        throw Error(ErrorCode::InvalidSpec, "unknown verdict '" + verdict + "'");
      }
      c.score = decode_rational(jc.at("score"));
      c.reason = jc.at("reason").get<std::string>();
      for (const auto& m : jc.at("matched")) c.matched.push_back(decode_operation_match(m));
      for (const auto& m : jc.at("mismatches")) c.mismatches.push_back(decode_mismatch(m));
      r.connections.push_back(std::move(c));
    }
    for (const auto& d : j.at("demands")) r.demands.push_back(decode_demand(d));
    return r;
  });
}

}  // namespace adapterforge::codec
