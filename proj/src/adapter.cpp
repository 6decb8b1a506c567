#include "adapterforge/adapter.hpp"

#include <map>

#include "adapterforge/codec.hpp"
#include "adapterforge/digest.hpp"
#include "adapterforge/error.hpp"
#include "adapterforge/spec_lang.hpp"

namespace adapterforge::adapter {

using codec::json;

namespace {

constexpr std::string_view kDescriptorFormat = "adapterforge-adapter/1";

json encode_slot(const SlotAction& s)
{
  return std::visit(
      [](const auto& a) -> json {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, Take>) {
          return {{"action", "TAKE"}, {"index", a.index}};
        } else if constexpr (std::is_same_v<T, Convert>) {
          return {{"action", "CONVERT"}, {"index", a.index}, {"conversion", codec::encode(a.rule)}};
        } else {
          return {{"action", "FILL"}, {"value", codec::encode(a.value)}};
        }
      },
      s);
}

SlotAction decode_slot(const json& j)
{
  auto action = j.at("action").get<std::string>();
  if (action == "TAKE") return Take{j.at("index").get<std::size_t>()};
  if (action == "CONVERT") return Convert{j.at("index").get<std::size_t>(), codec::decode_rule(j.at("conversion"))};
  if (action == "FILL") return Fill{codec::decode_value(j.at("value"))};
  throw Error(ErrorCode::InvalidSpec, "unknown slot action '" + action + "'");
}

json encode_mapping(const OpMapping& m)
{
  json slots = json::array();
  for (const auto& s : m.slots) slots.push_back(encode_slot(s));
  json ret = m.return_conversion ? json{{"action", "CONVERT"}, {"conversion", codec::encode(*m.return_conversion)}}
                                 : json{{"action", "PASS"}};
  return {{"from", m.from}, {"to", m.to}, {"slots", std::move(slots)}, {"return", std::move(ret)}};
}

/// Everything except the name; the name embeds a digest of this.
json encode_body(const AdapterSpec& a)
{
  json mappings = json::array();
  for (const auto& m : a.mappings) mappings.push_back(encode_mapping(m));
  return {{"format", kDescriptorFormat},
          {"version", a.version.to_string()},
          {"consumer", {{"component", a.consumer_component}, {"interface", codec::encode(a.implements)}}},
          {"provider",
           {{"component", a.provider_component},
            {"version", a.provider_version.to_string()},
            {"interface", codec::encode(a.delegates_to)}}},
          {"mappings", std::move(mappings)},
          {"provenance",
           {{"project", a.provenance.project}, {"score", codec::encode(a.provenance.score)}, {"tool", a.provenance.tool}}}};
}

spec::Version decode_version(const json& j)
{
  auto v = spec::Version::parse(j.get<std::string>());
  if (!v) throw Error(ErrorCode::InvalidSpec, "malformed version");
  return *v;
}

}  // namespace

spec::ComponentSpec AdapterSpec::as_component() const
{
  spec::ComponentSpec c;
  c.name = name;
  c.version = version;
  spec::InterfaceSpec provided = implements;
  provided.direction = spec::Direction::Provided;
  spec::InterfaceSpec required = delegates_to;
  required.direction = spec::Direction::Required;
  c.provided.push_back(std::move(provided));
  c.required.push_back(std::move(required));
  c.meta = {
      {"adapter.consumer", consumer_component},
      {"adapter.provider", provider_component + "@" + provider_version.to_string()},
      {"provenance.project", provenance.project},
      {"provenance.score", provenance.score.to_string()},
      {"provenance.tool", provenance.tool},
  };
  c.normalize();
  return c;
}

AdapterSpec generate_adapter(const analyser::ConnectionReport& report, const spec::ComponentSpec& consumer,
                             const spec::ComponentSpec& provider, const std::string& project_name)
{
  using namespace analyser;
  if (report.verdict != Verdict::Adaptable) {
    throw Error(ErrorCode::NotAdaptable, "connection '" + report.connection.to_string() + "' is " +
                                             std::string(to_string(report.verdict)) + ", not ADAPTABLE");
  }
  const auto* req_iface = consumer.find_interface(spec::Direction::Required, report.connection.consumer.interface_name);
  const auto* prov_iface = provider.find_interface(spec::Direction::Provided, report.connection.provider.interface_name);
  if (!req_iface || !prov_iface) {
    throw Error(ErrorCode::Unresolved, "connection '" + report.connection.to_string() + "' does not name these components");
  }

  AdapterSpec a;
  a.consumer_component = consumer.name;
  a.implements = *req_iface;
  a.provider_component = provider.name;
  a.provider_version = provider.version;
  a.delegates_to = *prov_iface;
  a.provenance.project = project_name;
  a.provenance.score = report.score;

  for (const auto& req : req_iface->operations) {
    const OperationMatch* match = nullptr;
    for (const auto& m : report.matched) {
      if (m.required_op == req.name) match = &m;
    }
    if (!match) throw Error(ErrorCode::NotAdaptable, "required operation '" + req.name + "' has no match");
    const auto* prov_op = prov_iface->find_operation(match->provided_op);
    if (!prov_op) throw Error(ErrorCode::Unresolved, "provided operation '" + match->provided_op + "' not found");

    const std::size_t arity = prov_op->params.size();
    std::vector<std::optional<SlotAction>> slots(arity);
    std::optional<std::vector<std::size_t>> order;
    std::map<std::size_t, ConversionRule> conversions;
    OpMapping mapping{req.name, prov_op->name, {}, std::nullopt};
    for (const auto& mm : match->mismatches) {
      if (const auto* fill = std::get_if<FillDetail>(&mm.detail)) {
        slots.at(fill->slot) = Fill{fill->value};
      } else if (const auto* perm = std::get_if<PermutationDetail>(&mm.detail)) {
        order = perm->order;
      } else if (const auto* conv = std::get_if<ConversionDetail>(&mm.detail)) {
        if (conv->slot) {
          conversions[*conv->slot] = conv->rule;
        } else {
          mapping.return_conversion = conv->rule;
        }
      }
    }
    std::size_t next = 0;
    for (std::size_t j = 0; j < arity; ++j) {
      if (slots[j]) continue;
      std::size_t index = order ? order->at(next) : next;
      ++next;
      if (auto it = conversions.find(j); it != conversions.end()) {
        slots[j] = Convert{index, it->second};
      } else {
        slots[j] = Take{index};
      }
    }
    if (next != req.params.size()) {
      throw Error(ErrorCode::NotAdaptable, "mapping for '" + req.name + "' does not consume every consumer parameter");
    }
    for (auto& s : slots) mapping.slots.push_back(std::move(*s));
    a.mappings.push_back(std::move(mapping));
  }

  a.name = "adapt_" + consumer.name + "_" + provider.name + "_" + sha256_hex(codec::canonical(encode_body(a))).substr(0, 8);
  return a;
}

std::string emit_descriptor(const AdapterSpec& adapter)
{
  json doc = encode_body(adapter);
  doc["name"] = adapter.name;
  return codec::canonical(doc);
}

AdapterSpec parse_descriptor(std::string_view text)
{
  json doc = codec::parse_json(text, "adapter descriptor");
  try {
    if (doc.at("format").get<std::string>() != kDescriptorFormat) {
      throw Error(ErrorCode::InvalidSpec, "unsupported descriptor format");
    }
    AdapterSpec a;
    a.name = doc.at("name").get<std::string>();
    a.version = decode_version(doc.at("version"));
    a.consumer_component = doc.at("consumer").at("component").get<std::string>();
    a.implements = codec::decode_interface(doc.at("consumer").at("interface"));
    a.provider_component = doc.at("provider").at("component").get<std::string>();
    a.provider_version = decode_version(doc.at("provider").at("version"));
    a.delegates_to = codec::decode_interface(doc.at("provider").at("interface"));
    for (const auto& jm : doc.at("mappings")) {
      OpMapping m;
      m.from = jm.at("from").get<std::string>();
      m.to = jm.at("to").get<std::string>();
      for (const auto& js : jm.at("slots")) m.slots.push_back(decode_slot(js));
      const auto& ret = jm.at("return");
      auto action = ret.at("action").get<std::string>();
      if (action == "CONVERT") {
        m.return_conversion = codec::decode_rule(ret.at("conversion"));
      } else if (action != "PASS") {
        throw Error(ErrorCode::InvalidSpec, "unknown return action '" + action + "'");
      }
      a.mappings.push_back(std::move(m));
    }
    const auto& prov = doc.at("provenance");
    a.provenance.project = prov.at("project").get<std::string>();
    a.provenance.score = codec::decode_rational(prov.at("score"));
    a.provenance.tool = prov.at("tool").get<std::string>();
    return a;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("adapter descriptor: ") + e.what());
  }
}

std::string_view default_stub_template()
{
  return R"(// adapter {ADAPTER_NAME} {VERSION}
// implements {CONSUMER}.requires.{INTERFACE}
// delegates to {PROVIDER}.provides.{PROVIDER_INTERFACE}
adapter {ADAPTER_NAME} {
{OP_LIST}}
{BEGIN_OP}  {OP_FROM}({OP_PARAMS}) -> {OP_RETURNS} {
    result = {PROVIDER}.{OP_TO}({SLOT_ACTIONS})
    return {RETURN_ACTION}
  }
{END_OP}
)";
}

namespace {

using Bindings = std::map<std::string, std::string, std::less<>>;

/// Single pass over `text`; substituted values are never rescanned.
std::string substitute(std::string_view text, const Bindings& bindings)
{
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      std::size_t j = i + 1;
      while (j < text.size() && ((text[j] >= 'A' && text[j] <= 'Z') || text[j] == '_')) ++j;
      if (j > i + 1 && j < text.size() && text[j] == '}') {
        std::string_view name = text.substr(i + 1, j - i - 1);
        auto it = bindings.find(name);
        if (it == bindings.end()) throw Error(ErrorCode::Template, "unknown placeholder {" + std::string(name) + "}");
        out += it->second;
        i = j + 1;
        continue;
      }
    }
    out += text[i++];
  }
  return out;
}

std::string render_rule(const analyser::ConversionRule& r)
{
  std::string out(analyser::to_string(r.kind));
  if (r.kind == analyser::RuleKind::UnitScale) out += "[" + r.factor.to_string() + "]";
  out += "<" + r.from.to_string() + "->" + r.to.to_string() + ">";
  return out;
}

}  // namespace

std::string emit_stub(const AdapterSpec& adapter, std::string_view tmpl)
{
  constexpr std::string_view begin_tag = "{BEGIN_OP}";
  constexpr std::string_view end_tag = "{END_OP}";
  if (tmpl.find("{ADAPTER_NAME}") == std::string_view::npos) throw Error(ErrorCode::Template, "template lacks {ADAPTER_NAME}");
  if (tmpl.find("{OP_LIST}") == std::string_view::npos) throw Error(ErrorCode::Template, "template lacks {OP_LIST}");
  auto b = tmpl.find(begin_tag);
  auto e = tmpl.find(end_tag);
  if (b == std::string_view::npos || e == std::string_view::npos || e < b) {
    throw Error(ErrorCode::Template, "template lacks a {BEGIN_OP} ... {END_OP} block");
  }
  std::string_view block = tmpl.substr(b + begin_tag.size(), e - b - begin_tag.size());
  if (block.find("{SLOT_ACTIONS}") == std::string_view::npos) {
    throw Error(ErrorCode::Template, "operation block lacks {SLOT_ACTIONS}");
  }
  std::size_t after = e + end_tag.size();
  if (after < tmpl.size() && tmpl[after] == '\n') ++after;
  std::string outer = std::string(tmpl.substr(0, b)) + std::string(tmpl.substr(after));

  Bindings common = {
      {"ADAPTER_NAME", adapter.name},
      {"VERSION", adapter.version.to_string()},
      {"CONSUMER", adapter.consumer_component},
      {"INTERFACE", adapter.implements.name},
      {"PROVIDER", adapter.provider_component},
      {"PROVIDER_INTERFACE", adapter.delegates_to.name},
  };

  std::string ops;
  for (const auto& m : adapter.mappings) {
    const auto* req = adapter.implements.find_operation(m.from);
    if (!req) throw Error(ErrorCode::InvalidSpec, "mapping source '" + m.from + "' is not in the implemented interface");
    std::string params;
    for (std::size_t i = 0; i < req->params.size(); ++i) {
      if (i) params += ", ";
      params += req->params[i].name + ": " + req->params[i].ty.to_string();
    }
    auto arg_name = [&](std::size_t index) {
      if (index >= req->params.size()) throw Error(ErrorCode::InvalidSpec, "slot index out of range in '" + m.from + "'");
      return req->params[index].name;
    };
    std::string actions;
    for (std::size_t k = 0; k < m.slots.size(); ++k) {
      if (k) actions += ", ";
      actions += std::visit(
          [&](const auto& a) -> std::string {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, Take>) {
              return arg_name(a.index);
            } else if constexpr (std::is_same_v<T, Convert>) {
              return render_rule(a.rule) + "(" + arg_name(a.index) + ")";
            } else {
              return spec::format_literal(a.value);
            }
          },
          m.slots[k]);
    }
    Bindings op = common;
    op["OP_FROM"] = m.from;
    op["OP_TO"] = m.to;
    op["OP_PARAMS"] = params;
    op["OP_RETURNS"] = req->returns.to_string();
    op["SLOT_ACTIONS"] = actions;
    op["RETURN_ACTION"] = m.return_conversion ? render_rule(*m.return_conversion) + "(result)" : "result";
    ops += substitute(block, op);
  }

  Bindings outer_bindings = common;
  outer_bindings["OP_LIST"] = ops;
  auto op_list = outer.find("{OP_LIST}");
  // OP_LIST content is already rendered; substitute around it so it is not rescanned.
  std::string head = substitute(std::string_view(outer).substr(0, op_list), outer_bindings);
  std::string tail = substitute(std::string_view(outer).substr(op_list + 9), outer_bindings);
  return head + ops + tail;
}

spec::Value interpret_mapping(const OpMapping& mapping, std::span<const spec::Value> args, const ProviderFn& provider)
{
  auto arg = [&](std::size_t index) -> const spec::Value& {
    if (index >= args.size()) {
      throw Error(ErrorCode::InvalidSpec, "mapping '" + mapping.from + "' reads argument " + std::to_string(index) +
                                              " but only " + std::to_string(args.size()) + " were given");
    }
    return args[index];
  };
  std::vector<spec::Value> provider_args;
  provider_args.reserve(mapping.slots.size());
  for (const auto& slot : mapping.slots) {
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, Take>) {
            provider_args.push_back(arg(a.index));
          } else if constexpr (std::is_same_v<T, Convert>) {
            provider_args.push_back(analyser::apply_conversion(a.rule, arg(a.index)));
          } else {
            provider_args.push_back(a.value);
          }
        },
        slot);
  }
  spec::Value result = provider(provider_args);
  if (mapping.return_conversion) return analyser::apply_conversion(*mapping.return_conversion, result);
  return result;
}

}  // namespace adapterforge::adapter
