#include <algorithm>
#include <charconv>
#include <cmath>

#include "adapterforge/spec_lang.hpp"

namespace adapterforge::spec {

namespace {

std::string quote(std::string_view s)
{
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

std::string format_double(double d)
{
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  std::string out(buf, ptr);
  if (std::isfinite(d) && out.find_first_of(".e") == std::string::npos) {
    out += ".0";
  }
  return out;
}

void write_param(std::string& out, const ParamSig& p)
{
  out += p.name;
  out += ": ";
  out += p.ty.to_string();
  if (p.unit) out += " @unit(" + *p.unit + ")";
  if (p.concept_id) out += " @concept(" + p.concept_id->to_string() + ")";
  if (p.default_value) out += " = " + format_literal(*p.default_value);
}

void write_operation(std::string& out, const OperationSig& op, std::string_view indent)
{
  out += indent;
  out += "@concept(" + op.concept_id.to_string() + ")\n";
  out += indent;
  out += "op " + op.name + "(";
  for (std::size_t i = 0; i < op.params.size(); ++i) {
    if (i) out += ", ";
    write_param(out, op.params[i]);
  }
  out += ") -> " + op.returns.to_string() + ";\n";
}

void write_interface(std::string& out, const InterfaceSpec& iface)
{
  out += "  ";
  out += to_string(iface.direction);
  out += " interface " + iface.name + " {\n";
  for (const auto& op : iface.operations) write_operation(out, op, "    ");
  out += "  }\n";
}

}  // namespace

std::string format_literal(const Value& v)
{
  struct Visitor {
    std::string operator()(std::monostate) const { return "()"; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(const std::string& s) const { return quote(s); }
    std::string operator()(const Bytes& b) const
    {
      static constexpr char hex[] = "0123456789abcdef";
      std::string out = "x\"";
      for (auto byte : b.data) {
        out += hex[byte >> 4];
        out += hex[byte & 0xF];
      }
      return out + "\"";
    }
    std::string operator()(const Value::List& l) const
    {
      std::string out = "[";
      for (std::size_t i = 0; i < l.size(); ++i) {
        if (i) out += ", ";
        out += format_literal(l[i]);
      }
      return out + "]";
    }
  };
  return std::visit(Visitor{}, v.data);
}

std::string serialize(const ComponentSpec& spec)
{
  std::string out = "component " + quote(spec.name) + " version " + quote(spec.version.to_string()) + " {\n";
  std::vector<MetaEntry> meta = spec.meta;
  std::stable_sort(meta.begin(), meta.end(), [](const MetaEntry& a, const MetaEntry& b) { return a.key < b.key; });
  for (const auto& m : meta) {
    out += "  meta " + m.key + " = " + quote(m.value) + ";\n";
  }
  for (const auto* list : {&spec.provided, &spec.required}) {
    std::vector<const InterfaceSpec*> sorted;
    for (const auto& i : *list) sorted.push_back(&i);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const InterfaceSpec* a, const InterfaceSpec* b) { return a->name < b->name; });
    for (const auto* iface : sorted) write_interface(out, *iface);
  }
  out += "}\n";
  return out;
}

std::string serialize(const ProjectSpec& spec)
{
  std::string out = "project " + quote(spec.name) + " {\n";
  for (const auto& u : spec.uses) {
    out += "  uses " + quote(u.component) + " version " + quote(u.constraint.to_string()) + ";\n";
  }
  for (const auto& c : spec.connections) {
    out += "  connect " + c.consumer.component + ".requires." + c.consumer.interface_name + " -> " +
           c.provider.component + ".provides." + c.provider.interface_name + ";\n";
  }
  for (const auto& d : spec.demands) {
    out += "  demand " + d.to_string() + ";\n";
  }
  out += "}\n";
  return out;
}

std::string serialize(const OperationSig& op)
{
  std::string out;
  write_operation(out, op, "");
  return out;
}

}  // namespace adapterforge::spec
