#include "adapterforge/spec.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

namespace adapterforge::spec {

namespace {

std::optional<std::uint64_t> parse_u64(std::string_view text)
{
  if (text.empty() || text.find_first_not_of("0123456789") != std::string_view::npos) {
    return std::nullopt;
  }
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

std::optional<Version> Version::parse(std::string_view text)
{
  auto first = text.find('.');
  if (first == std::string_view::npos) return std::nullopt;
  auto second = text.find('.', first + 1);
  if (second == std::string_view::npos) return std::nullopt;
  auto major = parse_u64(text.substr(0, first));
  auto minor = parse_u64(text.substr(first + 1, second - first - 1));
  auto patch = parse_u64(text.substr(second + 1));
  if (!major || !minor || !patch) return std::nullopt;
  return Version{*major, *minor, *patch};
}

std::string Version::to_string() const
{
  return std::to_string(major) + "." + std::to_string(minor) + "." + std::to_string(patch);
}

std::optional<VersionConstraint> VersionConstraint::parse(std::string_view text)
{
  if (text == "*") {
    return VersionConstraint{};
  }
  Kind kind;
  if (text.starts_with(">=")) {
    kind = Kind::AtLeast;
    text.remove_prefix(2);
  } else if (text.starts_with("=")) {
    kind = Kind::Exact;
    text.remove_prefix(1);
  } else {
    return std::nullopt;
  }
  auto version = Version::parse(text);
  if (!version) return std::nullopt;
  return VersionConstraint{kind, *version};
}

std::string VersionConstraint::to_string() const
{
  switch (kind) {
    case Kind::Any: return "*";
    case Kind::Exact: return "=" + version.to_string();
    case Kind::AtLeast: return ">=" + version.to_string();
  }
  return "*";
}

bool VersionConstraint::admits(const Version& v) const
{
  switch (kind) {
    case Kind::Any: return true;
    case Kind::Exact: return v == version;
    case Kind::AtLeast: return v >= version;
  }
  return false;
}

std::string_view to_string(Prim p)
{
  switch (p) {
    case Prim::I32: return "i32";
    case Prim::I64: return "i64";
    case Prim::F64: return "f64";
    case Prim::Bool: return "bool";
    case Prim::String: return "string";
    case Prim::Bytes: return "bytes";
    case Prim::Unit: return "unit";
  }
  return "unit";
}

std::optional<Prim> prim_from_string(std::string_view name)
{
  for (Prim p : {Prim::I32, Prim::I64, Prim::F64, Prim::Bool, Prim::String, Prim::Bytes, Prim::Unit}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

bool is_numeric(Prim p)
{
  return p == Prim::I32 || p == Prim::I64 || p == Prim::F64;
}

std::string SemType::to_string() const
{
  std::string out;
  for (int i = 0; i < list_depth; ++i) out += "list<";
  out += spec::to_string(base);
  out.append(static_cast<std::size_t>(list_depth), '>');
  return out;
}

bool ConceptId::valid_segment(std::string_view segment)
{
  if (segment.empty() || segment.front() < 'a' || segment.front() > 'z') return false;
  return std::all_of(segment.begin(), segment.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

std::optional<ConceptId> ConceptId::parse(std::string_view text)
{
  ConceptId id;
  std::size_t start = 0;
  while (true) {
    auto dot = text.find('.', start);
    auto segment = text.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    if (!valid_segment(segment)) return std::nullopt;
    id.segments_.emplace_back(segment);
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return id;
}

ConceptId ConceptId::from_path(std::string_view text)
{
  ConceptId id;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto dot = text.find('.', start);
    if (dot == std::string_view::npos) dot = text.size();
    if (dot > start) id.segments_.emplace_back(text.substr(start, dot - start));
    start = dot + 1;
  }
  return id;
}

std::string ConceptId::to_string() const
{
  std::string out;
  for (const auto& s : segments_) {
    if (!out.empty()) out += '.';
    out += s;
  }
  return out;
}

bool ConceptId::is_ancestor_of(const ConceptId& other) const
{
  return segments_.size() < other.segments_.size() &&
         std::equal(segments_.begin(), segments_.end(), other.segments_.begin());
}

std::optional<int> ConceptId::distance(const ConceptId& other) const
{
  if (*this == other) return 0;
  if (is_ancestor_of(other) || other.is_ancestor_of(*this)) {
    auto a = static_cast<int>(segments_.size());
    auto b = static_cast<int>(other.segments_.size());
    return a > b ? a - b : b - a;
  }
  return std::nullopt;
}

ConceptId ConceptId::child(std::string_view segment) const
{
  ConceptId out = *this;
  out.segments_.emplace_back(segment);
  return out;
}

bool literal_fits(const Value& v, const SemType& ty)
{
  if (ty.is_list()) {
    const auto* list = std::get_if<Value::List>(&v.data);
    if (!list) return false;
    SemType elem = ty.element();
    return std::all_of(list->begin(), list->end(), [&](const Value& e) { return literal_fits(e, elem); });
  }
  switch (ty.base) {
    case Prim::I32: {
      const auto* i = std::get_if<std::int64_t>(&v.data);
      return i && *i >= std::numeric_limits<std::int32_t>::min() && *i <= std::numeric_limits<std::int32_t>::max();
    }
    case Prim::I64: return std::holds_alternative<std::int64_t>(v.data);
    case Prim::F64: return std::holds_alternative<double>(v.data);
    case Prim::Bool: return std::holds_alternative<bool>(v.data);
    case Prim::String: return std::holds_alternative<std::string>(v.data);
    case Prim::Bytes: return std::holds_alternative<Bytes>(v.data);
    case Prim::Unit: return v.is_unit();
  }
  return false;
}

ConceptId OperationSig::param_concept(std::size_t index) const
{
  const ParamSig& p = params.at(index);
  if (p.concept_id) return *p.concept_id;
  return concept_id.child("arg").child(p.name);
}

std::string_view to_string(Direction d)
{
  return d == Direction::Provided ? "provides" : "requires";
}

const OperationSig* InterfaceSpec::find_operation(std::string_view op_name) const
{
  for (const auto& op : operations) {
    if (op.name == op_name) return &op;
  }
  return nullptr;
}

const InterfaceSpec* ComponentSpec::find_interface(Direction d, std::string_view iface) const
{
  const auto& list = d == Direction::Provided ? provided : required;
  for (const auto& i : list) {
    if (i.name == iface) return &i;
  }
  return nullptr;
}

void ComponentSpec::normalize()
{
  auto by_name = [](const InterfaceSpec& a, const InterfaceSpec& b) { return a.name < b.name; };
  std::stable_sort(provided.begin(), provided.end(), by_name);
  std::stable_sort(required.begin(), required.end(), by_name);
  std::stable_sort(meta.begin(), meta.end(), [](const MetaEntry& a, const MetaEntry& b) { return a.key < b.key; });
}

std::string Connection::to_string() const
{
  return consumer.component + ".requires." + consumer.interface_name + " -> " + provider.component +
         ".provides." + provider.interface_name;
}

const ComponentUse* ProjectSpec::find_use(std::string_view component) const
{
  for (const auto& u : uses) {
    if (u.component == component) return &u;
  }
  return nullptr;
}

bool is_identifier(std::string_view text)
{
  if (text.empty()) return false;
  auto head = text.front();
  if (!((head >= 'a' && head <= 'z') || (head >= 'A' && head <= 'Z') || head == '_')) return false;
  return std::all_of(text.begin(), text.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  });
}

}  // namespace adapterforge::spec
