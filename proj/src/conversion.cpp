#include "adapterforge/conversion.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "adapterforge/error.hpp"
#include "adapterforge/spec_lang.hpp"

namespace adapterforge::analyser {

using spec::Prim;

std::string TypeKey::to_string() const
{
  return unit ? type.to_string() + "@" + *unit : type.to_string();
}

std::string_view to_string(RuleKind kind)
{
  switch (kind) {
    case RuleKind::Widen: return "WIDEN";
    case RuleKind::NarrowChecked: return "NARROW_CHECKED";
    case RuleKind::UnitScale: return "UNIT_SCALE";
    case RuleKind::Parse: return "PARSE";
    case RuleKind::Format: return "FORMAT";
  }
  return "WIDEN";
}

std::optional<RuleKind> rule_from_string(std::string_view name)
{
  for (auto k : {RuleKind::Widen, RuleKind::NarrowChecked, RuleKind::UnitScale, RuleKind::Parse, RuleKind::Format}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string ConversionRule::to_string() const
{
  std::string out = from.to_string() + " -> " + to.to_string() + " " + std::string(analyser::to_string(kind));
  if (kind == RuleKind::UnitScale) out += " " + factor.to_string();
  return out;
}

namespace {

bool scalar(const TypeKey& k, std::initializer_list<Prim> allowed)
{
  if (k.type.is_list()) return false;
  for (Prim p : allowed) {
    if (k.type.base == p) return true;
  }
  return false;
}

std::optional<std::string> inadmissible(const ConversionRule& r)
{
  if (r.from == r.to) return "identity conversion";
  if (r.kind != RuleKind::UnitScale && r.factor != Rational(1)) return "only UNIT_SCALE carries a factor";
  const Prim f = r.from.type.base;
  const Prim t = r.to.type.base;
  switch (r.kind) {
    case RuleKind::Widen:
      if (r.from.unit != r.to.unit) return "WIDEN must keep the unit";
      if (r.from.type.is_list() || r.to.type.is_list()) return "WIDEN applies to scalars";
      if ((f == Prim::I32 && (t == Prim::I64 || t == Prim::F64)) || (f == Prim::I64 && t == Prim::F64)) return std::nullopt;
      return "WIDEN supports i32->i64, i32->f64, i64->f64";
    case RuleKind::NarrowChecked:
      if (r.from.unit != r.to.unit) return "NARROW_CHECKED must keep the unit";
      if (r.from.type.is_list() || r.to.type.is_list()) return "NARROW_CHECKED applies to scalars";
      if ((f == Prim::I64 && t == Prim::I32) || (f == Prim::F64 && (t == Prim::I64 || t == Prim::I32))) return std::nullopt;
      return "NARROW_CHECKED supports i64->i32, f64->i64, f64->i32";
    case RuleKind::UnitScale:
      if (r.factor == Rational(0)) return "UNIT_SCALE factor must be nonzero";
      if (r.from.type != r.to.type || !scalar(r.from, {Prim::I32, Prim::I64, Prim::F64})) {
        return "UNIT_SCALE needs the same numeric scalar type on both sides";
      }
      if (!r.from.unit || !r.to.unit) return "UNIT_SCALE needs units on both sides";
      return std::nullopt;
    case RuleKind::Parse:
      if (r.from.unit || r.to.unit) return "PARSE takes no units";
      if (!scalar(r.from, {Prim::String}) || !scalar(r.to, {Prim::I32, Prim::I64, Prim::F64, Prim::Bool})) {
        return "PARSE supports string -> i32|i64|f64|bool";
      }
      return std::nullopt;
    case RuleKind::Format:
      if (r.from.unit || r.to.unit) return "FORMAT takes no units";
      if (!scalar(r.from, {Prim::I32, Prim::I64, Prim::Bool}) || !scalar(r.to, {Prim::String})) {
        return "FORMAT supports i32|i64|bool -> string";
      }
      return std::nullopt;
  }
  return "unknown rule";
}

std::optional<std::string> unit_column(std::string_view text)
{
  if (text == "-") return std::nullopt;
  return std::string(text);
}

constexpr std::string_view kBuiltinTable = R"(# from-type from-unit to-type to-unit rule num den
i32    -   i64    -   WIDEN           1 1
i32    -   f64    -   WIDEN           1 1
i64    -   f64    -   WIDEN           1 1
i64    -   i32    -   NARROW_CHECKED  1 1
f64    -   i64    -   NARROW_CHECKED  1 1
f64    ms  f64    s   UNIT_SCALE      1 1000
f64    s   f64    ms  UNIT_SCALE      1000 1
i64    ms  i64    s   UNIT_SCALE      1 1000
i64    s   i64    ms  UNIT_SCALE      1000 1
f64    m   f64    km  UNIT_SCALE      1 1000
f64    km  f64    m   UNIT_SCALE      1000 1
string -   i64    -   PARSE           1 1
string -   f64    -   PARSE           1 1
i32    -   string -   FORMAT          1 1
i64    -   string -   FORMAT          1 1
)";

}  // namespace

void ConversionTable::add(ConversionRule rule)
{
  if (auto why = inadmissible(rule)) {
    throw Error(ErrorCode::Config, "conversion " + rule.to_string() + ": " + *why);
  }
  auto key = std::make_pair(rule.from, rule.to);
  if (rules_.count(key)) throw Error(ErrorCode::Config, "duplicate conversion " + rule.to_string());
  rules_.emplace(std::move(key), std::move(rule));
}

const ConversionRule* ConversionTable::find(const TypeKey& from, const TypeKey& to) const
{
  auto it = rules_.find(std::make_pair(from, to));
  return it == rules_.end() ? nullptr : &it->second;
}

std::vector<ConversionRule> ConversionTable::entries() const
{
  std::vector<ConversionRule> out;
  for (const auto& [_, r] : rules_) out.push_back(r);
  return out;
}

ConversionTable ConversionTable::parse(std::string_view text, const std::string& file)
{
  ConversionTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> cols;
    for (std::string c; fields >> c;) cols.push_back(c);
    if (cols.empty()) continue;
    std::string where = (file.empty() ? "<conversions>" : file) + ":" + std::to_string(lineno);
    if (cols.size() != 7) throw Error(ErrorCode::Config, where + ": expected 7 columns, found " + std::to_string(cols.size()));
    try {
      ConversionRule rule;
      rule.from = {spec::parse_type(cols[0]), unit_column(cols[1])};
      rule.to = {spec::parse_type(cols[2]), unit_column(cols[3])};
      auto kind = rule_from_string(cols[4]);
      if (!kind) throw Error(ErrorCode::Config, "unknown rule '" + cols[4] + "'");
      rule.kind = *kind;
      rule.factor = Rational(Rational::parse(cols[5]) / Rational::parse(cols[6]));
      table.add(std::move(rule));
    } catch (const Error& e) {
      throw Error(ErrorCode::Config, where + ": " + e.detail());
    }
  }
  return table;
}

ConversionTable ConversionTable::load(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read conversion table '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

ConversionTable ConversionTable::builtin()
{
  return parse(kBuiltinTable, "<builtin>");
}

std::string ConversionTable::to_text() const
{
  std::string out;
  for (const auto& [_, r] : rules_) {
    out += r.from.type.to_string() + " " + r.from.unit.value_or("-") + " " + r.to.type.to_string() + " " +
           r.to.unit.value_or("-") + " " + std::string(to_string(r.kind)) + " " + std::to_string(r.factor.num()) + " " +
           std::to_string(r.factor.den()) + "\n";
  }
  return out;
}

namespace {

__extension__ using wide = __int128;

[[noreturn]] void bad_shape(const ConversionRule& r)
{
  throw Error(ErrorCode::Convert, "value does not have type " + r.from.to_string() + " for " + r.to_string());
}

std::int64_t checked_int(const ConversionRule& r, wide v)
{
  const bool i32 = r.to.type.base == Prim::I32;
  const wide lo = i32 ? std::numeric_limits<std::int32_t>::min() : std::numeric_limits<std::int64_t>::min();
  const wide hi = i32 ? std::numeric_limits<std::int32_t>::max() : std::numeric_limits<std::int64_t>::max();
  if (v < lo || v > hi) {
    throw Error(ErrorCode::Narrow, "value out of range for " + r.to.to_string() + " in " + r.to_string());
  }
  return static_cast<std::int64_t>(v);
}

std::int64_t double_to_int(const ConversionRule& r, double d)
{
  // 2^63 is exactly representable; anything at or above it does not fit i64.
  constexpr double two63 = 9223372036854775808.0;
  if (!std::isfinite(d) || std::trunc(d) != d || d >= two63 || d < -two63) {
    throw Error(ErrorCode::Narrow, "value is not an in-range integer for " + r.to_string());
  }
  return checked_int(r, static_cast<wide>(static_cast<std::int64_t>(d)));
}

}  // namespace

spec::Value apply_conversion(const ConversionRule& r, const spec::Value& value)
{
  const auto* as_int = std::get_if<std::int64_t>(&value.data);
  const auto* as_double = std::get_if<double>(&value.data);
  const auto* as_string = std::get_if<std::string>(&value.data);
  const auto* as_bool = std::get_if<bool>(&value.data);
  const Prim to = r.to.type.base;
  switch (r.kind) {
    case RuleKind::Widen:
      if (!as_int) bad_shape(r);
      if (to == Prim::F64) return spec::Value(static_cast<double>(*as_int));
      return spec::Value(*as_int);
    case RuleKind::NarrowChecked:
      if (as_int) return spec::Value(checked_int(r, *as_int));
      if (as_double) return spec::Value(double_to_int(r, *as_double));
      bad_shape(r);
    case RuleKind::UnitScale:
      if (r.from.type.base == Prim::F64) {
        if (!as_double) bad_shape(r);
        return spec::Value(*as_double * static_cast<double>(r.factor.num()) / static_cast<double>(r.factor.den()));
      }
      if (!as_int) bad_shape(r);
      {
        wide scaled = static_cast<wide>(*as_int) * r.factor.num();
        if (scaled % r.factor.den() != 0) {
          throw Error(ErrorCode::Narrow, "integer scaling is inexact for " + r.to_string());
        }
        return spec::Value(checked_int(r, scaled / r.factor.den()));
      }
    case RuleKind::Parse: {
      if (!as_string) bad_shape(r);
      const std::string& s = *as_string;
      const char* first = s.data();
      const char* last = s.data() + s.size();
      if (to == Prim::Bool) {
        if (s == "true") return spec::Value(true);
        if (s == "false") return spec::Value(false);
        throw Error(ErrorCode::Convert, "'" + s + "' is not a bool");
      }
      if (to == Prim::F64) {
        double d = 0;
        auto [ptr, ec] = std::from_chars(first, last, d);
        if (s.empty() || ec != std::errc{} || ptr != last || !std::isfinite(d)) {
          throw Error(ErrorCode::Convert, "'" + s + "' is not a finite f64");
        }
        return spec::Value(d);
      }
      std::int64_t i = 0;
      auto [ptr, ec] = std::from_chars(first, last, i);
      if (s.empty() || ec != std::errc{} || ptr != last) {
        throw Error(ErrorCode::Convert, "'" + s + "' is not an integer");
      }
      if (to == Prim::I32 && (i < std::numeric_limits<std::int32_t>::min() || i > std::numeric_limits<std::int32_t>::max())) {
        throw Error(ErrorCode::Convert, "'" + s + "' is out of range for i32");
      }
      return spec::Value(i);
    }
    case RuleKind::Format:
      if (as_int) return spec::Value(std::to_string(*as_int));
      if (as_bool) return spec::Value(std::string(*as_bool ? "true" : "false"));
      bad_shape(r);
  }
  bad_shape(r);
}

}  // namespace adapterforge::analyser
