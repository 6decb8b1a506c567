#include "oracles.hpp"

#include <cmath>
#include <cerrno>
#include <cstdlib>
#include <limits>
#include <regex>
#include <sstream>

namespace adapterforge::testing {

using spec::Value;

namespace {

std::vector<std::string> split(const std::string& path)
{
  std::vector<std::string> out;
  std::stringstream ss(path);
  std::string seg;
  while (std::getline(ss, seg, '.')) out.push_back(seg);
  return out;
}

std::optional<int> hops_between(const std::string& a, const std::string& b)
{
  auto sa = split(a);
  auto sb = split(b);
  const auto& shorter = sa.size() <= sb.size() ? sa : sb;
  const auto& longer = sa.size() <= sb.size() ? sb : sa;
  for (std::size_t i = 0; i < shorter.size(); ++i) {
    if (shorter[i] != longer[i]) return std::nullopt;
  }
  return static_cast<int>(longer.size() - shorter.size());
}

std::string concept_of(const spec::OperationSig& op, std::size_t i)
{
  const auto& p = op.params[i];
  if (p.concept_id) return p.concept_id->to_string();
  return op.concept_id.to_string() + ".arg." + p.name;
}

Repr repr_of(const spec::ParamSig& p)
{
  return {p.ty, p.unit};
}

const OracleRule* find_rule(const std::vector<OracleRule>& rules, const Repr& from, const Repr& to)
{
  for (const auto& r : rules) {
    if (r.from == from && r.to == to) return &r;
  }
  return nullptr;
}

struct Search {
  const spec::OperationSig& req;
  const spec::OperationSig& prov;
  const std::vector<OracleRule>& rules;
  std::vector<int> slot_of;  // consumer index -> provider slot
  std::vector<bool> taken;
  std::optional<int> best;
  int fixed_cost = 0;

  void run(std::size_t i)
  {
    if (i == req.params.size()) {
      score();
      return;
    }
    for (std::size_t s = 0; s < prov.params.size(); ++s) {
      if (taken[s]) continue;
      if (concept_of(req, i) != concept_of(prov, s)) continue;
      Repr a = repr_of(req.params[i]);
      Repr b = repr_of(prov.params[s]);
      if (!(a == b) && !find_rule(rules, a, b)) continue;
      taken[s] = true;
      slot_of[i] = static_cast<int>(s);
      run(i + 1);
      taken[s] = false;
    }
  }

  void score()
  {
    int cost = fixed_cost;
    for (std::size_t s = 0; s < prov.params.size(); ++s) {
      if (taken[s]) continue;
      if (!prov.params[s].default_value) return;
      cost += 15;
    }
    for (std::size_t i = 0; i < req.params.size(); ++i) {
      if (!(repr_of(req.params[i]) == repr_of(prov.params[static_cast<std::size_t>(slot_of[i])]))) cost += 10;
    }
    // Consumer indices read in provider slot order must ascend for the identity.
    std::vector<std::size_t> order;
    for (std::size_t s = 0; s < prov.params.size(); ++s) {
      for (std::size_t i = 0; i < req.params.size(); ++i) {
        if (slot_of[i] == static_cast<int>(s)) order.push_back(i);
      }
    }
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (order[k] != k) {
        cost += 5;
        break;
      }
    }
    int s = 100 - cost;
    if (!best || s > *best) best = s;
  }
};

bool is_integer_text(const std::string& s)
{
  static const std::regex re("-?[0-9]+");
  return std::regex_match(s, re);
}

bool is_float_text(const std::string& s)
{
  static const std::regex re("-?([0-9]+\\.?[0-9]*|\\.[0-9]+)([eE][-+]?[0-9]+)?");
  return std::regex_match(s, re);
}

}  // namespace

std::optional<int> brute_force_score(const spec::OperationSig& required, const spec::OperationSig& provided,
                                     const std::vector<OracleRule>& rules)
{
  auto hops = hops_between(required.concept_id.to_string(), provided.concept_id.to_string());
  if (!hops) return std::nullopt;
  if (required.params.size() > provided.params.size()) return std::nullopt;
  int fixed = 10 * *hops;
  if (!(required.returns == provided.returns)) {
    if (!find_rule(rules, {provided.returns, std::nullopt}, {required.returns, std::nullopt})) return std::nullopt;
    fixed += 10;
  }
  Search search{required, provided, rules, std::vector<int>(required.params.size(), -1),
                std::vector<bool>(provided.params.size(), false), std::nullopt, fixed};
  search.run(0);
  if (!search.best || *search.best < 50) return std::nullopt;
  return search.best;
}

Outcome oracle_convert(const OracleRule& rule, const Value& v)
{
  const auto to = rule.to.ty.base;
  if (rule.kind == "WIDEN") {
    const auto* i = std::get_if<std::int64_t>(&v.data);
    if (!i) return std::string("E_CONVERT");
    if (to == spec::Prim::F64) return Value(static_cast<double>(*i));
    return Value(*i);
  }
  if (rule.kind == "NARROW_CHECKED") {
    std::int64_t lo = to == spec::Prim::I32 ? std::numeric_limits<std::int32_t>::min() : std::numeric_limits<std::int64_t>::min();
    std::int64_t hi = to == spec::Prim::I32 ? std::numeric_limits<std::int32_t>::max() : std::numeric_limits<std::int64_t>::max();
    if (const auto* i = std::get_if<std::int64_t>(&v.data)) {
      if (*i < lo || *i > hi) return std::string("E_NARROW");
      return Value(*i);
    }
    if (const auto* d = std::get_if<double>(&v.data)) {
      if (!std::isfinite(*d) || std::floor(*d) != *d) return std::string("E_NARROW");
      if (*d < static_cast<double>(lo) || *d >= -static_cast<double>(std::numeric_limits<std::int64_t>::min()) ||
          (to == spec::Prim::I32 && *d > static_cast<double>(hi))) {
        return std::string("E_NARROW");
      }
      return Value(static_cast<std::int64_t>(*d));
    }
    return std::string("E_CONVERT");
  }
  if (rule.kind == "UNIT_SCALE") {
    if (rule.from.ty.base == spec::Prim::F64) {
      const auto* d = std::get_if<double>(&v.data);
      if (!d) return std::string("E_CONVERT");
      return Value(*d * static_cast<double>(rule.num) / static_cast<double>(rule.den));
    }
    const auto* i = std::get_if<std::int64_t>(&v.data);
    if (!i) return std::string("E_CONVERT");
    std::int64_t product = 0;
    if (__builtin_mul_overflow(*i, rule.num, &product)) return std::string("E_NARROW");
    if (product % rule.den != 0) return std::string("E_NARROW");
    return Value(product / rule.den);
  }
  if (rule.kind == "PARSE") {
    const auto* s = std::get_if<std::string>(&v.data);
    if (!s) return std::string("E_CONVERT");
    if (to == spec::Prim::Bool) {
      if (*s == "true") return Value(true);
      if (*s == "false") return Value(false);
      return std::string("E_CONVERT");
    }
    if (to == spec::Prim::F64) {
      if (!is_float_text(*s)) return std::string("E_CONVERT");
      double d = std::strtod(s->c_str(), nullptr);
      if (!std::isfinite(d)) return std::string("E_CONVERT");
      return Value(d);
    }
    if (!is_integer_text(*s)) return std::string("E_CONVERT");
    errno = 0;
    long long parsed = std::strtoll(s->c_str(), nullptr, 10);
    if (errno == ERANGE) return std::string("E_CONVERT");
    if (to == spec::Prim::I32 && (parsed < std::numeric_limits<std::int32_t>::min() || parsed > std::numeric_limits<std::int32_t>::max())) {
      return std::string("E_CONVERT");
    }
    return Value(static_cast<std::int64_t>(parsed));
  }
  if (rule.kind == "FORMAT") {
    if (const auto* i = std::get_if<std::int64_t>(&v.data)) {
      std::ostringstream ss;
      ss << *i;
      return Value(ss.str());
    }
    if (const auto* b = std::get_if<bool>(&v.data)) return Value(std::string(*b ? "true" : "false"));
    return std::string("E_CONVERT");
  }
  return std::string("E_CONVERT");
}

std::variant<std::vector<Value>, std::string> compose_by_hand(const spec::OperationSig& required,
                                                              const spec::OperationSig& provided,
                                                              const std::vector<OracleRule>& rules,
                                                              const std::vector<Value>& args)
{
  std::vector<Value> out;
  for (std::size_t s = 0; s < provided.params.size(); ++s) {
    std::optional<std::size_t> source;
    for (std::size_t i = 0; i < required.params.size(); ++i) {
      if (concept_of(required, i) == concept_of(provided, s)) source = i;
    }
    if (!source) {
      out.push_back(*provided.params[s].default_value);
      continue;
    }
    Repr a = repr_of(required.params[*source]);
    Repr b = repr_of(provided.params[s]);
    if (a == b) {
      out.push_back(args[*source]);
      continue;
    }
    auto converted = oracle_convert(*find_rule(rules, a, b), args[*source]);
    if (auto* err = std::get_if<std::string>(&converted)) return *err;
    out.push_back(std::get<Value>(converted));
  }
  return out;
}

Outcome oracle_return(const spec::OperationSig& required, const spec::OperationSig& provided,
                      const std::vector<OracleRule>& rules, const Value& result)
{
  if (required.returns == provided.returns) return result;
  return oracle_convert(*find_rule(rules, {provided.returns, std::nullopt}, {required.returns, std::nullopt}), result);
}

std::vector<OracleRule> to_oracle_rules(const analyser::ConversionTable& table)
{
  std::vector<OracleRule> out;
  for (const auto& r : table.entries()) {
    out.push_back({{r.from.type, r.from.unit},
                   {r.to.type, r.to.unit},
                   std::string(analyser::to_string(r.kind)),
                   r.factor.num(),
                   r.factor.den()});
  }
  return out;
}

}  // namespace adapterforge::testing
