#include <set>

#include "adapterforge/spec_lang.hpp"

namespace adapterforge::spec {

std::string_view to_string(ViolationCode code)
{
  switch (code) {
    case ViolationCode::ConceptDepth: return "V_CONCEPT_DEPTH";
    case ViolationCode::ConceptSyntax: return "V_CONCEPT_SYNTAX";
    case ViolationCode::ListDepth: return "V_LIST_DEPTH";
    case ViolationCode::DefaultType: return "V_DEFAULT_TYPE";
    case ViolationCode::UnitType: return "V_UNIT_TYPE";
    case ViolationCode::DupName: return "V_DUP_NAME";
    case ViolationCode::BadName: return "V_BAD_NAME";
  }
  return "V_UNKNOWN";
}

namespace {

class Checker {
 public:
  std::vector<Violation> run(const ComponentSpec& spec)
  {
    if (!is_identifier(spec.name)) add(ViolationCode::BadName, spec.name, "component name is not an identifier");
    check_interfaces(spec.provided, Direction::Provided);
    check_interfaces(spec.required, Direction::Required);
    return std::move(out_);
  }

 private:
  void add(ViolationCode code, std::string where, std::string message)
  {
    out_.push_back({code, std::move(where), std::move(message)});
  }

  void check_concept(const ConceptId& c, const std::string& where)
  {
    if (c.empty()) {
      add(ViolationCode::ConceptSyntax, where, "concept is empty");
      return;
    }
    for (const auto& seg : c.segments()) {
      if (!ConceptId::valid_segment(seg)) {
        add(ViolationCode::ConceptSyntax, where, "concept segment '" + seg + "' is not [a-z][a-z0-9_]*");
        break;
      }
    }
    if (c.depth() > kMaxConceptDepth) {
      add(ViolationCode::ConceptDepth, where,
          "concept '" + c.to_string() + "' has " + std::to_string(c.depth()) + " segments (limit " +
              std::to_string(kMaxConceptDepth) + ")");
    }
  }

  void check_type(const SemType& t, const std::string& where)
  {
    if (t.list_depth > kMaxListDepth) {
      add(ViolationCode::ListDepth, where,
          "type '" + t.to_string() + "' nests lists deeper than " + std::to_string(kMaxListDepth));
    }
  }

  void check_interfaces(const std::vector<InterfaceSpec>& list, Direction direction)
  {
    std::set<std::string> names;
    for (const auto& iface : list) {
      if (!is_identifier(iface.name)) add(ViolationCode::BadName, iface.name, "interface name is not an identifier");
      if (!names.insert(iface.name).second) {
        add(ViolationCode::DupName, iface.name,
            "duplicate " + std::string(to_string(direction)) + " interface '" + iface.name + "'");
      }
      std::set<std::string> ops;
      for (const auto& op : iface.operations) {
        std::string where = iface.name + "." + op.name;
        if (!is_identifier(op.name)) add(ViolationCode::BadName, where, "operation name is not an identifier");
        if (!ops.insert(op.name).second) add(ViolationCode::DupName, where, "duplicate operation '" + op.name + "'");
        check_concept(op.concept_id, where);
        check_type(op.returns, where + "->");
        std::set<std::string> params;
        for (const auto& p : op.params) {
          std::string pwhere = where + "." + p.name;
          if (!is_identifier(p.name)) add(ViolationCode::BadName, pwhere, "parameter name is not an identifier");
          if (!params.insert(p.name).second) add(ViolationCode::DupName, pwhere, "duplicate parameter '" + p.name + "'");
          if (p.concept_id) check_concept(*p.concept_id, pwhere);
          check_type(p.ty, pwhere);
          if (p.unit && (p.ty.is_list() || !is_numeric(p.ty.base))) {
            add(ViolationCode::UnitType, pwhere, "@unit on non-numeric type '" + p.ty.to_string() + "'");
          }
          if (p.unit && !is_identifier(*p.unit)) add(ViolationCode::BadName, pwhere, "unit '" + *p.unit + "' is not an identifier");
          if (p.default_value && !literal_fits(*p.default_value, p.ty)) {
            add(ViolationCode::DefaultType, pwhere,
                "default " + format_literal(*p.default_value) + " does not have type " + p.ty.to_string());
          }
        }
      }
    }
  }

  std::vector<Violation> out_;
};

}  // namespace

std::vector<Violation> validate(const ComponentSpec& spec)
{
  return Checker{}.run(spec);
}

}  // namespace adapterforge::spec
