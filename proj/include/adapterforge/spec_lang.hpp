#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "adapterforge/error.hpp"
#include "adapterforge/spec.hpp"

namespace adapterforge::spec {

/// Parses a `.cdl` component spec. Throws ParseError with one of
/// E_SYNTAX, E_DUP_NAME, E_NO_CONCEPT, E_BAD_VERSION.
/// The result is normalized (see ComponentSpec::normalize).
ComponentSpec parse_component(std::string_view text, const std::string& file = {});

/// Parses a `.pdl` project spec. Throws ParseError with one of
/// E_SYNTAX, E_DUP_USE, E_BAD_CONSTRAINT. Repeated demands are collapsed.
ProjectSpec parse_project(std::string_view text, const std::string& file = {});

/// Parses a single `[@concept(..)] op name(..) -> T` declaration.
OperationSig parse_operation(std::string_view text, const std::string& file = {});

Value parse_literal(std::string_view text);
SemType parse_type(std::string_view text);

/// Canonical text: 2-space indentation, interfaces by (direction, name),
/// operations in declaration order, meta by key. Always newline-terminated.
std::string serialize(const ComponentSpec& spec);
std::string serialize(const ProjectSpec& spec);
std::string serialize(const OperationSig& op);

std::string format_literal(const Value& v);

enum class ViolationCode {
  ConceptDepth,
  ConceptSyntax,
  ListDepth,
  DefaultType,
  UnitType,
  DupName,
  BadName,
};

std::string_view to_string(ViolationCode code);

struct Violation {
  ViolationCode code;
  std::string where;
  std::string message;
  bool operator==(const Violation&) const = default;
};

inline constexpr std::size_t kMaxConceptDepth = 8;
inline constexpr int kMaxListDepth = 3;

/// Semantic checks beyond syntax. Empty result means valid.
std::vector<Violation> validate(const ComponentSpec& spec);

}  // namespace adapterforge::spec
