#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adapterforge/rational.hpp"
#include "adapterforge/spec.hpp"

namespace adapterforge::analyser {

/// A SemType together with its optional unit tag: the unit of representation.
struct TypeKey {
  spec::SemType type;
  std::optional<std::string> unit;

  std::string to_string() const;  // "f64@ms", "list<i32>"
  auto operator<=>(const TypeKey&) const = default;
};

enum class RuleKind { Widen, NarrowChecked, UnitScale, Parse, Format };

std::string_view to_string(RuleKind kind);
std::optional<RuleKind> rule_from_string(std::string_view name);

struct ConversionRule {
  TypeKey from;
  TypeKey to;
  RuleKind kind = RuleKind::Widen;
  Rational factor{1};  // UNIT_SCALE only; 1 otherwise

  bool runtime_checked() const { return kind == RuleKind::NarrowChecked || kind == RuleKind::Parse; }
  std::string to_string() const;
  bool operator==(const ConversionRule&) const = default;
};

/// Directional representation-bridging rules. No identity entries, no implied inverses.
class ConversionTable {
 public:
  /// Throws E_CONFIG when the rule is inadmissible (see docs/conversions.md) or duplicated.
  void add(ConversionRule rule);
  const ConversionRule* find(const TypeKey& from, const TypeKey& to) const;
  std::vector<ConversionRule> entries() const;
  std::size_t size() const { return rules_.size(); }

  /// Seven whitespace-separated columns per line:
  /// from-type from-unit to-type to-unit rule factor-numerator factor-denominator
  /// ('-' for no unit; '#' starts a comment).
  static ConversionTable parse(std::string_view text, const std::string& file = {});
  static ConversionTable load(const std::string& path);
  /// The rules shipped in data/conversions.txt.
  static ConversionTable builtin();
  std::string to_text() const;

 private:
  std::map<std::pair<TypeKey, TypeKey>, ConversionRule> rules_;
};

/// Executes one rule on a runtime value. Throws E_NARROW for checked narrowing or inexact
/// integer scaling, E_CONVERT for unparseable text or a value of the wrong shape.
spec::Value apply_conversion(const ConversionRule& rule, const spec::Value& value);

}  // namespace adapterforge::analyser
