#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace adapterforge::spec {

/// Source position of a declaration. Never participates in structural equality:
/// a spec reparsed from its canonical text compares equal to the original.
struct SourceLoc {
  std::string file;
  std::size_t line = 0;
  std::size_t column = 0;

  friend bool operator==(const SourceLoc&, const SourceLoc&) { return true; }
};

struct Version {
  std::uint64_t major = 0;
  std::uint64_t minor = 0;
  std::uint64_t patch = 0;

  /// Strict "MAJOR.MINOR.PATCH"; nullopt on anything else.
  static std::optional<Version> parse(std::string_view text);
  std::string to_string() const;

  auto operator<=>(const Version&) const = default;
};

struct VersionConstraint {
  enum class Kind { Any, Exact, AtLeast };
  Kind kind = Kind::Any;
  Version version;

  /// "*", "=x.y.z" or ">=x.y.z".
  static std::optional<VersionConstraint> parse(std::string_view text);
  std::string to_string() const;
  bool admits(const Version& v) const;

  bool operator==(const VersionConstraint&) const = default;
};

enum class Prim { I32, I64, F64, Bool, String, Bytes, Unit };

std::string_view to_string(Prim p);
std::optional<Prim> prim_from_string(std::string_view name);
bool is_numeric(Prim p);

/// A primitive wrapped in `list_depth` list<> layers.
struct SemType {
  Prim base = Prim::Unit;
  int list_depth = 0;

  bool is_list() const { return list_depth > 0; }
  SemType element() const { return {base, list_depth - 1}; }
  std::string to_string() const;

  auto operator<=>(const SemType&) const = default;
};

/// Dotted lowercase concept path such as data.sorting.sort.
class ConceptId {
 public:
  ConceptId() = default;

  /// Checks segment syntax only ([a-z][a-z0-9_]*); depth limits are a validation concern.
  static std::optional<ConceptId> parse(std::string_view text);
  static bool valid_segment(std::string_view segment);
  /// Splits on '.' without segment checks; for decoding paths this tool produced itself
  /// (derived parameter concepts may carry identifier-cased segments).
  static ConceptId from_path(std::string_view text);

  const std::vector<std::string>& segments() const { return segments_; }
  std::size_t depth() const { return segments_.size(); }
  bool empty() const { return segments_.empty(); }
  std::string to_string() const;

  /// True iff this is a strict prefix of `other`.
  bool is_ancestor_of(const ConceptId& other) const;
  /// Hop count between related concepts (0 when equal); nullopt when unrelated.
  std::optional<int> distance(const ConceptId& other) const;
  ConceptId child(std::string_view segment) const;

  auto operator<=>(const ConceptId&) const = default;

 private:
  std::vector<std::string> segments_;
};

struct Bytes {
  std::vector<std::uint8_t> data;
  auto operator<=>(const Bytes&) const = default;
};

/// Runtime literal; also the value model for default fills and adapter execution.
/// Integers of either width share `std::int64_t`; the SemType decides the range.
struct Value {
  using List = std::vector<Value>;
  std::variant<std::monostate, bool, std::int64_t, double, std::string, Bytes, List> data;

  Value() = default;
  Value(bool b) : data(b) {}
  Value(std::int64_t i) : data(i) {}
  Value(int i) : data(static_cast<std::int64_t>(i)) {}
  Value(double d) : data(d) {}
  Value(std::string s) : data(std::move(s)) {}
  Value(const char* s) : data(std::string(s)) {}
  Value(Bytes b) : data(std::move(b)) {}
  Value(List l) : data(std::move(l)) {}

  bool is_unit() const { return std::holds_alternative<std::monostate>(data); }
  bool operator==(const Value&) const = default;
};

/// Whether a literal value inhabits `ty` (integers must fit the width; ints never inhabit f64).
bool literal_fits(const Value& v, const SemType& ty);

struct MetaEntry {
  std::string key;
  std::string value;
  bool operator==(const MetaEntry&) const = default;
};

struct ParamSig {
  std::string name;
  SemType ty;
  std::optional<ConceptId> concept_id;
  std::optional<std::string> unit;
  std::optional<Value> default_value;
  SourceLoc loc;

  bool operator==(const ParamSig&) const = default;
};

struct OperationSig {
  std::string name;
  std::vector<ParamSig> params;
  SemType returns;
  ConceptId concept_id;
  SourceLoc loc;

  /// The explicit parameter concept, or `<operation concept>.arg.<name>`.
  ConceptId param_concept(std::size_t index) const;

  bool operator==(const OperationSig&) const = default;
};

enum class Direction { Provided, Required };

std::string_view to_string(Direction d);

struct InterfaceSpec {
  std::string name;
  Direction direction = Direction::Provided;
  std::vector<OperationSig> operations;
  SourceLoc loc;

  const OperationSig* find_operation(std::string_view op_name) const;
  bool operator==(const InterfaceSpec&) const = default;
};

struct ComponentSpec {
  std::string name;
  Version version;
  std::vector<InterfaceSpec> provided;
  std::vector<InterfaceSpec> required;
  std::vector<MetaEntry> meta;
  SourceLoc loc;

  const InterfaceSpec* find_interface(Direction d, std::string_view iface) const;
  /// Sorts interfaces by name within each direction and meta entries (stably) by key.
  void normalize();

  bool operator==(const ComponentSpec&) const = default;
};

struct ComponentUse {
  std::string component;
  VersionConstraint constraint;
  SourceLoc loc;
  bool operator==(const ComponentUse&) const = default;
};

struct InterfaceRef {
  std::string component;
  std::string interface_name;
  auto operator<=>(const InterfaceRef&) const = default;
};

struct Connection {
  InterfaceRef consumer;  // names a required interface
  InterfaceRef provider;  // names a provided interface
  SourceLoc loc;

  /// "A.requires.X -> B.provides.Y"
  std::string to_string() const;
  bool operator==(const Connection&) const = default;
};

struct ProjectSpec {
  std::string name;
  std::vector<ComponentUse> uses;
  std::vector<Connection> connections;
  std::vector<ConceptId> demands;
  SourceLoc loc;

  const ComponentUse* find_use(std::string_view component) const;
  bool operator==(const ProjectSpec&) const = default;
};

bool is_identifier(std::string_view text);

}  // namespace adapterforge::spec
