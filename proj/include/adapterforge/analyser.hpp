#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "adapterforge/aslt.hpp"
#include "adapterforge/conversion.hpp"
#include "adapterforge/rational.hpp"
#include "adapterforge/spec.hpp"

namespace adapterforge::analyser {

/// Penalty table and acceptance threshold for operation matching.
struct MatchPolicy {
  Rational rename{0};
  Rational param_permutation{5, 100};
  Rational type_conversion{10, 100};  // per converted slot
  Rational default_fill{15, 100};     // per filled slot
  Rational concept_hop{10, 100};      // per hop
  Rational threshold{1, 2};

  /// `key = decimal` lines; keys: threshold, penalty.rename, penalty.param_permutation,
  /// penalty.type_conversion, penalty.default_fill, penalty.concept_hop. Throws E_CONFIG.
  static MatchPolicy parse(std::string_view text);
  static MatchPolicy load(const std::string& path);

  bool operator==(const MatchPolicy&) const = default;
};

enum class MismatchKind { Rename, ParamPermutation, TypeConversion, DefaultFill, MissingOperation, ConceptDistance };

std::string_view to_string(MismatchKind kind);

struct RenameDetail {
  std::string required_name;
  std::string provided_name;
  bool operator==(const RenameDetail&) const = default;
};

/// Consumer parameter index for each provider slot that is not default-filled,
/// in provider slot order. Never the identity.
struct PermutationDetail {
  std::vector<std::size_t> order;
  bool operator==(const PermutationDetail&) const = default;
};

/// A converted provider slot (`slot` empty means the return value).
struct ConversionDetail {
  std::optional<std::size_t> slot;
  std::optional<std::size_t> consumer_index;
  ConversionRule rule;
  bool operator==(const ConversionDetail&) const = default;
};

struct FillDetail {
  std::size_t slot = 0;
  spec::Value value;
  bool operator==(const FillDetail&) const = default;
};

struct MissingDetail {
  spec::ConceptId concept_id;
  bool operator==(const MissingDetail&) const = default;
};

struct DistanceDetail {
  int hops = 1;
  bool operator==(const DistanceDetail&) const = default;
};

struct Mismatch {
  std::string operation;  // required operation name
  std::variant<RenameDetail, PermutationDetail, ConversionDetail, FillDetail, MissingDetail, DistanceDetail> detail;

  MismatchKind kind() const;
  bool operator==(const Mismatch&) const = default;
};

Rational penalty_of(const Mismatch& m, const MatchPolicy& policy);
/// 1 − Σ penalties.
Rational score_of(std::span<const Mismatch> mismatches, const MatchPolicy& policy);

struct OperationMatch {
  std::string required_op;
  std::string provided_op;
  std::vector<Mismatch> mismatches;
  Rational score{1};

  bool exact() const { return mismatches.empty() && score == Rational(1); }
  bool operator==(const OperationMatch&) const = default;
};

/// Concept-first matching of a required operation against a provided one. Parameters are
/// aligned by parameter concept only. nullopt is NoMatch.
std::optional<OperationMatch> match_operation(const spec::OperationSig& required, const spec::OperationSig& provided,
                                              const ConversionTable& conv, const MatchPolicy& policy = {});

enum class Verdict { Exact, Adaptable, Incompatible };

std::string_view to_string(Verdict v);

struct ConnectionReport {
  spec::Connection connection;
  Verdict verdict = Verdict::Exact;
  Rational score{1};
  std::string reason;                  // set for Incompatible
  std::vector<OperationMatch> matched;  // one per matched required op, in declaration order
  std::vector<Mismatch> mismatches;     // all mismatches, including MISSING_OPERATION

  bool operator==(const ConnectionReport&) const = default;
};

/// Parameter slot of a demanded signature; carries no name.
struct ShapeParam {
  spec::ConceptId concept_id;
  spec::SemType ty;
  std::optional<std::string> unit;
  bool operator==(const ShapeParam&) const = default;
};

struct Shape {
  std::vector<ShapeParam> params;
  spec::SemType returns;
  bool operator==(const Shape&) const = default;
};

struct Demand {
  spec::ConceptId concept_id;     // consumer-side concept
  std::optional<Shape> shape;     // absent for project-level demands
  std::string operation;          // required operation name, empty for project-level demands
  std::string origin;             // connection text, or "project"

  bool operator==(const Demand&) const = default;
};

Demand demand_for(const spec::OperationSig& required, const spec::Connection& origin);
/// The signature a shaped demand stands for (parameters named p0, p1, ... with explicit concepts).
spec::OperationSig demand_signature(const Demand& demand);
/// Score for a concept-only demand against a provided concept: 1 − hops × concept_hop,
/// nullopt when unrelated or below threshold.
std::optional<Rational> concept_only_score(const spec::ConceptId& demanded, const spec::ConceptId& provided,
                                           const MatchPolicy& policy);

struct MatchReport {
  std::vector<ConnectionReport> connections;
  std::vector<Demand> demands;

  bool all_exact() const;
  bool operator==(const MatchReport&) const = default;
};

/// Compares the used components against the project's connections and demands.
/// Throws E_UNRESOLVED when a connection names an unknown component or interface.
MatchReport analyse(const aslt::Aslt& tree, const spec::ProjectSpec& project,
                    std::span<const spec::ComponentSpec> components, const ConversionTable& conv,
                    const MatchPolicy& policy = {});

/// analyse re-run: true iff every connection is EXACT.
bool verify(const aslt::Aslt& tree, const spec::ProjectSpec& project, std::span<const spec::ComponentSpec> components,
            const ConversionTable& conv, const MatchPolicy& policy = {});

}  // namespace adapterforge::analyser
