#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "adapterforge/adapter.hpp"
#include "adapterforge/analyser.hpp"
#include "adapterforge/conversion.hpp"
#include "adapterforge/spec.hpp"

namespace adapterforge::pool {

/// 64 lowercase hex characters: SHA-256 of an artifact's canonical bytes.
using Fingerprint = std::string;

enum class EntryKind { Component, Adapter };

std::string_view to_string(EntryKind kind);

struct IndexEntry {
  EntryKind kind = EntryKind::Component;
  std::string name;
  spec::Version version;
  std::vector<spec::ConceptId> provided_concepts;  // sorted, unique
  std::string path;                                // relative to the pool root
  std::string stored_at;                           // UTC, ISO 8601

  bool operator==(const IndexEntry&) const = default;
};

struct PoolIndex {
  std::map<Fingerprint, IndexEntry> entries;
  bool operator==(const PoolIndex&) const = default;
};

using Artifact = std::variant<spec::ComponentSpec, adapter::AdapterSpec>;

/// Canonical bytes of an artifact: spec text for components, the descriptor for adapters.
std::string canonical_bytes(const Artifact& artifact);
Fingerprint fingerprint_of(const Artifact& artifact);
/// Parses either document form; JSON objects are adapter descriptors. Throws E_INVALID_SPEC.
Artifact parse_artifact(std::string_view text);
/// The artifact as a component (adapters via AdapterSpec::as_component).
spec::ComponentSpec component_view(const Artifact& artifact);

struct PoolQuery {
  analyser::Demand demand;
  std::optional<spec::VersionConstraint> constraint;
};

struct QueryHit {
  Fingerprint fingerprint;
  Rational score;
  EntryKind kind = EntryKind::Component;
  std::string name;
  std::string interface_name;  // provided interface of the best operation
  std::string operation;       // best provided operation

  bool operator==(const QueryHit&) const = default;
};

enum class FindingKind { HashMismatch, Dangling };

std::string_view to_string(FindingKind kind);

struct Finding {
  FindingKind kind;
  Fingerprint fingerprint;
  std::string path;
  std::string message;

  bool operator==(const Finding&) const = default;
};

struct PoolOptions {
  std::chrono::milliseconds lock_timeout{5000};
  /// Timestamp source for `stored_at`.
  std::function<std::string()> clock;
};

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_now();

/// Content-addressed store rooted at a directory holding
/// `index`, `index.lock`, `components/` and `adapters/`.
class Pool {
 public:
  explicit Pool(std::filesystem::path root, PoolOptions options = {});

  const std::filesystem::path& root() const { return root_; }

  /// Whether the root directory holds an index.
  bool initialized() const;
  /// Creates the directory layout and an empty index if absent. Throws E_IO.
  void init() const;

  /// Stores the artifact and indexes it; idempotent by fingerprint.
  /// Initializes the pool when needed. Throws E_IO, E_INVALID_SPEC, E_LOCK.
  Fingerprint add(const Artifact& artifact) const;
  Fingerprint add_text(std::string_view document) const;

  /// Index as stored; an existing root without an index reads as empty.
  /// Throws E_IO when the root is missing, E_CORRUPT when the index is malformed.
  PoolIndex index() const;

  /// Ranked candidates: score descending, then fingerprint ascending. Throws E_IO, E_CORRUPT.
  std::vector<QueryHit> query(const PoolQuery& query, const analyser::ConversionTable& conv,
                              const analyser::MatchPolicy& policy = {}) const;

  /// Throws E_NO_ENTRY, E_CORRUPT.
  Artifact get(const Fingerprint& fp) const;

  /// Re-hashes every indexed file. Empty means healthy. Throws E_IO.
  std::vector<Finding> verify() const;

 private:
  std::filesystem::path root_;
  PoolOptions options_;
};

/// Scores one provided operation against a demand the same way `Pool::query` does.
std::optional<Rational> score_against(const analyser::Demand& demand, const spec::OperationSig& provided,
                                      const analyser::ConversionTable& conv, const analyser::MatchPolicy& policy);

}  // namespace adapterforge::pool
