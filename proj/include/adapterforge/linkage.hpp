#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adapterforge/adapter.hpp"
#include "adapterforge/analyser.hpp"
#include "adapterforge/conversion.hpp"
#include "adapterforge/pool.hpp"
#include "adapterforge/spec.hpp"

namespace adapterforge::linkage {

enum class Step { Read, Compare, Query, Return, Invite, Generate, Integrate, Store, Verify };

std::string_view to_string(Step step);
std::optional<Step> step_from_string(std::string_view name);

struct StepRecord {
  Step step = Step::Read;
  std::string at;      // timestamp from the workflow clock
  std::string detail;  // connection text or demanded concept, empty for global steps

  bool operator==(const StepRecord&) const = default;
};

enum class Outcome { AlreadyExact, Adapted, Unresolvable };

std::string_view to_string(Outcome outcome);

enum class Source { PoolHit, Generated };

std::string_view to_string(Source source);

/// One healing action: an adapter placed on a connection, a pool component rewired into a
/// connection, or a pool component added for a project-level demand.
struct Integration {
  std::optional<spec::Connection> connection;  // the original connection; empty for demands
  std::optional<spec::ConceptId> demand;       // project-level demand served
  Source source = Source::Generated;
  pool::Fingerprint fingerprint;
  std::string artifact;  // name of the adapter or component

  bool operator==(const Integration&) const = default;
};

struct WorkflowResult {
  std::string project;
  Outcome outcome = Outcome::AlreadyExact;
  std::vector<Integration> integrations;
  std::vector<analyser::Demand> unresolved;
  analyser::MatchReport initial_report;
  analyser::MatchReport final_report;
  std::vector<StepRecord> steps;
  std::vector<std::string> diagnostics;

  bool operator==(const WorkflowResult&) const = default;
};

struct IntegratedProject {
  spec::ProjectSpec original;
  spec::ProjectSpec project;
  std::vector<adapter::AdapterSpec> adapters;
  std::vector<spec::ComponentSpec> retrieved;  // pool components added to the project

  bool operator==(const IntegratedProject&) const = default;
};

/// Replaces `connection` (consumer → provider) with consumer → adapter and
/// adapter → provider at the same position, and adds the adapter to `uses`.
/// Throws E_INTERFACE_MISMATCH when the adapter does not bridge this connection.
IntegratedProject integrate(const spec::ProjectSpec& project, const spec::Connection& connection,
                            const adapter::AdapterSpec& adapter);

struct WorkflowOptions {
  analyser::MatchPolicy policy;
  /// Timestamp source for the step trace and pool entries; defaults to pool::utc_now.
  std::function<std::string()> clock;
  /// Create the pool directory when it does not exist yet.
  bool auto_init_pool = true;
};

struct WorkflowOutput {
  WorkflowResult result;
  IntegratedProject integrated;
  /// Every component the integrated project resolves against (inputs, adapters, retrieved).
  std::vector<spec::ComponentSpec> components;
};

/// Runs read, compare, pool query/return, generation, integration, store and verify
/// over in-memory specs. Throws E_UNRESOLVED, E_IO, E_LOCK, E_CORRUPT.
WorkflowOutput run_workflow(const spec::ProjectSpec& project, std::vector<spec::ComponentSpec> components,
                            const pool::Pool& pool, const analyser::ConversionTable& conv,
                            const WorkflowOptions& options = {});

/// Every `.cdl` file directly inside the given directories, sorted by path, parsed and
/// validated. Throws ParseError, E_IO, E_INVALID_SPEC.
std::vector<spec::ComponentSpec> load_components(const std::vector<std::filesystem::path>& dirs);

spec::ProjectSpec load_project(const std::filesystem::path& file);

/// File-based entry point: parses the project and every `.cdl` in `spec_dirs`, then runs the
/// in-memory workflow. Throws ParseError for malformed files.
WorkflowOutput run_workflow(const std::filesystem::path& project_file,
                            const std::vector<std::filesystem::path>& spec_dirs,
                            const std::filesystem::path& pool_root, const analyser::ConversionTable& conv,
                            const WorkflowOptions& options = {});

enum class Format { Human, Structured };

/// Human: one line per step, connection verdict, integration and demand. Structured:
/// canonical JSON holding the full result.
std::string report(const WorkflowResult& result, Format format);
/// Inverse of the structured report. Throws E_INVALID_SPEC.
WorkflowResult parse_report(std::string_view text);

/// Report for a compare-only run.
std::string check_report(const analyser::MatchReport& report, Format format);
analyser::MatchReport parse_check_report(std::string_view text);

/// One-line rendering of a mismatch payload.
std::string describe(const analyser::Mismatch& mismatch);

/// Files written for an `adapt` run, relative names.
struct EmittedFiles {
  std::vector<std::filesystem::path> written;
};

/// Writes `<stem>.adapted.pdl` (unless the outcome is ALREADY_EXACT), each adapter as
/// `.cdl`, `.adapter` and `.stub`, each retrieved component as `.cdl`, and the report
/// `<stem>.report.txt` or `<stem>.report.json`. Throws E_IO, E_TEMPLATE.
EmittedFiles emit(const WorkflowOutput& output, const std::filesystem::path& dir, const std::string& stem,
                  Format format, std::string_view stub_template);

}  // namespace adapterforge::linkage
