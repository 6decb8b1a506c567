#include "adapterforge/linkage.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "adapterforge/aslt.hpp"
#include "adapterforge/codec.hpp"
#include "adapterforge/error.hpp"
#include "adapterforge/spec_lang.hpp"

namespace adapterforge::linkage {

namespace fs = std::filesystem;
using analyser::ConnectionReport;
using analyser::Demand;
using analyser::MatchReport;
using analyser::Verdict;
using codec::json;

namespace {

constexpr std::string_view kReportFormat = "adapterforge-report/1";
constexpr std::string_view kCheckFormat = "adapterforge-check/1";

constexpr std::pair<Step, std::string_view> kStepNames[] = {
    {Step::Read, "READ"},         {Step::Compare, "COMPARE"},     {Step::Query, "QUERY"},
    {Step::Return, "RETURN"},     {Step::Invite, "INVITE"},       {Step::Generate, "GENERATE"},
    {Step::Integrate, "INTEGRATE"}, {Step::Store, "STORE"},       {Step::Verify, "VERIFY"},
};

std::string read_file(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view bytes)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "error writing '" + path.string() + "'");
}

spec::VersionConstraint exactly(const spec::Version& v)
{
  return {spec::VersionConstraint::Kind::Exact, v};
}

/// Replaces any same-name, same-version entry so resolution sees exactly one.
void put_component(std::vector<spec::ComponentSpec>& components, spec::ComponentSpec c)
{
  std::erase_if(components, [&](const spec::ComponentSpec& x) { return x.name == c.name && x.version == c.version; });
  components.push_back(std::move(c));
}

void add_use(spec::ProjectSpec& project, const std::string& name, const spec::Version& version)
{
  if (!project.find_use(name)) project.uses.push_back({name, exactly(version), {}});
}

MatchReport analyse_project(const spec::ProjectSpec& project, const std::vector<spec::ComponentSpec>& components,
                            const analyser::ConversionTable& conv, const analyser::MatchPolicy& policy)
{
  auto tree = aslt::build_aslt(project, components);
  return analyser::analyse(tree, project, components, conv, policy);
}

const spec::ComponentSpec& resolved(const spec::ProjectSpec& project, const std::vector<spec::ComponentSpec>& components,
                                    const std::string& name)
{
  for (const auto* c : aslt::resolve_uses(project, components)) {
    if (c->name == name) return *c;
  }
  throw Error(ErrorCode::Unresolved, "component '" + name + "' is not used by project '" + project.name + "'");
}

struct AdapterHit {
  pool::Fingerprint fingerprint;
  adapter::AdapterSpec adapter;
  Rational score;
};

/// An adapter already in the pool that bridges exactly this connection.
std::optional<AdapterHit> find_adapter(const pool::Pool& pool, const spec::Connection& conn,
                                       const spec::InterfaceSpec& required, const spec::ComponentSpec& provider,
                                       const analyser::ConversionTable& conv, const analyser::MatchPolicy& policy)
{
  const auto* provided = provider.find_interface(spec::Direction::Provided, conn.provider.interface_name);
  if (!provided || required.operations.empty()) return std::nullopt;
  std::map<pool::Fingerprint, std::vector<Rational>> per_fp;
  for (const auto& op : required.operations) {
    for (const auto& hit : pool.query({analyser::demand_for(op, conn), std::nullopt}, conv, policy)) {
      if (hit.kind == pool::EntryKind::Adapter) per_fp[hit.fingerprint].push_back(hit.score);
    }
  }
  std::optional<AdapterHit> best;
  for (const auto& [fp, scores] : per_fp) {
    if (scores.size() != required.operations.size()) continue;
    auto artifact = pool.get(fp);
    const auto& a = std::get<adapter::AdapterSpec>(artifact);
    if (a.consumer_component != conn.consumer.component || !(a.implements == required) ||
        a.provider_component != provider.name || a.provider_version != provider.version || !(a.delegates_to == *provided)) {
      continue;
    }
    Rational total{0};
    for (const auto& s : scores) total += s;
    Rational score = total / Rational(static_cast<std::int64_t>(scores.size()));
    if (score < policy.threshold) continue;
    if (!best || score > best->score) best = AdapterHit{fp, a, score};
  }
  return best;
}

struct Replacement {
  pool::Fingerprint fingerprint;
  spec::ComponentSpec component;
  std::string interface_name;
  ConnectionReport report;
};

/// A pool component whose provided interface makes the connection EXACT or ADAPTABLE.
std::optional<Replacement> find_replacement(const pool::Pool& pool, const spec::ProjectSpec& project,
                                            const spec::Connection& conn, const spec::ComponentSpec& consumer,
                                            const spec::InterfaceSpec& required,
                                            const analyser::ConversionTable& conv, const analyser::MatchPolicy& policy)
{
  std::vector<pool::Fingerprint> candidates;
  for (const auto& op : required.operations) {
    for (const auto& hit : pool.query({analyser::demand_for(op, conn), std::nullopt}, conv, policy)) {
      if (hit.kind != pool::EntryKind::Component) continue;
      if (std::find(candidates.begin(), candidates.end(), hit.fingerprint) == candidates.end()) {
        candidates.push_back(hit.fingerprint);
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());
  std::optional<Replacement> best;
  for (const auto& fp : candidates) {
    auto candidate = std::get<spec::ComponentSpec>(pool.get(fp));
    if (candidate.name == consumer.name || project.find_use(candidate.name)) continue;
    for (const auto& iface : candidate.provided) {
      spec::ProjectSpec trial;
      trial.name = project.name;
      trial.uses = {{consumer.name, exactly(consumer.version), {}}, {candidate.name, exactly(candidate.version), {}}};
      spec::Connection rewired{conn.consumer, {candidate.name, iface.name}, {}};
      trial.connections = {rewired};
      std::vector<spec::ComponentSpec> comps = {consumer, candidate};
      auto rep = analyse_project(trial, comps, conv, policy).connections.front();
      if (rep.verdict == Verdict::Incompatible) continue;
      bool better = !best || rep.score > best->report.score ||
                    (rep.score == best->report.score && rep.verdict == Verdict::Exact &&
                     best->report.verdict != Verdict::Exact);
      if (better) best = Replacement{fp, candidate, iface.name, rep};
    }
  }
  return best;
}

class Workflow {
 public:
  Workflow(const spec::ProjectSpec& project, std::vector<spec::ComponentSpec> components, const pool::Pool& pool,
           const analyser::ConversionTable& conv, const WorkflowOptions& options)
      : pool_(pool), conv_(conv), options_(options)
  {
    if (!options_.clock) options_.clock = pool::utc_now;
    out_.integrated.original = project;
    out_.integrated.project = project;
    out_.components = std::move(components);
    out_.result.project = project.name;
  }

  WorkflowOutput run()
  {
    auto& result = out_.result;
    const auto& policy = options_.policy;
    record(Step::Read);
    record(Step::Compare);
    result.initial_report = analyse_project(out_.integrated.original, out_.components, conv_, policy);
    const auto& initial = result.initial_report;
    if (initial.all_exact() && initial.demands.empty()) {
      record(Step::Verify);
      result.final_report = initial;
      result.outcome = Outcome::AlreadyExact;
      return std::move(out_);
    }

    if (!options_.auto_init_pool && !pool_.initialized()) {
      throw Error(ErrorCode::Io, "pool at '" + pool_.root().string() + "' is not initialized");
    }
    if (options_.auto_init_pool) pool_.init();

    for (const auto& rep : initial.connections) {
      if (rep.verdict == Verdict::Adaptable) {
        heal_adaptable(rep.connection, &rep);
      } else if (rep.verdict == Verdict::Incompatible) {
        heal_incompatible(rep);
      }
    }
    for (const auto& d : initial.demands) {
      if (d.origin == "project") heal_demand(d);
    }

    record(Step::Verify);
    result.final_report = analyse_project(out_.integrated.project, out_.components, conv_, policy);
    if (!result.unresolved.empty()) {
      result.outcome = Outcome::Unresolvable;
    } else if (!result.final_report.all_exact() || !result.final_report.demands.empty()) {
      result.outcome = Outcome::Unresolvable;
      for (const auto& c : result.final_report.connections) {
        if (c.verdict != Verdict::Exact) {
          result.diagnostics.push_back("verification failed: " + c.connection.to_string() + " is " +
                                       std::string(analyser::to_string(c.verdict)));
        }
      }
      for (const auto& d : result.final_report.demands) {
        result.diagnostics.push_back("verification failed: demand " + d.concept_id.to_string() + " is unsatisfied");
        result.unresolved.push_back(d);
      }
    } else {
      result.outcome = Outcome::Adapted;
    }
    return std::move(out_);
  }

 private:
  void record(Step step, std::string detail = {})
  {
    out_.result.steps.push_back({step, options_.clock(), std::move(detail)});
  }

  /// Places an adapter on `conn`, from the pool when one fits, generated otherwise.
  void heal_adaptable(const spec::Connection& conn, const ConnectionReport* rep)
  {
    auto& project = out_.integrated.project;
    const auto& policy = options_.policy;
    const std::string where = conn.to_string();
    auto consumer = resolved(project, out_.components, conn.consumer.component);
    auto provider = resolved(project, out_.components, conn.provider.component);
    const auto* required = consumer.find_interface(spec::Direction::Required, conn.consumer.interface_name);
    if (!required) throw Error(ErrorCode::Unresolved, "connection '" + where + "' names no required interface");

    record(Step::Query, where);
    Integration integration;
    integration.connection = conn;
    adapter::AdapterSpec adapter;
    if (auto hit = find_adapter(pool_, conn, *required, provider, conv_, policy)) {
      record(Step::Return, where);
      adapter = std::move(hit->adapter);
      integration.source = Source::PoolHit;
      integration.fingerprint = hit->fingerprint;
    } else {
      record(Step::Invite, where);
      ConnectionReport fresh;
      if (rep) {
        fresh = *rep;
      } else {
        spec::ProjectSpec single = project;
        single.connections = {conn};
        single.demands.clear();
        fresh = analyse_project(single, out_.components, conv_, policy).connections.front();
      }
      record(Step::Generate, where);
      adapter = adapter::generate_adapter(fresh, consumer, provider, out_.integrated.original.name);
      integration.source = Source::Generated;
    }
    integration.artifact = adapter.name;

    record(Step::Integrate, where);
    auto integrated = integrate(project, conn, adapter);
    project = std::move(integrated.project);
    put_component(out_.components, adapter.as_component());
    if (std::none_of(out_.integrated.adapters.begin(), out_.integrated.adapters.end(),
                     [&](const adapter::AdapterSpec& a) { return a.name == adapter.name; })) {
      out_.integrated.adapters.push_back(adapter);
    }
    if (integration.source == Source::Generated) {
      record(Step::Store, where);
      integration.fingerprint = pool_.add(adapter);
    }
    out_.result.integrations.push_back(std::move(integration));
  }

  void heal_incompatible(const ConnectionReport& rep)
  {
    auto& project = out_.integrated.project;
    const auto& conn = rep.connection;
    const std::string where = conn.to_string();
    auto consumer = resolved(project, out_.components, conn.consumer.component);
    const auto* required = consumer.find_interface(spec::Direction::Required, conn.consumer.interface_name);
    if (!required) throw Error(ErrorCode::Unresolved, "connection '" + where + "' names no required interface");

    record(Step::Query, where);
    auto replacement = find_replacement(pool_, project, conn, consumer, *required, conv_, options_.policy);
    if (!replacement) {
      bool any = false;
      for (const auto& d : out_.result.initial_report.demands) {
        if (d.origin == where) {
          out_.result.unresolved.push_back(d);
          any = true;
        }
      }
      if (!any) {
        for (const auto& op : required->operations) out_.result.unresolved.push_back(analyser::demand_for(op, conn));
      }
      out_.result.diagnostics.push_back("no pool component or adapter heals " + where + ": " + rep.reason);
      return;
    }

    record(Step::Return, where);
    const auto& comp = replacement->component;
    spec::Connection rewired{conn.consumer, {comp.name, replacement->interface_name}, conn.loc};
    record(Step::Integrate, where);
    for (auto& c : project.connections) {
      if (c.consumer == conn.consumer && c.provider == conn.provider) c = rewired;
    }
    add_use(project, comp.name, comp.version);
    put_component(out_.components, comp);
    out_.integrated.retrieved.push_back(comp);
    out_.result.integrations.push_back({conn, std::nullopt, Source::PoolHit, replacement->fingerprint, comp.name});
    if (replacement->report.verdict == Verdict::Adaptable) heal_adaptable(rewired, nullptr);
  }

  void heal_demand(const Demand& demand)
  {
    auto& project = out_.integrated.project;
    const std::string where = demand.concept_id.to_string();
    record(Step::Query, where);
    std::optional<pool::QueryHit> best;
    for (const auto& hit : pool_.query({demand, std::nullopt}, conv_, options_.policy)) {
      if (hit.kind != pool::EntryKind::Component || project.find_use(hit.name)) continue;
      best = hit;
      break;
    }
    if (!best) {
      out_.result.unresolved.push_back(demand);
      out_.result.diagnostics.push_back("no pool component provides " + where);
      return;
    }
    record(Step::Return, where);
    auto comp = std::get<spec::ComponentSpec>(pool_.get(best->fingerprint));
    record(Step::Integrate, where);
    add_use(project, comp.name, comp.version);
    put_component(out_.components, comp);
    out_.integrated.retrieved.push_back(comp);
    out_.result.integrations.push_back({std::nullopt, demand.concept_id, Source::PoolHit, best->fingerprint, comp.name});
  }

  const pool::Pool& pool_;
  const analyser::ConversionTable& conv_;
  WorkflowOptions options_;
  WorkflowOutput out_;
};

std::string connection_line(const ConnectionReport& c)
{
  std::string line = "connection " + c.connection.to_string() + " " + std::string(analyser::to_string(c.verdict)) +
                     " " + c.score.to_fixed3();
  if (!c.reason.empty()) line += " (" + c.reason + ")";
  return line;
}

void render_match_report(std::ostringstream& out, const MatchReport& report, std::string_view prefix)
{
  for (const auto& c : report.connections) {
    out << prefix << connection_line(c) << "\n";
    for (const auto& m : c.mismatches) out << prefix << "  mismatch " << describe(m) << "\n";
  }
}

std::string demand_line(const Demand& d)
{
  std::string line = "demand " + d.concept_id.to_string() + " origin=" + d.origin;
  if (!d.operation.empty()) line += " operation=" + d.operation;
  if (d.shape) {
    std::string sig = spec::serialize(analyser::demand_signature(d));
    while (!sig.empty() && sig.back() == '\n') sig.pop_back();
    std::replace(sig.begin(), sig.end(), '\n', ' ');
    line += " signature=" + sig;
  }
  return line;
}

json encode_integration(const Integration& i)
{
  json j = {{"source", to_string(i.source)}, {"fingerprint", i.fingerprint}, {"artifact", i.artifact}};
  j["connection"] = i.connection ? codec::encode(*i.connection) : json(nullptr);
  j["demand"] = i.demand ? json(i.demand->to_string()) : json(nullptr);
  return j;
}

Integration decode_integration(const json& j)
{
  Integration i;
  auto source = j.at("source").get<std::string>();
  if (source == "POOL_HIT") {
    i.source = Source::PoolHit;
  } else if (source == "GENERATED") {
    i.source = Source::Generated;
  } else {
    throw Error(ErrorCode::InvalidSpec, "unknown integration source '" + source + "'");
  }
  i.fingerprint = j.at("fingerprint").get<std::string>();
  i.artifact = j.at("artifact").get<std::string>();
  if (!j.at("connection").is_null()) i.connection = codec::decode_connection(j.at("connection"));
  if (!j.at("demand").is_null()) i.demand = spec::ConceptId::from_path(j.at("demand").get<std::string>());
  return i;
}

json encode_demands(const std::vector<Demand>& demands)
{
  json out = json::array();
  for (const auto& d : demands) out.push_back(codec::encode(d));
  return out;
}

}  // namespace

std::string_view to_string(Step step)
{
  for (const auto& [s, name] : kStepNames) {
    if (s == step) return name;
  }
  return "?";
}

std::optional<Step> step_from_string(std::string_view name)
{
  for (const auto& [s, n] : kStepNames) {
    if (n == name) return s;
  }
  return std::nullopt;
}

std::string_view to_string(Outcome outcome)
{
  switch (outcome) {
    case Outcome::AlreadyExact: return "ALREADY_EXACT";
    case Outcome::Adapted: return "ADAPTED";
    case Outcome::Unresolvable: return "UNRESOLVABLE";
  }
  return "?";
}

std::string_view to_string(Source source)
{
  return source == Source::PoolHit ? "POOL_HIT" : "GENERATED";
}

IntegratedProject integrate(const spec::ProjectSpec& project, const spec::Connection& connection,
                            const adapter::AdapterSpec& adapter)
{
  const std::string where = connection.to_string();
  if (adapter.consumer_component != connection.consumer.component ||
      adapter.implements.name != connection.consumer.interface_name) {
    throw Error(ErrorCode::InterfaceMismatch, "adapter '" + adapter.name + "' implements " + adapter.consumer_component +
                                                  "." + adapter.implements.name + ", not the consumer side of " + where);
  }
  if (adapter.provider_component != connection.provider.component ||
      adapter.delegates_to.name != connection.provider.interface_name) {
    throw Error(ErrorCode::InterfaceMismatch, "adapter '" + adapter.name + "' delegates to " + adapter.provider_component +
                                                  "." + adapter.delegates_to.name + ", not the provider side of " + where);
  }
  IntegratedProject out;
  out.original = project;
  out.project = project;
  out.adapters = {adapter};
  auto& conns = out.project.connections;
  auto it = std::find_if(conns.begin(), conns.end(), [&](const spec::Connection& c) {
    return c.consumer == connection.consumer && c.provider == connection.provider;
  });
  if (it == conns.end()) throw Error(ErrorCode::InterfaceMismatch, "project has no connection " + where);
  spec::Connection to_adapter{connection.consumer, {adapter.name, adapter.implements.name}, it->loc};
  spec::Connection to_provider{{adapter.name, adapter.delegates_to.name}, connection.provider, it->loc};
  *it = to_adapter;
  conns.insert(it + 1, to_provider);
  add_use(out.project, adapter.name, adapter.version);
  return out;
}

WorkflowOutput run_workflow(const spec::ProjectSpec& project, std::vector<spec::ComponentSpec> components,
                            const pool::Pool& pool, const analyser::ConversionTable& conv,
                            const WorkflowOptions& options)
{
  return Workflow(project, std::move(components), pool, conv, options).run();
}

std::vector<spec::ComponentSpec> load_components(const std::vector<fs::path>& dirs)
{
  std::vector<fs::path> files;
  for (const auto& dir : dirs) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::Io, "spec directory '" + dir.string() + "' does not exist");
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
      if (entry.is_regular_file() && entry.path().extension() == ".cdl") files.push_back(entry.path());
    }
    if (ec) throw Error(ErrorCode::Io, "cannot list '" + dir.string() + "'");
  }
  std::sort(files.begin(), files.end());
  files.erase(std::unique(files.begin(), files.end(),
                          [](const fs::path& a, const fs::path& b) {
                            std::error_code ec;
                            return fs::equivalent(a, b, ec);
                          }),
              files.end());
  std::vector<spec::ComponentSpec> out;
  for (const auto& file : files) {
    auto c = spec::parse_component(read_file(file), file.string());
    auto violations = spec::validate(c);
    if (!violations.empty()) {
      throw Error(ErrorCode::InvalidSpec, file.string() + ": " + std::string(spec::to_string(violations.front().code)) +
                                              " " + violations.front().where + ": " + violations.front().message);
    }
    bool duplicate = std::any_of(out.begin(), out.end(), [&](const spec::ComponentSpec& x) { return x == c; });
    if (!duplicate) out.push_back(std::move(c));
  }
  return out;
}

spec::ProjectSpec load_project(const fs::path& file)
{
  return spec::parse_project(read_file(file), file.string());
}

WorkflowOutput run_workflow(const fs::path& project_file, const std::vector<fs::path>& spec_dirs,
                            const fs::path& pool_root, const analyser::ConversionTable& conv,
                            const WorkflowOptions& options)
{
  auto project = load_project(project_file);
  auto components = load_components(spec_dirs);
  pool::PoolOptions pool_options;
  pool_options.clock = options.clock;
  pool::Pool pool(pool_root, pool_options);
  return run_workflow(project, std::move(components), pool, conv, options);
}

std::string describe(const analyser::Mismatch& m)
{
  using namespace analyser;
  std::string out = m.operation + " " + std::string(to_string(m.kind()));
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, RenameDetail>) {
          out += " " + d.required_name + "->" + d.provided_name;
        } else if constexpr (std::is_same_v<T, PermutationDetail>) {
          out += " order=";
          for (std::size_t i = 0; i < d.order.size(); ++i) out += (i ? "," : "") + std::to_string(d.order[i]);
        } else if constexpr (std::is_same_v<T, ConversionDetail>) {
          out += " slot=" + (d.slot ? std::to_string(*d.slot) : std::string("return"));
          out += " " + d.rule.to_string();
        } else if constexpr (std::is_same_v<T, FillDetail>) {
          out += " slot=" + std::to_string(d.slot) + " value=" + spec::format_literal(d.value);
        } else if constexpr (std::is_same_v<T, MissingDetail>) {
          out += " concept=" + d.concept_id.to_string();
        } else {
          out += " hops=" + std::to_string(d.hops);
        }
      },
      m.detail);
  return out;
}

std::string report(const WorkflowResult& result, Format format)
{
  if (format == Format::Structured) {
    json steps = json::array();
    for (const auto& s : result.steps) steps.push_back({{"step", to_string(s.step)}, {"at", s.at}, {"detail", s.detail}});
    json integrations = json::array();
    for (const auto& i : result.integrations) integrations.push_back(encode_integration(i));
    json doc = {{"format", kReportFormat},
                {"project", result.project},
                {"outcome", to_string(result.outcome)},
                {"integrations", std::move(integrations)},
                {"unresolved", encode_demands(result.unresolved)},
                {"initial_report", codec::encode(result.initial_report)},
                {"final_report", codec::encode(result.final_report)},
                {"steps", std::move(steps)},
                {"diagnostics", result.diagnostics}};
    return codec::canonical(doc);
  }
  std::ostringstream out;
  out << "project " << result.project << "\n";
  out << "outcome " << to_string(result.outcome) << "\n";
  for (const auto& s : result.steps) {
    out << "step " << to_string(s.step);
    if (!s.detail.empty()) out << " " << s.detail;
    out << "\n";
  }
  render_match_report(out, result.initial_report, "");
  for (const auto& i : result.integrations) {
    out << "integration " << (i.connection ? i.connection->to_string() : "demand " + i.demand->to_string()) << " "
        << to_string(i.source) << " " << i.artifact << " " << i.fingerprint << "\n";
  }
  for (const auto& c : result.final_report.connections) out << "verified " << connection_line(c).substr(11) << "\n";
  for (const auto& d : result.unresolved) out << "unresolved " << demand_line(d) << "\n";
  for (const auto& d : result.diagnostics) out << "diagnostic " << d << "\n";
  return out.str();
}

WorkflowResult parse_report(std::string_view text)
{
  json doc = codec::parse_json(text, "workflow report");
  try {
    if (doc.at("format").get<std::string>() != kReportFormat) throw Error(ErrorCode::InvalidSpec, "not a workflow report");
    WorkflowResult r;
    r.project = doc.at("project").get<std::string>();
    auto outcome = doc.at("outcome").get<std::string>();
    if (outcome == "ALREADY_EXACT") {
      r.outcome = Outcome::AlreadyExact;
    } else if (outcome == "ADAPTED") {
      r.outcome = Outcome::Adapted;
    } else if (outcome == "UNRESOLVABLE") {
      r.outcome = Outcome::Unresolvable;
    } else {
      throw Error(ErrorCode::InvalidSpec, "unknown outcome '" + outcome + "'");
    }
    for (const auto& j : doc.at("integrations")) r.integrations.push_back(decode_integration(j));
    for (const auto& j : doc.at("unresolved")) r.unresolved.push_back(codec::decode_demand(j));
    r.initial_report = codec::decode_match_report(doc.at("initial_report"));
    r.final_report = codec::decode_match_report(doc.at("final_report"));
    for (const auto& j : doc.at("steps")) {
      auto step = step_from_string(j.at("step").get<std::string>());
      if (!step) throw Error(ErrorCode::InvalidSpec, "unknown workflow step");
      r.steps.push_back({*step, j.at("at").get<std::string>(), j.at("detail").get<std::string>()});
    }
    r.diagnostics = doc.at("diagnostics").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("workflow report: ") + e.what());
  }
}

std::string check_report(const MatchReport& report, Format format)
{
  if (format == Format::Structured) {
    return codec::canonical({{"format", kCheckFormat}, {"report", codec::encode(report)}});
  }
  std::ostringstream out;
  render_match_report(out, report, "");
  for (const auto& d : report.demands) out << demand_line(d) << "\n";
  return out.str();
}

MatchReport parse_check_report(std::string_view text)
{
  json doc = codec::parse_json(text, "check report");
  try {
    if (doc.at("format").get<std::string>() != kCheckFormat) throw Error(ErrorCode::InvalidSpec, "not a check report");
    return codec::decode_match_report(doc.at("report"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("check report: ") + e.what());
  }
}

EmittedFiles emit(const WorkflowOutput& output, const fs::path& dir, const std::string& stem, Format format,
                  std::string_view stub_template)
{
  EmittedFiles files;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create '" + dir.string() + "': " + ec.message());
  auto put = [&](const std::string& name, std::string_view bytes) {
    write_file(dir / name, bytes);
    files.written.push_back(name);
  };
  if (output.result.outcome != Outcome::AlreadyExact) {
    put(stem + ".adapted.pdl", spec::serialize(output.integrated.project));
    for (const auto& a : output.integrated.adapters) {
      put(a.name + ".cdl", spec::serialize(a.as_component()));
      put(a.name + ".adapter", adapter::emit_descriptor(a));
      put(a.name + ".stub", adapter::emit_stub(a, stub_template));
    }
    for (const auto& c : output.integrated.retrieved) {
      put(c.name + "-" + c.version.to_string() + ".cdl", spec::serialize(c));
    }
  }
  put(stem + (format == Format::Structured ? ".report.json" : ".report.txt"), report(output.result, format));
  return files;
}

}  // namespace adapterforge::linkage
