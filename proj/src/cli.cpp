#include "adapterforge/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "adapterforge/adapter.hpp"
#include "adapterforge/analyser.hpp"
#include "adapterforge/aslt.hpp"
#include "adapterforge/error.hpp"
#include "adapterforge/linkage.hpp"
#include "adapterforge/pool.hpp"
#include "adapterforge/spec_lang.hpp"

namespace adapterforge::cli {

namespace fs = std::filesystem;

namespace {

std::string read_text(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Common {
  std::vector<std::string> specs;
  std::string pool;
  std::string conversions;
  std::string policy;
  std::string format = "human";
  std::string emit;
  std::string stub_template;
  std::string constraint;
  std::vector<std::string> fold;
};

fs::path parent_or_cwd(const std::string& file)
{
  fs::path p = fs::path(file).parent_path();
  return p.empty() ? fs::path(".") : p;
}

std::vector<fs::path> spec_dirs(const Common& c, const std::string& project_file)
{
  if (c.specs.empty()) return {parent_or_cwd(project_file)};
  return {c.specs.begin(), c.specs.end()};
}

analyser::ConversionTable conversions(const Common& c)
{
  return c.conversions.empty() ? analyser::ConversionTable::builtin() : analyser::ConversionTable::load(c.conversions);
}

analyser::MatchPolicy policy(const Common& c)
{
  return c.policy.empty() ? analyser::MatchPolicy{} : analyser::MatchPolicy::load(c.policy);
}

linkage::Format format(const Common& c)
{
  return c.format == "structured" ? linkage::Format::Structured : linkage::Format::Human;
}

fs::path pool_root(const Common& c)
{
  if (!c.pool.empty()) return c.pool;
  if (const char* env = std::getenv("ADAPTERFORGE_POOL"); env && *env) return env;
  throw Error(ErrorCode::Io, "no pool directory: pass --pool or set ADAPTERFORGE_POOL");
}

bool is_project_file(const std::string& path, std::string_view text)
{
  if (fs::path(path).extension() == ".pdl") return true;
  if (fs::path(path).extension() == ".cdl") return false;
  auto first = text.find_first_not_of(" \t\r\n");
  return first != std::string_view::npos && text.substr(first).rfind("project", 0) == 0;
}

int cmd_check(const std::string& project_file, const Common& c, std::ostream& out)
{
  auto project = linkage::load_project(project_file);
  auto components = linkage::load_components(spec_dirs(c, project_file));
  auto tree = aslt::build_aslt(project, components);
  auto report = analyser::analyse(tree, project, components, conversions(c), policy(c));
  out << linkage::check_report(report, format(c));
  bool incompatible = !report.demands.empty() ||
                      std::any_of(report.connections.begin(), report.connections.end(),
                                  [](const auto& r) { return r.verdict == analyser::Verdict::Incompatible; });
  if (incompatible) return kExitIncompatible;
  return report.all_exact() ? kExitOk : kExitAdaptable;
}

int cmd_adapt(const std::string& project_file, const Common& c, std::ostream& out)
{
  linkage::WorkflowOptions options;
  options.policy = policy(c);
  std::string tmpl = c.stub_template.empty() ? std::string(adapter::default_stub_template()) : read_text(c.stub_template);
  auto output = linkage::run_workflow(fs::path(project_file), spec_dirs(c, project_file), pool_root(c), conversions(c),
                                      options);
  fs::path emit_dir = c.emit.empty() ? parent_or_cwd(project_file) : fs::path(c.emit);
  linkage::emit(output, emit_dir, fs::path(project_file).stem().string(), format(c), tmpl);
  out << linkage::report(output.result, format(c));
  switch (output.result.outcome) {
    case linkage::Outcome::AlreadyExact: return kExitOk;
    case linkage::Outcome::Adapted: return kExitAdaptable;
    case linkage::Outcome::Unresolvable: return kExitIncompatible;
  }
  return kExitError;
}

int cmd_pool_add(const std::vector<std::string>& files, const Common& c, std::ostream& out)
{
  pool::Pool p(pool_root(c));
  for (const auto& f : files) {
    auto artifact = pool::parse_artifact(read_text(f));
    auto fp = p.add(artifact);
    out << fp << " " << pool::component_view(artifact).name << "\n";
  }
  return kExitOk;
}

analyser::Demand query_demand(const std::string& text)
{
  if (text.find('(') != std::string::npos) {
    std::string decl = text;
    auto last = decl.find_last_not_of(" \t\r\n");
    if (last != std::string::npos && decl[last] != ';') decl += ";";
    auto op = spec::parse_operation(decl);
    auto d = analyser::demand_for(op, spec::Connection{});
    d.origin = "query";
    return d;
  }
  auto id = spec::ConceptId::parse(text);
  if (!id) throw Error(ErrorCode::Syntax, "'" + text + "' is neither a concept nor an operation declaration");
  return analyser::Demand{*id, std::nullopt, {}, "query"};
}

int cmd_pool_query(const std::string& what, const Common& c, std::ostream& out)
{
  pool::Pool p(pool_root(c));
  pool::PoolQuery q{query_demand(what), std::nullopt};
  if (!c.constraint.empty()) {
    q.constraint = spec::VersionConstraint::parse(c.constraint);
    if (!q.constraint) throw Error(ErrorCode::BadConstraint, "bad version constraint '" + c.constraint + "'");
  }
  for (const auto& hit : p.query(q, conversions(c), policy(c))) {
    out << hit.fingerprint << " " << hit.score.to_fixed3() << " " << hit.name << "\n";
  }
  return kExitOk;
}

int cmd_pool_list(const Common& c, std::ostream& out)
{
  pool::Pool p(pool_root(c));
  for (const auto& [fp, e] : p.index().entries) {
    out << fp << " " << pool::to_string(e.kind) << " " << e.name << " " << e.version.to_string() << "\n";
  }
  return kExitOk;
}

int cmd_pool_verify(const Common& c, std::ostream& out)
{
  pool::Pool p(pool_root(c));
  auto findings = p.verify();
  for (const auto& f : findings) {
    out << pool::to_string(f.kind) << " " << f.fingerprint << " " << f.path << ": " << f.message << "\n";
  }
  return findings.empty() ? kExitOk : kExitAdaptable;
}

int cmd_aslt_dump(const std::string& file, const Common& c, std::ostream& out)
{
  std::string text = read_text(file);
  aslt::Aslt tree;
  if (is_project_file(file, text)) {
    auto project = spec::parse_project(text, file);
    auto components = linkage::load_components(spec_dirs(c, file));
    tree = aslt::build_aslt(project, components);
  } else {
    tree = aslt::build_component_aslt(spec::parse_component(text, file));
  }
  std::set<aslt::NodeId> hidden;
  for (const auto& pattern : c.fold) {
    auto view = aslt::fold(tree, aslt::FoldPattern::parse(pattern));
    hidden.insert(view.hidden().begin(), view.hidden().end());
  }
  aslt::FoldView view(tree, std::move(hidden));
  auto order = aslt::traverse(view);
  out << aslt::dump(tree, order);
  return kExitOk;
}

int cmd_fmt(const std::string& file, std::ostream& out)
{
  std::string text = read_text(file);
  if (is_project_file(file, text)) {
    out << spec::serialize(spec::parse_project(text, file));
  } else {
    out << spec::serialize(spec::parse_component(text, file));
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Component adaptation toolchain", "adapterforge"};
  app.require_subcommand(1);
  Common c;
  std::string target;
  std::vector<std::string> files;

  auto add_specs = [&](CLI::App* cmd) {
    cmd->add_option("--specs", c.specs, "Directory of .cdl component specs (repeatable)");
  };
  auto add_pool = [&](CLI::App* cmd) { cmd->add_option("--pool", c.pool, "Pool directory"); };
  auto add_matching = [&](CLI::App* cmd) {
    cmd->add_option("--conversions", c.conversions, "Conversion table file");
    cmd->add_option("--policy", c.policy, "Match policy file");
  };
  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"human", "structured"}));
  };

  auto* check = app.add_subcommand("check", "Compare a project's connections without changing anything");
  check->add_option("project", target, "Project file (.pdl)")->required();
  add_specs(check);
  add_matching(check);
  add_format(check);

  auto* adapt = app.add_subcommand("adapt", "Run the adaptation workflow and write the integrated project");
  adapt->add_option("project", target, "Project file (.pdl)")->required();
  add_specs(adapt);
  add_pool(adapt);
  add_matching(adapt);
  add_format(adapt);
  adapt->add_option("--emit", c.emit, "Output directory");
  adapt->add_option("--template", c.stub_template, "Stub template file");

  auto* pool_cmd = app.add_subcommand("pool", "Administer the component pool");
  pool_cmd->require_subcommand(1);
  auto* pool_add = pool_cmd->add_subcommand("add", "Store component specs or adapter descriptors");
  pool_add->add_option("files", files, "Files to store")->required();
  add_pool(pool_add);
  auto* pool_query = pool_cmd->add_subcommand("query", "Rank stored artifacts against a demand");
  pool_query->add_option("demand", target, "Concept id or operation declaration")->required();
  add_pool(pool_query);
  add_matching(pool_query);
  pool_query->add_option("--constraint", c.constraint, "Version constraint");
  auto* pool_list = pool_cmd->add_subcommand("list", "List indexed entries");
  add_pool(pool_list);
  auto* pool_verify = pool_cmd->add_subcommand("verify", "Re-hash every stored file");
  add_pool(pool_verify);

  auto* aslt_cmd = app.add_subcommand("aslt", "Inspect element trees");
  aslt_cmd->require_subcommand(1);
  auto* aslt_dump = aslt_cmd->add_subcommand("dump", "Print the element tree of a spec file");
  aslt_dump->add_option("file", target, "Project or component file")->required();
  add_specs(aslt_dump);
  aslt_dump->add_option("--fold", c.fold, "Hide nodes matching kind, kind:glob or *:glob (repeatable)");

  auto* fmt = app.add_subcommand("fmt", "Print the canonical form of a spec file");
  fmt->add_option("file", target, "Project or component file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "adapterforge: " << e.what() << "\n";
    return kExitError;
  }

  try {
    if (check->parsed()) return cmd_check(target, c, out);
    if (adapt->parsed()) return cmd_adapt(target, c, out);
    if (pool_add->parsed()) return cmd_pool_add(files, c, out);
    if (pool_query->parsed()) return cmd_pool_query(target, c, out);
    if (pool_list->parsed()) return cmd_pool_list(c, out);
    if (pool_verify->parsed()) return cmd_pool_verify(c, out);
    if (aslt_dump->parsed()) return cmd_aslt_dump(target, c, out);
    if (fmt->parsed()) return cmd_fmt(target, out);
  } catch (const ParseError& e) {
    err << "adapterforge: " << to_string(e.code()) << ": " << e.detail() << "\n";
    return kExitError;
  } catch (const Error& e) {
    err << "adapterforge: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "adapterforge: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace adapterforge::cli
