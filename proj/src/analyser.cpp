#include "adapterforge/analyser.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "adapterforge/error.hpp"

namespace adapterforge::analyser {

MatchPolicy MatchPolicy::parse(std::string_view text)
{
  MatchPolicy p;
  const std::map<std::string, Rational MatchPolicy::*> keys = {
      {"threshold", &MatchPolicy::threshold},
      {"penalty.rename", &MatchPolicy::rename},
      {"penalty.param_permutation", &MatchPolicy::param_permutation},
      {"penalty.type_conversion", &MatchPolicy::type_conversion},
      {"penalty.default_fill", &MatchPolicy::default_fill},
      {"penalty.concept_hop", &MatchPolicy::concept_hop},
  };
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::Config, "policy line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    auto it = keys.find(key);
    if (it == keys.end()) throw Error(ErrorCode::Config, "policy line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    Rational value = Rational::parse(trim(line.substr(eq + 1)));
    if (value < Rational(0) || value > Rational(1)) {
      throw Error(ErrorCode::Config, "policy line " + std::to_string(lineno) + ": '" + key + "' must lie in [0, 1]");
    }
    p.*(it->second) = value;
  }
  return p;
}

MatchPolicy MatchPolicy::load(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read policy file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string_view to_string(MismatchKind kind)
{
  switch (kind) {
    case MismatchKind::Rename: return "RENAME";
    case MismatchKind::ParamPermutation: return "PARAM_PERMUTATION";
    case MismatchKind::TypeConversion: return "TYPE_CONVERSION";
    case MismatchKind::DefaultFill: return "DEFAULT_FILL";
    case MismatchKind::MissingOperation: return "MISSING_OPERATION";
    case MismatchKind::ConceptDistance: return "CONCEPT_DISTANCE";
  }
  return "RENAME";
}

std::string_view to_string(Verdict v)
{
  switch (v) {
    case Verdict::Exact: return "EXACT";
    case Verdict::Adaptable: return "ADAPTABLE";
    case Verdict::Incompatible: return "INCOMPATIBLE";
  }
  return "INCOMPATIBLE";
}

MismatchKind Mismatch::kind() const
{
  static constexpr MismatchKind kinds[] = {MismatchKind::Rename,      MismatchKind::ParamPermutation,
                                           MismatchKind::TypeConversion, MismatchKind::DefaultFill,
                                           MismatchKind::MissingOperation, MismatchKind::ConceptDistance};
  return kinds[detail.index()];
}

Rational penalty_of(const Mismatch& m, const MatchPolicy& policy)
{
  switch (m.kind()) {
    case MismatchKind::Rename: return policy.rename;
    case MismatchKind::ParamPermutation: return policy.param_permutation;
    case MismatchKind::TypeConversion: return policy.type_conversion;
    case MismatchKind::DefaultFill: return policy.default_fill;
    case MismatchKind::MissingOperation: return Rational(1);
    case MismatchKind::ConceptDistance: return policy.concept_hop * Rational(std::get<DistanceDetail>(m.detail).hops);
  }
  return Rational(0);
}

Rational score_of(std::span<const Mismatch> mismatches, const MatchPolicy& policy)
{
  Rational s{1};
  for (const auto& m : mismatches) s -= penalty_of(m, policy);
  return s;
}

namespace {

struct Candidate {
  std::size_t slot;
  const ConversionRule* rule;  // null when the representations already agree
};

class Aligner {
 public:
  Aligner(const spec::OperationSig& req, const spec::OperationSig& prov, std::vector<std::vector<Candidate>> cands,
          Rational base, std::size_t base_count, const MatchPolicy& policy)
      : req_(req), prov_(prov), cands_(std::move(cands)), base_(base), base_count_(base_count), policy_(policy)
  {
  }

  /// Depth-first over candidates in ascending slot order, so the first alignment found
  /// among equals is the lexicographically smallest one.
  bool run()
  {
    current_.assign(req_.params.size(), {0, nullptr});
    used_.assign(prov_.params.size(), false);
    search(0);
    return found_;
  }

  const std::vector<Candidate>& best() const { return best_; }

 private:
  void search(std::size_t i)
  {
    if (i == current_.size()) {
      evaluate();
      return;
    }
    for (const auto& c : cands_[i]) {
      if (used_[c.slot]) continue;
      used_[c.slot] = true;
      current_[i] = c;
      search(i + 1);
      used_[c.slot] = false;
    }
  }

  void evaluate()
  {
    std::size_t fills = 0;
    for (std::size_t j = 0; j < used_.size(); ++j) {
      if (used_[j]) continue;
      if (!prov_.params[j].default_value) return;
      ++fills;
    }
    std::size_t convs = 0;
    for (const auto& c : current_) convs += c.rule ? 1 : 0;
    bool permuted = false;
    {
      std::vector<std::size_t> by_slot(prov_.params.size(), SIZE_MAX);
      for (std::size_t i = 0; i < current_.size(); ++i) by_slot[current_[i].slot] = i;
      std::size_t expect = 0;
      for (auto i : by_slot) {
        if (i == SIZE_MAX) continue;
        if (i != expect++) permuted = true;
      }
    }
    Rational score = base_ - policy_.type_conversion * Rational(static_cast<std::int64_t>(convs)) -
                     policy_.default_fill * Rational(static_cast<std::int64_t>(fills)) -
                     (permuted ? policy_.param_permutation : Rational(0));
    std::size_t count = base_count_ + convs + fills + (permuted ? 1 : 0);
    if (!found_ || score > best_score_ || (score == best_score_ && count < best_count_)) {
      found_ = true;
      best_score_ = score;
      best_count_ = count;
      best_ = current_;
    }
  }

  const spec::OperationSig& req_;
  const spec::OperationSig& prov_;
  std::vector<std::vector<Candidate>> cands_;
  Rational base_;
  std::size_t base_count_;
  const MatchPolicy& policy_;

  std::vector<Candidate> current_;
  std::vector<bool> used_;
  bool found_ = false;
  Rational best_score_;
  std::size_t best_count_ = 0;
  std::vector<Candidate> best_;
};

}  // namespace

std::optional<OperationMatch> match_operation(const spec::OperationSig& required, const spec::OperationSig& provided,
                                              const ConversionTable& conv, const MatchPolicy& policy)
{
  auto hops = required.concept_id.distance(provided.concept_id);
  if (!hops) return std::nullopt;
  const std::size_t n = required.params.size();
  const std::size_t m = provided.params.size();
  if (n > m) return std::nullopt;

  const ConversionRule* return_rule = nullptr;
  if (required.returns != provided.returns) {
    return_rule = conv.find(TypeKey{provided.returns, std::nullopt}, TypeKey{required.returns, std::nullopt});
    if (!return_rule) return std::nullopt;
  }

  std::vector<spec::ConceptId> prov_concepts;
  for (std::size_t j = 0; j < m; ++j) prov_concepts.push_back(provided.param_concept(j));

  std::vector<std::vector<Candidate>> cands(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ci = required.param_concept(i);
    const TypeKey from{required.params[i].ty, required.params[i].unit};
    for (std::size_t j = 0; j < m; ++j) {
      if (prov_concepts[j] != ci) continue;
      const TypeKey to{provided.params[j].ty, provided.params[j].unit};
      if (from == to) {
        cands[i].push_back({j, nullptr});
      } else if (const auto* rule = conv.find(from, to)) {
        cands[i].push_back({j, rule});
      }
    }
    if (cands[i].empty()) return std::nullopt;
  }

  const bool renamed = required.name != provided.name;
  Rational base = Rational(1) - (renamed ? policy.rename : Rational(0)) -
                  policy.concept_hop * Rational(*hops) - (return_rule ? policy.type_conversion : Rational(0));
  std::size_t base_count = (renamed ? 1 : 0) + (*hops > 0 ? 1 : 0) + (return_rule ? 1 : 0);

  Aligner aligner(required, provided, std::move(cands), base, base_count, policy);
  if (!aligner.run()) return std::nullopt;
  const auto& best = aligner.best();

  OperationMatch out;
  out.required_op = required.name;
  out.provided_op = provided.name;
  auto push = [&](auto detail) { out.mismatches.push_back(Mismatch{required.name, std::move(detail)}); };

  if (renamed) push(RenameDetail{required.name, provided.name});
  if (*hops > 0) push(DistanceDetail{*hops});

  std::vector<std::size_t> by_slot(m, SIZE_MAX);
  for (std::size_t i = 0; i < n; ++i) by_slot[best[i].slot] = i;
  PermutationDetail perm;
  for (auto i : by_slot) {
    if (i != SIZE_MAX) perm.order.push_back(i);
  }
  for (std::size_t k = 0; k < perm.order.size(); ++k) {
    if (perm.order[k] != k) {
      push(perm);
      break;
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (by_slot[j] != SIZE_MAX && best[by_slot[j]].rule) {
      push(ConversionDetail{j, by_slot[j], *best[by_slot[j]].rule});
    }
  }
  if (return_rule) push(ConversionDetail{std::nullopt, std::nullopt, *return_rule});
  for (std::size_t j = 0; j < m; ++j) {
    if (by_slot[j] == SIZE_MAX) push(FillDetail{j, *provided.params[j].default_value});
  }

  out.score = score_of(out.mismatches, policy);
  if (out.score < policy.threshold) return std::nullopt;
  return out;
}

Demand demand_for(const spec::OperationSig& required, const spec::Connection& origin)
{
  Demand d;
  d.concept_id = required.concept_id;
  d.operation = required.name;
  d.origin = origin.to_string();
  Shape shape;
  for (std::size_t i = 0; i < required.params.size(); ++i) {
    shape.params.push_back({required.param_concept(i), required.params[i].ty, required.params[i].unit});
  }
  shape.returns = required.returns;
  d.shape = std::move(shape);
  return d;
}

spec::OperationSig demand_signature(const Demand& demand)
{
  spec::OperationSig op;
  op.name = demand.operation.empty() ? "demand" : demand.operation;
  op.concept_id = demand.concept_id;
  if (demand.shape) {
    op.returns = demand.shape->returns;
    for (std::size_t i = 0; i < demand.shape->params.size(); ++i) {
      const auto& sp = demand.shape->params[i];
      spec::ParamSig p;
      p.name = "p" + std::to_string(i);
      p.ty = sp.ty;
      p.unit = sp.unit;
      p.concept_id = sp.concept_id;
      op.params.push_back(std::move(p));
    }
  }
  return op;
}

std::optional<Rational> concept_only_score(const spec::ConceptId& demanded, const spec::ConceptId& provided,
                                           const MatchPolicy& policy)
{
  auto hops = demanded.distance(provided);
  if (!hops) return std::nullopt;
  Rational s = Rational(1) - policy.concept_hop * Rational(*hops);
  if (s < policy.threshold) return std::nullopt;
  return s;
}

bool MatchReport::all_exact() const
{
  for (const auto& c : connections) {
    if (c.verdict != Verdict::Exact) return false;
  }
  return true;
}

namespace {

const spec::InterfaceSpec& resolve_endpoint(const aslt::Aslt& tree, const std::map<std::string, const spec::ComponentSpec*>& by_name,
                                            const spec::InterfaceRef& ref, spec::Direction direction,
                                            const spec::Connection& conn)
{
  const std::string where = "connection '" + conn.to_string() + "': ";
  auto comp_node = tree.find_child(tree.root(), aslt::NodeKind::Component, ref.component);
  auto it = by_name.find(ref.component);
  if (!comp_node || it == by_name.end()) {
    throw Error(ErrorCode::Unresolved, where + "component '" + ref.component + "' is not used by the project");
  }
  // Interfaces of both directions may share a name; pick the node with the right direction meta.
  bool found = false;
  for (aslt::NodeId c : tree.node(*comp_node).children) {
    const auto& n = tree.node(c);
    if (n.label == ref.interface_name && tree.meta_value(c, "direction") == std::string(spec::to_string(direction))) {
      found = true;
      break;
    }
  }
  const auto* iface = it->second->find_interface(direction, ref.interface_name);
  if (!found || !iface) {
    throw Error(ErrorCode::Unresolved, where + "component '" + ref.component + "' has no " +
                                           (direction == spec::Direction::Provided ? "provided" : "required") +
                                           " interface '" + ref.interface_name + "'");
  }
  return *iface;
}

ConnectionReport analyse_connection(const spec::Connection& conn, const spec::InterfaceSpec& consumer,
                                    const spec::InterfaceSpec& provider, const ConversionTable& conv,
                                    const MatchPolicy& policy, std::vector<Demand>& demands)
{
  ConnectionReport rep;
  rep.connection = conn;
  std::vector<std::string> missing;
  Rational total{0};
  for (const auto& req : consumer.operations) {
    std::optional<OperationMatch> best;
    for (const auto& prov : provider.operations) {
      auto m = match_operation(req, prov, conv, policy);
      if (!m) continue;
      if (!best || m->score > best->score ||
          (m->score == best->score && (m->mismatches.size() < best->mismatches.size() ||
                                       (m->mismatches.size() == best->mismatches.size() && m->provided_op < best->provided_op)))) {
        best = std::move(m);
      }
    }
    if (best) {
      total += best->score;
      rep.mismatches.insert(rep.mismatches.end(), best->mismatches.begin(), best->mismatches.end());
      rep.matched.push_back(std::move(*best));
    } else {
      missing.push_back(req.name);
      rep.mismatches.push_back(Mismatch{req.name, MissingDetail{req.concept_id}});
      demands.push_back(demand_for(req, conn));
    }
  }

  if (!missing.empty()) {
    rep.verdict = Verdict::Incompatible;
    rep.score = Rational(0);
    rep.reason = "no provided operation matches required operation";
    rep.reason += missing.size() > 1 ? "s " : " ";
    for (std::size_t i = 0; i < missing.size(); ++i) rep.reason += (i ? ", " : "") + missing[i];
    return rep;
  }
  rep.score = consumer.operations.empty() ? Rational(1)
                                          : total / Rational(static_cast<std::int64_t>(consumer.operations.size()));
  bool exact = rep.mismatches.empty() && rep.score == Rational(1);
  if (exact) {
    rep.verdict = Verdict::Exact;
  } else if (rep.score >= policy.threshold) {
    rep.verdict = Verdict::Adaptable;
  } else {
    rep.verdict = Verdict::Incompatible;
    rep.reason = "aggregate score " + rep.score.to_fixed3() + " below threshold " + policy.threshold.to_fixed3();
  }
  return rep;
}

}  // namespace

MatchReport analyse(const aslt::Aslt& tree, const spec::ProjectSpec& project,
                    std::span<const spec::ComponentSpec> components, const ConversionTable& conv,
                    const MatchPolicy& policy)
{
  auto resolved = aslt::resolve_uses(project, components);
  std::map<std::string, const spec::ComponentSpec*> by_name;
  for (const auto* c : resolved) by_name[c->name] = c;

  MatchReport report;
  for (const auto& conn : project.connections) {
    const auto& consumer = resolve_endpoint(tree, by_name, conn.consumer, spec::Direction::Required, conn);
    const auto& provider = resolve_endpoint(tree, by_name, conn.provider, spec::Direction::Provided, conn);
    report.connections.push_back(analyse_connection(conn, consumer, provider, conv, policy, report.demands));
  }

  for (const auto& wanted : project.demands) {
    bool satisfied = false;
    for (const auto* c : resolved) {
      for (const auto& iface : c->provided) {
        for (const auto& op : iface.operations) {
          if (concept_only_score(wanted, op.concept_id, policy)) satisfied = true;
        }
      }
    }
    if (!satisfied) report.demands.push_back(Demand{wanted, std::nullopt, {}, "project"});
  }
  return report;
}

bool verify(const aslt::Aslt& tree, const spec::ProjectSpec& project, std::span<const spec::ComponentSpec> components,
            const ConversionTable& conv, const MatchPolicy& policy)
{
  return analyse(tree, project, components, conv, policy).all_exact();
}

}  // namespace adapterforge::analyser
