#include "adapterforge/aslt.hpp"

#include <algorithm>
#include <functional>

#include "adapterforge/error.hpp"
#include "adapterforge/spec_lang.hpp"

namespace adapterforge::aslt {

std::string_view to_string(NodeKind kind)
{
  switch (kind) {
    case NodeKind::Project: return "project";
    case NodeKind::Component: return "component";
    case NodeKind::Interface: return "interface";
    case NodeKind::Operation: return "operation";
    case NodeKind::Parameter: return "parameter";
    case NodeKind::Meta: return "meta";
  }
  return "meta";
}

std::optional<NodeKind> kind_from_string(std::string_view name)
{
  for (auto k : {NodeKind::Project, NodeKind::Component, NodeKind::Interface, NodeKind::Operation,
                 NodeKind::Parameter, NodeKind::Meta}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

namespace {

std::optional<NodeKind> child_kind_of(NodeKind parent)
{
  switch (parent) {
    case NodeKind::Project: return NodeKind::Component;
    case NodeKind::Component: return NodeKind::Interface;
    case NodeKind::Interface: return NodeKind::Operation;
    case NodeKind::Operation: return NodeKind::Parameter;
    default: return std::nullopt;
  }
}

}  // namespace

const AsltNode& Aslt::node(NodeId id) const
{
  if (!contains(id)) throw Error(ErrorCode::NoNode, "node " + std::to_string(id) + " does not exist");
  return nodes_[id];
}

std::optional<NodeId> Aslt::find_child(NodeId parent, NodeKind kind, std::string_view label) const
{
  for (NodeId c : node(parent).children) {
    if (nodes_[c].kind == kind && nodes_[c].label == label) return c;
  }
  return std::nullopt;
}

std::optional<std::string> Aslt::meta_value(NodeId owner, std::string_view key) const
{
  for (NodeId m : node(owner).meta_children) {
    if (nodes_[m].label == key) return nodes_[m].value;
  }
  return std::nullopt;
}

std::size_t Aslt::subtree_size(NodeId id) const
{
  std::size_t n = 0;
  std::vector<NodeId> stack{id};
  while (!stack.empty()) {
    NodeId cur = stack.back();
    stack.pop_back();
    ++n;
    const auto& nd = node(cur);
    stack.insert(stack.end(), nd.meta_children.begin(), nd.meta_children.end());
    stack.insert(stack.end(), nd.children.begin(), nd.children.end());
  }
  return n;
}

std::vector<std::string> Aslt::integrity_problems() const
{
  std::vector<std::string> problems;
  if (nodes_.empty()) {
    problems.push_back("tree has no nodes");
    return problems;
  }
  if (!contains(root_)) {
    problems.push_back("root id out of range");
    return problems;
  }
  const auto& r = nodes_[root_];
  if (r.parent) problems.push_back("root has a parent");
  if (r.kind != NodeKind::Project && r.kind != NodeKind::Component) problems.push_back("root is not a project or component");

  std::vector<int> referenced(nodes_.size(), 0);
  for (const auto& n : nodes_) {
    if (n.id != static_cast<NodeId>(&n - nodes_.data())) problems.push_back("node id does not match its slot");
    if (n.kind == NodeKind::Meta && (!n.children.empty() || !n.meta_children.empty())) {
      problems.push_back("meta node " + std::to_string(n.id) + " has children");
    }
    for (NodeId c : n.children) {
      if (!contains(c)) {
        problems.push_back("dangling child id " + std::to_string(c));
        continue;
      }
      ++referenced[c];
      if (nodes_[c].parent != n.id) problems.push_back("child " + std::to_string(c) + " has wrong parent link");
      if (child_kind_of(n.kind) != nodes_[c].kind) problems.push_back("kind hierarchy violated at " + std::to_string(c));
    }
    for (NodeId m : n.meta_children) {
      if (!contains(m)) {
        problems.push_back("dangling meta id " + std::to_string(m));
        continue;
      }
      ++referenced[m];
      if (nodes_[m].kind != NodeKind::Meta) problems.push_back("meta list holds non-meta node " + std::to_string(m));
      if (nodes_[m].parent != n.id) problems.push_back("meta " + std::to_string(m) + " has wrong parent link");
    }
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (i == root_) {
      if (referenced[i] != 0) problems.push_back("root is referenced as a child");
    } else if (referenced[i] != 1) {
      problems.push_back("node " + std::to_string(i) + " referenced " + std::to_string(referenced[i]) + " times");
    }
  }
  // Reachability from the root doubles as the cycle check once single-parentage holds.
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<NodeId> stack{root_};
  std::size_t reached = 0;
  while (!stack.empty()) {
    NodeId cur = stack.back();
    stack.pop_back();
    if (seen[cur]) {
      problems.push_back("cycle through node " + std::to_string(cur));
      break;
    }
    seen[cur] = true;
    ++reached;
    for (NodeId c : nodes_[cur].children) if (contains(c)) stack.push_back(c);
    for (NodeId m : nodes_[cur].meta_children) if (contains(m)) stack.push_back(m);
  }
  if (reached != nodes_.size()) problems.push_back("unreachable nodes present");
  return problems;
}

NodeId AsltBuilder::add_root(NodeKind kind, std::string label, const spec::SourceLoc& loc)
{
  if (has_root_) throw Error(ErrorCode::BadKind, "tree already has a root");
  if (kind != NodeKind::Project && kind != NodeKind::Component) {
    throw Error(ErrorCode::BadKind, "root must be a project or component, not " + std::string(to_string(kind)));
  }
  has_root_ = true;
  AsltNode n;
  n.id = static_cast<NodeId>(tree_.nodes_.size());
  n.kind = kind;
  n.label = std::move(label);
  tree_.root_ = n.id;
  if (loc.line > 0) tree_.source_map_[n.id] = loc;
  tree_.nodes_.push_back(std::move(n));
  return tree_.root_;
}

NodeId AsltBuilder::add_child(NodeId parent, NodeKind kind, std::string label, const spec::SourceLoc& loc)
{
  if (!tree_.contains(parent)) throw Error(ErrorCode::NoNode, "parent " + std::to_string(parent) + " does not exist");
  if (kind == NodeKind::Meta) throw Error(ErrorCode::BadKind, "use add_meta for meta nodes");
  NodeKind pk = tree_.nodes_[parent].kind;
  if (child_kind_of(pk) != kind) {
    throw Error(ErrorCode::BadKind,
                std::string(to_string(kind)) + " cannot be a child of " + std::string(to_string(pk)));
  }
  AsltNode n;
  n.id = static_cast<NodeId>(tree_.nodes_.size());
  n.kind = kind;
  n.label = std::move(label);
  n.parent = parent;
  if (loc.line > 0) tree_.source_map_[n.id] = loc;
  tree_.nodes_[parent].children.push_back(n.id);
  tree_.nodes_.push_back(std::move(n));
  return tree_.nodes_.back().id;
}

NodeId AsltBuilder::add_meta(NodeId parent, std::string key, std::string value)
{
  if (!tree_.contains(parent)) throw Error(ErrorCode::NoNode, "parent " + std::to_string(parent) + " does not exist");
  if (tree_.nodes_[parent].kind == NodeKind::Meta) throw Error(ErrorCode::MetaOnMeta, "meta nodes cannot carry meta");
  AsltNode n;
  n.id = static_cast<NodeId>(tree_.nodes_.size());
  n.kind = NodeKind::Meta;
  n.label = std::move(key);
  n.value = std::move(value);
  n.parent = parent;
  tree_.nodes_[parent].meta_children.push_back(n.id);
  tree_.nodes_.push_back(std::move(n));
  return tree_.nodes_.back().id;
}

Aslt AsltBuilder::build() &&
{
  if (!has_root_) throw Error(ErrorCode::BadKind, "tree has no root");
  return std::move(tree_);
}

std::vector<const spec::ComponentSpec*> resolve_uses(const spec::ProjectSpec& project,
                                                     std::span<const spec::ComponentSpec> components)
{
  std::vector<const spec::ComponentSpec*> out;
  for (const auto& use : project.uses) {
    const spec::ComponentSpec* best = nullptr;
    for (const auto& c : components) {
      if (c.name == use.component && use.constraint.admits(c.version) && (!best || c.version > best->version)) {
        best = &c;
      }
    }
    if (!best) {
      throw Error(ErrorCode::Unresolved, "no component spec satisfies uses \"" + use.component +
                                             "\" version \"" + use.constraint.to_string() + "\"");
    }
    out.push_back(best);
  }
  return out;
}

namespace {

void add_component(AsltBuilder& b, NodeId parent, const spec::ComponentSpec& c, const spec::ComponentUse* use,
                   bool as_root)
{
  NodeId cn = as_root ? b.add_root(NodeKind::Component, c.name, c.loc)
                      : b.add_child(parent, NodeKind::Component, c.name, c.loc);
  b.add_meta(cn, "version", c.version.to_string());
  if (use) b.add_meta(cn, "constraint", use->constraint.to_string());
  for (const auto& m : c.meta) b.add_meta(cn, "meta." + m.key, m.value);

  for (const auto* list : {&c.provided, &c.required}) {
    std::vector<const spec::InterfaceSpec*> sorted;
    for (const auto& i : *list) sorted.push_back(&i);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const spec::InterfaceSpec* x, const spec::InterfaceSpec* y) { return x->name < y->name; });
    for (const auto* iface : sorted) {
      NodeId in = b.add_child(cn, NodeKind::Interface, iface->name, iface->loc);
      b.add_meta(in, "direction", std::string(spec::to_string(iface->direction)));
      for (const auto& op : iface->operations) {
        NodeId on = b.add_child(in, NodeKind::Operation, op.name, op.loc);
        b.add_meta(on, "concept", op.concept_id.to_string());
        b.add_meta(on, "returns", op.returns.to_string());
        for (const auto& p : op.params) {
          NodeId pn = b.add_child(on, NodeKind::Parameter, p.name, p.loc);
          b.add_meta(pn, "type", p.ty.to_string());
          if (p.concept_id) b.add_meta(pn, "concept", p.concept_id->to_string());
          if (p.unit) b.add_meta(pn, "unit", *p.unit);
          if (p.default_value) b.add_meta(pn, "default", spec::format_literal(*p.default_value));
        }
      }
    }
  }
}

}  // namespace

Aslt build_aslt(const spec::ProjectSpec& project, std::span<const spec::ComponentSpec> components)
{
  auto resolved = resolve_uses(project, components);
  AsltBuilder b;
  NodeId root = b.add_root(NodeKind::Project, project.name, project.loc);
  for (const auto& c : project.connections) b.add_meta(root, "connect", c.to_string());
  for (const auto& d : project.demands) b.add_meta(root, "demand", d.to_string());
  for (std::size_t i = 0; i < resolved.size(); ++i) {
    add_component(b, root, *resolved[i], &project.uses[i], false);
  }
  return std::move(b).build();
}

Aslt build_component_aslt(const spec::ComponentSpec& component)
{
  AsltBuilder b;
  add_component(b, 0, component, nullptr, true);
  return std::move(b).build();
}

Aslt attach_meta(const Aslt& tree, NodeId target, std::string key, std::string value)
{
  if (!tree.contains(target)) throw Error(ErrorCode::NoNode, "node " + std::to_string(target) + " does not exist");
  if (tree.nodes_[target].kind == NodeKind::Meta) {
    throw Error(ErrorCode::MetaOnMeta, "node " + std::to_string(target) + " is a meta node");
  }
  Aslt out = tree;
  AsltNode n;
  n.id = static_cast<NodeId>(out.nodes_.size());
  n.kind = NodeKind::Meta;
  n.label = std::move(key);
  n.value = std::move(value);
  n.parent = target;
  out.nodes_[target].meta_children.push_back(n.id);
  out.nodes_.push_back(std::move(n));
  return out;
}

bool glob_match(std::string_view pattern, std::string_view text)
{
  std::size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

FoldPattern FoldPattern::parse(std::string_view text)
{
  FoldPattern pat;
  auto colon = text.find(':');
  std::string_view kind_text = text.substr(0, colon);
  if (kind_text != "*" && !kind_text.empty()) {
    auto k = kind_from_string(kind_text);
    if (!k) throw Error(ErrorCode::BadKind, "unknown node kind '" + std::string(kind_text) + "'");
    pat.kind = *k;
  }
  if (colon != std::string_view::npos) pat.label_glob = std::string(text.substr(colon + 1));
  return pat;
}

FoldPattern FoldPattern::nothing()
{
  FoldPattern pat;
  pat.match_none_ = true;
  return pat;
}

bool FoldPattern::matches(const AsltNode& node) const
{
  if (match_none_) return false;
  if (kind && node.kind != *kind) return false;
  if (label_glob && !glob_match(*label_glob, node.label)) return false;
  return true;
}

std::vector<NodeId> FoldView::hidden_roots() const
{
  std::vector<NodeId> out;
  for (NodeId id : hidden_) {
    bool covered = false;
    for (auto p = base_->node(id).parent; p; p = base_->node(*p).parent) {
      if (hidden_.count(*p)) {
        covered = true;
        break;
      }
    }
    if (!covered) out.push_back(id);
  }
  return out;
}

bool FoldView::is_visible(NodeId id) const
{
  for (std::optional<NodeId> cur = id; cur; cur = base_->node(*cur).parent) {
    if (hidden_.count(*cur)) return false;
  }
  return true;
}

FoldView fold(const Aslt& tree, const FoldPattern& pattern)
{
  std::set<NodeId> hidden;
  for (const auto& n : tree.nodes()) {
    if (pattern.matches(n)) hidden.insert(n.id);
  }
  return FoldView(tree, std::move(hidden));
}

namespace {

void walk(const Aslt& tree, NodeId id, int depth, const std::set<NodeId>* hidden, std::vector<Visit>& out)
{
  if (hidden && hidden->count(id)) return;
  out.push_back({id, depth});
  const auto& n = tree.node(id);
  for (NodeId m : n.meta_children) walk(tree, m, depth + 1, hidden, out);
  for (NodeId c : n.children) walk(tree, c, depth + 1, hidden, out);
}

}  // namespace

std::vector<Visit> traverse(const Aslt& tree)
{
  std::vector<Visit> out;
  out.reserve(tree.size());
  walk(tree, tree.root(), 0, nullptr, out);
  return out;
}

std::vector<Visit> traverse(const FoldView& view)
{
  std::vector<Visit> out;
  walk(view.base(), view.base().root(), 0, &view.hidden(), out);
  return out;
}

std::string dump(const Aslt& tree, std::span<const Visit> order)
{
  std::string out;
  for (const auto& v : order) {
    const auto& n = tree.node(v.id);
    out.append(static_cast<std::size_t>(v.depth) * 2, ' ');
    out += to_string(n.kind);
    out += ' ';
    out += n.label;
    if (n.kind == NodeKind::Meta) {
      out += '=';
      out += n.value;
    }
    out += '\n';
  }
  return out;
}

}  // namespace adapterforge::aslt
