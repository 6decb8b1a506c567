#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adapterforge/spec.hpp"

namespace adapterforge::aslt {

using NodeId = std::uint32_t;

enum class NodeKind { Project, Component, Interface, Operation, Parameter, Meta };

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> kind_from_string(std::string_view name);

struct AsltNode {
  NodeId id = 0;
  NodeKind kind = NodeKind::Project;
  std::string label;  // element name, or the key for meta nodes
  std::string value;  // meta nodes only
  std::optional<NodeId> parent;
  std::vector<NodeId> children;
  std::vector<NodeId> meta_children;

  bool operator==(const AsltNode&) const = default;
};

/// Abstract Syntax Language Tree: the hierarchical element model over specs.
/// Immutable once built; modifications return new trees.
class Aslt {
 public:
  NodeId root() const { return root_; }
  std::size_t size() const { return nodes_.size(); }
  const AsltNode& node(NodeId id) const;
  bool contains(NodeId id) const { return id < nodes_.size(); }
  std::span<const AsltNode> nodes() const { return nodes_; }
  const std::map<NodeId, spec::SourceLoc>& source_map() const { return source_map_; }

  std::optional<NodeId> find_child(NodeId parent, NodeKind kind, std::string_view label) const;
  std::optional<std::string> meta_value(NodeId owner, std::string_view key) const;
  /// Node count of the subtree rooted at `id`, meta nodes included.
  std::size_t subtree_size(NodeId id) const;

  /// Full-walk structural check (parent links, single parent, acyclic, kind hierarchy).
  /// Returns human-readable problems; empty when the tree is sound.
  std::vector<std::string> integrity_problems() const;

  bool operator==(const Aslt& o) const { return root_ == o.root_ && nodes_ == o.nodes_; }

 private:
  friend class AsltBuilder;
  friend Aslt attach_meta(const Aslt&, NodeId, std::string, std::string);

  NodeId root_ = 0;
  std::vector<AsltNode> nodes_;
  std::map<NodeId, spec::SourceLoc> source_map_;
};

/// Incremental construction; ids are assigned in call order, so callers that add
/// nodes in preorder get dense preorder ids.
class AsltBuilder {
 public:
  /// Root must be a project or component node.
  NodeId add_root(NodeKind kind, std::string label, const spec::SourceLoc& loc = {});
  /// Enforces project→component→interface→operation→parameter; throws E_BAD_KIND.
  NodeId add_child(NodeId parent, NodeKind kind, std::string label, const spec::SourceLoc& loc = {});
  NodeId add_meta(NodeId parent, std::string key, std::string value);

  Aslt build() &&;

 private:
  Aslt tree_;
  bool has_root_ = false;
};

/// Resolves `uses` entries to component specs: same name, admitted version, highest
/// admitted version wins. Throws E_UNRESOLVED.
std::vector<const spec::ComponentSpec*> resolve_uses(const spec::ProjectSpec& project,
                                                     std::span<const spec::ComponentSpec> components);

/// Project root, one component per `uses` entry in order, interfaces by (direction, name),
/// operations and parameters in declaration order, annotations as meta children.
Aslt build_aslt(const spec::ProjectSpec& project, std::span<const spec::ComponentSpec> components);
Aslt build_component_aslt(const spec::ComponentSpec& component);

/// Returns a copy with one meta node appended under `target`. Existing ids are unchanged.
/// Throws E_NO_NODE, E_META_ON_META.
Aslt attach_meta(const Aslt& tree, NodeId target, std::string key, std::string value);

/// Matches nodes by kind and/or label glob (`*`, `?`). Text form: "kind", "kind:glob" or "*:glob".
struct FoldPattern {
  std::optional<NodeKind> kind;
  std::optional<std::string> label_glob;

  static FoldPattern parse(std::string_view text);
  static FoldPattern nothing();
  bool matches(const AsltNode& node) const;

 private:
  bool match_none_ = false;
};

bool glob_match(std::string_view pattern, std::string_view text);

/// Non-destructive overlay hiding matched nodes together with their subtrees.
class FoldView {
 public:
  FoldView(const Aslt& base, std::set<NodeId> hidden) : base_(&base), hidden_(std::move(hidden)) {}

  const Aslt& base() const { return *base_; }
  const std::set<NodeId>& hidden() const { return hidden_; }
  /// Hidden nodes with no hidden ancestor.
  std::vector<NodeId> hidden_roots() const;
  bool is_visible(NodeId id) const;

 private:
  const Aslt* base_;
  std::set<NodeId> hidden_;
};

FoldView fold(const Aslt& tree, const FoldPattern& pattern);

struct Visit {
  NodeId id;
  int depth;
  bool operator==(const Visit&) const = default;
};

/// Preorder; a node's meta children precede its structural children.
std::vector<Visit> traverse(const Aslt& tree);
std::vector<Visit> traverse(const FoldView& view);

/// Line-oriented `<indent><kind> <label>` rendering (two spaces per depth level).
/// Meta nodes render as `meta key=value`.
std::string dump(const Aslt& tree, std::span<const Visit> order);

}  // namespace adapterforge::aslt
