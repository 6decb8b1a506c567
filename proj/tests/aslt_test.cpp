#include "adapterforge/aslt.hpp"

#include <gtest/gtest.h>

#include <functional>

#include "adapterforge/error.hpp"
#include "adapterforge/spec_lang.hpp"
#include "generators.hpp"
#include "support.hpp"

namespace adapterforge::aslt {
namespace {

spec::ComponentSpec one_op_component()
{
  return spec::parse_component(R"(component "A" version "1.0.0" {
  provides interface Sorting {
    @concept(data.sorting.sort)
    op sort(items: list<i32>, ascending: bool = true) -> list<i32>;
  }
})");
}

spec::ProjectSpec project_using(const std::string& name)
{
  spec::ProjectSpec p;
  p.name = "p";
  p.uses.push_back({name, {}, {}});
  return p;
}

ErrorCode code_of(const std::function<void()>& fn)
{
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::Syntax;
}

std::size_t count_kind(const Aslt& tree, std::span<const Visit> order, NodeKind kind)
{
  std::size_t n = 0;
  for (const auto& v : order) n += tree.node(v.id).kind == kind ? 1 : 0;
  return n;
}

TEST(BuildAslt, EmptyProjectIsSingleNode)
{
  spec::ProjectSpec p;
  p.name = "empty";
  auto tree = build_aslt(p, {});
  EXPECT_EQ(tree.size(), 1u);
  auto order = traverse(tree);
  ASSERT_EQ(order.size(), 1u);
  EXPECT_EQ(order[0], (Visit{tree.root(), 0}));
}

TEST(BuildAslt, CountsStructuralNodesAndMeta)
{
  std::vector<spec::ComponentSpec> cs{one_op_component()};
  auto tree = build_aslt(project_using("A"), cs);
  auto view = fold(tree, FoldPattern::parse("meta"));
  auto visible = traverse(view);
  EXPECT_EQ(visible.size(), 6u);
  std::vector<int> depths;
  for (const auto& v : visible) depths.push_back(v.depth);
  EXPECT_EQ(depths, (std::vector<int>{0, 1, 2, 3, 4, 4}));
  EXPECT_GT(tree.size(), 6u);
  EXPECT_EQ(count_kind(tree, visible, NodeKind::Meta), 0u);
  EXPECT_TRUE(tree.integrity_problems().empty());
}

TEST(BuildAslt, IdsAreDensePreorder)
{
  std::vector<spec::ComponentSpec> cs{one_op_component()};
  auto tree = build_aslt(project_using("A"), cs);
  auto order = traverse(tree);
  ASSERT_EQ(order.size(), tree.size());
  for (std::size_t i = 0; i < order.size(); ++i) EXPECT_EQ(order[i].id, i);
}

TEST(BuildAslt, UnresolvedUse)
{
  EXPECT_EQ(code_of([] { build_aslt(project_using("Missing"), {}); }), ErrorCode::Unresolved);
}

TEST(BuildAslt, VersionConstraintPicksHighestAdmitted)
{
  auto a1 = one_op_component();
  auto a2 = one_op_component();
  a2.version = {1, 4, 0};
  auto a3 = one_op_component();
  a3.version = {2, 0, 0};
  std::vector<spec::ComponentSpec> cs{a1, a2, a3};
  auto p = project_using("A");
  p.uses[0].constraint = *spec::VersionConstraint::parse(">=1.1.0");
  auto resolved = resolve_uses(p, cs);
  ASSERT_EQ(resolved.size(), 1u);
  EXPECT_EQ(resolved[0]->version, (spec::Version{2, 0, 0}));
  p.uses[0].constraint = *spec::VersionConstraint::parse("=1.4.0");
  EXPECT_EQ(resolve_uses(p, cs)[0]->version, (spec::Version{1, 4, 0}));
}

TEST(BuildAslt, PureFunctionOfInputs)
{
  auto dir = testing::corpus_dir("bridge");
  std::vector<spec::ComponentSpec> cs{spec::parse_component(testing::read_file(dir / "clock.cdl")),
                                      spec::parse_component(testing::read_file(dir / "scheduler.cdl"))};
  auto p = spec::parse_project(testing::read_file(dir / "project.pdl"));
  auto first = build_aslt(p, cs);
  auto second = build_aslt(p, cs);
  EXPECT_EQ(first, second);
  auto order = traverse(first);
  EXPECT_TRUE(testing::matches_golden("bridge.aslt", dump(first, order)));
}

TEST(AttachMeta, OnRootAddsOneNode)
{
  std::vector<spec::ComponentSpec> cs{one_op_component()};
  auto tree = build_aslt(project_using("A"), cs);
  auto next = attach_meta(tree, tree.root(), "owner", "team");
  EXPECT_EQ(next.size(), tree.size() + 1);
  for (NodeId id = 0; id < tree.size(); ++id) {
    EXPECT_EQ(next.node(id).kind, tree.node(id).kind);
    EXPECT_EQ(next.node(id).label, tree.node(id).label);
  }
  EXPECT_EQ(next.meta_value(next.root(), "owner"), "team");
  EXPECT_EQ(tree.size() + 1, next.size());
}

TEST(AttachMeta, OnMetaNodeRejected)
{
  std::vector<spec::ComponentSpec> cs{one_op_component()};
  auto tree = build_aslt(project_using("A"), cs);
  auto next = attach_meta(tree, tree.root(), "k", "v");
  NodeId meta = next.node(next.root()).meta_children.back();
  EXPECT_EQ(code_of([&] { attach_meta(next, meta, "x", "y"); }), ErrorCode::MetaOnMeta);
  EXPECT_EQ(code_of([&] { attach_meta(next, 100000, "x", "y"); }), ErrorCode::NoNode);
}

TEST(AttachMeta, SameKeyTwicePreservesOrder)
{
  std::vector<spec::ComponentSpec> cs{one_op_component()};
  auto tree = build_aslt(project_using("A"), cs);
  auto t1 = attach_meta(tree, tree.root(), "tag", "first");
  auto t2 = attach_meta(t1, t1.root(), "tag", "second");
  const auto& metas = t2.node(t2.root()).meta_children;
  ASSERT_GE(metas.size(), 2u);
  EXPECT_EQ(t2.node(metas[metas.size() - 2]).value, "first");
  EXPECT_EQ(t2.node(metas.back()).value, "second");
}

TEST(AttachMeta, IntegrityAfterRandomSequences)
{
  testing::Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    auto tree = testing::random_tree(rng, 40);
    for (int k = 0; k < 10; ++k) {
      NodeId target = static_cast<NodeId>(testing::uniform(rng, 0, static_cast<int>(tree.size()) - 1));
      if (tree.node(target).kind == NodeKind::Meta) continue;
      tree = attach_meta(tree, target, "k" + std::to_string(k), "v");
    }
    EXPECT_TRUE(tree.integrity_problems().empty());
  }
}

TEST(Builder, EnforcesKindHierarchy)
{
  AsltBuilder b;
  auto root = b.add_root(NodeKind::Project, "p");
  EXPECT_EQ(code_of([&] { b.add_child(root, NodeKind::Operation, "op"); }), ErrorCode::BadKind);
  auto comp = b.add_child(root, NodeKind::Component, "C");
  EXPECT_EQ(code_of([&] { b.add_child(comp, NodeKind::Parameter, "x"); }), ErrorCode::BadKind);
}

TEST(Fold, NothingEqualsBase)
{
  std::vector<spec::ComponentSpec> cs{one_op_component()};
  auto tree = build_aslt(project_using("A"), cs);
  EXPECT_EQ(traverse(fold(tree, FoldPattern::nothing())), traverse(tree));
  EXPECT_EQ(traverse(fold(tree, FoldPattern::parse("interface:NoSuch*"))), traverse(tree));
}

TEST(Fold, InterfaceFoldAgreesWithRecount)
{
  auto dir = testing::corpus_dir("bridge");
  std::vector<spec::ComponentSpec> cs{spec::parse_component(testing::read_file(dir / "clock.cdl")),
                                      spec::parse_component(testing::read_file(dir / "scheduler.cdl"))};
  auto tree = build_aslt(spec::parse_project(testing::read_file(dir / "project.pdl")), cs);
  auto view = fold(tree, FoldPattern::parse("interface"));
  // Recount: walk parent links and reject any node with an interface on its ancestor chain.
  std::size_t expected = 0;
  for (const auto& n : tree.nodes()) {
    bool hidden = false;
    for (std::optional<NodeId> cur = n.id; cur; cur = tree.node(*cur).parent) {
      if (tree.node(*cur).kind == NodeKind::Interface) hidden = true;
    }
    expected += hidden ? 0 : 1;
  }
  EXPECT_EQ(traverse(view).size(), expected);
  EXPECT_EQ(expected, 8u);
}

TEST(Fold, ConservationOverRandomTrees)
{
  testing::Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    auto tree = testing::random_tree(rng, 60);
    auto view = fold(tree, testing::random_pattern(rng, tree));
    std::size_t hidden = 0;
    for (NodeId r : view.hidden_roots()) hidden += tree.subtree_size(r);
    EXPECT_EQ(traverse(view).size() + hidden, tree.size());
    for (const auto& v : traverse(view)) EXPECT_FALSE(view.hidden().count(v.id));
  }
}

TEST(Fold, PatternParsing)
{
  AsltNode n;
  n.kind = NodeKind::Operation;
  n.label = "sortAsc";
  EXPECT_TRUE(FoldPattern::parse("operation").matches(n));
  EXPECT_TRUE(FoldPattern::parse("operation:sort*").matches(n));
  EXPECT_TRUE(FoldPattern::parse("*:s?rtAsc").matches(n));
  EXPECT_FALSE(FoldPattern::parse("interface:*").matches(n));
  EXPECT_FALSE(FoldPattern::nothing().matches(n));
  EXPECT_TRUE(glob_match("a*c", "abbbc"));
  EXPECT_FALSE(glob_match("a?c", "abbc"));
}

TEST(Traverse, SingleNode)
{
  AsltBuilder b;
  b.add_root(NodeKind::Component, "C");
  auto tree = std::move(b).build();
  EXPECT_EQ(traverse(tree), (std::vector<Visit>{{0, 0}}));
  EXPECT_EQ(dump(tree, traverse(tree)), "component C\n");
}

}  // namespace
}  // namespace adapterforge::aslt
