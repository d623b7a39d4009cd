#include "topogen/tree.hpp"

#include <gtest/gtest.h>

#include <random>

#include "support/oracles.hpp"
#include "topogen/synth.hpp"

namespace topogen {
namespace {

// Compact 12-node testbed where only root 8 at beta = 46 reaches two full
// levels under kappa(d) = d + 1: 8 -> {5, 12} -> {4, 7, 10}.
LossMatrix compact_tree_fixture() {
  LossMatrix m(26);
  for (NodeId a = 1; a <= 12; ++a) {
    for (NodeId b = 1; b <= 12; ++b) {
      if (a != b) m.set_entry(a, b, {70, 2.0, 250});
    }
  }
  auto link = [&](NodeId a, NodeId b, double loss) {
    m.set_entry(a, b, {loss, 2.0, 250});
    m.set_entry(b, a, {loss, 2.0, 250});
  };
  link(8, 5, 43);
  link(8, 12, 43);
  link(5, 4, 46);
  link(5, 7, 46);
  link(12, 10, 46);
  return m;
}

TEST(Kappa, ParseAndEvaluate) {
  EXPECT_EQ(Kappa::parse("linear")(4), 5u);
  EXPECT_EQ(Kappa::parse("const:3")(9), 3u);
  const auto t = Kappa::parse("table:2=3,1=2");
  EXPECT_EQ(t(1), 2u);
  EXPECT_EQ(t(2), 3u);
  EXPECT_EQ(t(7), 3u);
  EXPECT_EQ(t.to_string(), "table:1=2,2=3");
  EXPECT_EQ(Kappa::parse(t.to_string()).to_string(), t.to_string());
  EXPECT_THROW(Kappa::parse("const:0"), InputError);
  EXPECT_THROW(Kappa::parse("table:1=2,3=1"), InputError);
  EXPECT_THROW(Kappa::parse("table:1=0"), InputError);
  EXPECT_THROW(Kappa::parse("table:1=2,1=3"), InputError);
  EXPECT_THROW(Kappa::parse("quadratic"), InputError);
}

TEST(MonitoredBfs, IsolatedRoot) {
  LossMatrix m(26);
  m.add_node(1);
  m.set_entry(2, 3, {40, 0, 1});
  const auto t = monitored_bfs(m, 1, 50, 15, Kappa::linear());
  EXPECT_EQ(t.depth, 0u);
  EXPECT_EQ(t.levels, (std::vector<NodeSet>{{1}}));
  EXPECT_THROW(monitored_bfs(m, 9, 50, 15, Kappa::linear()), InputError);
  EXPECT_THROW(monitored_bfs(m, 1, 50, -1, Kappa::linear()), InputError);
}

TEST(MonitoredBfs, ChainFromAnEnd) {
  const auto m = chain_scenario(6, 45, 90);
  const auto t = monitored_bfs(m, 1, 50, 15, Kappa::constant(1));
  ASSERT_EQ(t.depth, 5u);
  for (std::size_t i = 0; i <= 5; ++i) EXPECT_EQ(t.levels[i], (NodeSet{static_cast<NodeId>(i + 1)}));
  EXPECT_TRUE(oracle::tree_requirements_hold(m, t, Kappa::constant(1)));

  const auto middle = monitored_bfs(m, 3, 50, 15, Kappa::constant(1));
  EXPECT_EQ(middle.depth, 3u);
  EXPECT_EQ(middle.levels[1], (NodeSet{2, 4}));
}

TEST(MonitoredBfs, PartialLevelIsDropped) {
  const auto m = chain_scenario(6, 45, 90);
  // kappa(1) = 2 fails at the first level for an end node.
  const auto t = monitored_bfs(m, 1, 50, 15, Kappa::linear());
  EXPECT_EQ(t.depth, 0u);
  EXPECT_EQ(t.levels.size(), 1u);
  // From the middle, level 1 has two nodes, level 2 only two < 3.
  const auto mid = monitored_bfs(m, 3, 50, 15, Kappa::linear());
  EXPECT_EQ(mid.depth, 1u);
  EXPECT_EQ(mid.levels, (std::vector<NodeSet>{{3}, {2, 4}}));
}

TEST(MonitoredBfs, ShortcutWithinMarginExcludesNode) {
  // 1 - 2 - 3 at 45 dB; 1 - 3 at 60 dB, above beta = 50 but within 50 + 15.
  auto m = oracle::matrix_from_edges(3, {{1, 2}, {2, 3}}, 45, 90);
  m.set_entry(1, 3, {60, 0, 250});
  m.set_entry(3, 1, {60, 0, 250});
  const auto excluded = monitored_bfs(m, 1, 50, 15, Kappa::constant(1));
  EXPECT_EQ(excluded.depth, 1u);
  EXPECT_EQ(excluded.levels, (std::vector<NodeSet>{{1}, {2}}));

  m.set_entry(1, 3, {90, 0, 250});
  m.set_entry(3, 1, {90, 0, 250});
  const auto admitted = monitored_bfs(m, 1, 50, 15, Kappa::constant(1));
  EXPECT_EQ(admitted.depth, 2u);
  EXPECT_EQ(admitted.levels[2], (NodeSet{3}));
}

TEST(MonitoredBfs, CompactTestbedCapsAtDepthTwo) {
  const auto m = compact_tree_fixture();
  const auto trees = sweep_trees(m, Kappa::linear(), 15, GraphFamily{});
  const auto& best = trees.front();
  EXPECT_EQ(best.depth, 2u);
  EXPECT_EQ(best.root, 8u);
  EXPECT_EQ(best.beta, 46.0);
  EXPECT_EQ(best.all_nodes(), (NodeSet{4, 5, 7, 8, 10, 12}));
  EXPECT_EQ(best.levels[1], (NodeSet{5, 12}));
}

// With no margin and kappa = 1 the layering is plain BFS.
TEST(MonitoredBfs, ZeroMarginEqualsPlainBfs) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = oracle::random_matrix(rng, 12, 0.8, 31, 104);
    const NodeId root = 1 + rng() % 12;
    const double beta = 31.0 + static_cast<double>(rng() % 74);
    const auto t = monitored_bfs(m, root, beta, 0, Kappa::constant(1));
    EXPECT_EQ(t.levels, oracle::bfs_layers(m, root, beta));
  }
}

TEST(MonitoredBfs, KappaMonotonicity) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = oracle::random_matrix(rng, 14, 0.8, 31, 90);
    const NodeId root = 1 + rng() % 14;
    const double beta = 40.0 + static_cast<double>(rng() % 30);
    const double margin = static_cast<double>(rng() % 16);
    const std::size_t a = monitored_bfs(m, root, beta, margin, Kappa::constant(1)).depth;
    const std::size_t b = monitored_bfs(m, root, beta, margin, Kappa::constant(2)).depth;
    const std::size_t c = monitored_bfs(m, root, beta, margin, Kappa::linear()).depth;
    EXPECT_GE(a, b);
    EXPECT_GE(b, c);
  }
}

// A larger margin usually shortens trees but can lengthen one: excluding
// node 3 at level 2 lets the longer path 2-5-6-4 claim node 4 first.
TEST(MonitoredBfs, MarginCanDeferANodeToALaterLevel) {
  auto m = oracle::matrix_from_edges(7, {{1, 2}, {2, 3}, {3, 4}, {2, 5}, {5, 6}, {6, 4}, {4, 7}}, 45, 90);
  m.set_entry(1, 3, {60, 0, 250});
  m.set_entry(3, 1, {60, 0, 250});
  EXPECT_EQ(monitored_bfs(m, 1, 50, 0, Kappa::constant(1)).depth, 4u);
  EXPECT_EQ(monitored_bfs(m, 1, 50, 5, Kappa::constant(1)).depth, 4u);
  const auto wide = monitored_bfs(m, 1, 50, 15, Kappa::constant(1));
  EXPECT_EQ(wide.depth, 5u);
  EXPECT_EQ(wide.levels, (std::vector<NodeSet>{{1}, {2}, {5}, {6}, {4}, {7}}));
  EXPECT_TRUE(oracle::tree_requirements_hold(m, wide, Kappa::constant(1)));
}

TEST(MonitoredBfs, RelabelingDoesNotChangeLevelSets) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = oracle::random_matrix(rng, 10, 0.8, 31, 90);
    std::vector<NodeId> perm{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::shuffle(perm.begin(), perm.end(), rng);
    auto relabel = [&](NodeId id) { return perm[id - 1] + 100; };
    LossMatrix shuffled(26);
    for (NodeId id : m.nodes()) shuffled.add_node(relabel(id));
    for (const auto& [pair, stats] : m.entries()) shuffled.set_entry(relabel(pair.first), relabel(pair.second), stats);
    const double beta = 40.0 + static_cast<double>(rng() % 30);
    const auto t = monitored_bfs(m, 1, beta, 10, Kappa::constant(1));
    const auto u = monitored_bfs(shuffled, relabel(1), beta, 10, Kappa::constant(1));
    ASSERT_EQ(t.levels.size(), u.levels.size());
    for (std::size_t i = 0; i < t.levels.size(); ++i) {
      NodeSet mapped;
      for (NodeId v : t.levels[i]) mapped.push_back(relabel(v));
      normalize(mapped);
      EXPECT_EQ(mapped, u.levels[i]);
    }
  }
}

TEST(SweepTrees, FullyMeshedNeverDeeperThanOne) {
  const auto m = oracle::matrix_from_edges(6, {}, 45, 50);
  const auto trees = sweep_trees(m, Kappa::linear(), 15, GraphFamily{});
  EXPECT_EQ(trees.size(), 74u * 6u);
  for (const auto& t : trees) EXPECT_LE(t.depth, 1u);
}

TEST(SweepTrees, ChainBestFromEnd) {
  const auto m = chain_scenario(6, 45, 90);
  const auto trees = sweep_trees(m, Kappa::constant(1), 15, GraphFamily{});
  EXPECT_EQ(trees.front().depth, 5u);
  EXPECT_EQ(trees.front().root, 1u);
  EXPECT_EQ(trees.front().beta, 45.0);
  for (std::size_t i = 1; i < trees.size(); ++i) EXPECT_FALSE(tree_order(trees[i], trees[i - 1]));
}

// 120 nodes scattered over a 240 m x 24 m strip with heavy shadowing.
TEST(SweepTrees, SparseTestbedGetsDeeperWithSmallerMargin) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> x(0, 240);
  std::uniform_real_distribution<double> y(0, 24);
  SynthScenario s;
  s.path_loss_exponent = 3.0;
  s.shadowing_sigma = 8.0;
  s.asymmetry_sigma = 1.0;
  s.seed = 1;
  for (NodeId id = 1; id <= 120; ++id) s.positions[id] = {x(rng), y(rng), 0};
  const auto m = generate(s);
  const auto wide = sweep_trees(m, Kappa::constant(1), 15, GraphFamily{}).front();
  const auto narrow = sweep_trees(m, Kappa::constant(1), 5, GraphFamily{}).front();
  EXPECT_GE(wide.depth, 8u);
  EXPECT_GT(wide.beta, 50.0);
  EXPECT_LT(wide.beta, 90.0);
  EXPECT_GT(narrow.depth, wide.depth);
}

TEST(SweepTrees, EveryTreeSatisfiesRequirements) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = oracle::random_matrix(rng, 10, 0.85, 31, 90);
    const auto kappa = trial % 2 ? Kappa::linear() : Kappa::constant(1);
    for (const auto& t : sweep_trees(m, kappa, 5, GraphFamily{31, 90, 3})) {
      EXPECT_TRUE(oracle::tree_requirements_hold(m, t, kappa));
      EXPECT_TRUE(revalidate(t, m, kappa).ok());
    }
  }
}

TEST(ReductionProgram, RootIsConstant) {
  const auto m = oracle::matrix_from_edges(4, {{1, 2}, {1, 3}, {2, 4}});
  const auto t = monitored_bfs(m, 1, 50, 15, Kappa::constant(1));
  const auto p = build_reduction_program(t, neighborhood_graph(m, 50), Kappa::constant(1));
  EXPECT_EQ(p.names(), (std::vector<std::string>{"x2", "x3", "x4"}));
  EXPECT_FALSE(p.find("x1").has_value());
  EXPECT_EQ(p.sense(), ilp::Sense::kMinimize);
  // breadth_1, parent_2, parent_3, breadth_2, parent_4
  ASSERT_EQ(p.constraints().size(), 5u);
  EXPECT_EQ(p.constraints()[1].rhs, 1);
  EXPECT_EQ(p.constraints()[4].terms.size(), 2u);
  EXPECT_EQ(p.constraints()[4].rhs, 0);
}

TEST(ReduceTree, MinimalTreeUnchanged) {
  const auto m = chain_scenario(6, 45, 90);
  const auto t = monitored_bfs(m, 1, 50, 15, Kappa::constant(1));
  const auto r = reduce_tree(t, m, Kappa::constant(1));
  EXPECT_EQ(r.levels, t.levels);
}

TEST(ReduceTree, DropsSurplusSiblings) {
  const auto m = oracle::matrix_from_edges(7, {{1, 2}, {1, 3}, {2, 4}, {2, 5}, {2, 6}, {2, 7}});
  const auto kappa = Kappa::parse("table:1=2,2=2");
  const auto t = monitored_bfs(m, 1, 50, 15, kappa);
  ASSERT_EQ(t.depth, 2u);
  ASSERT_EQ(t.levels[2].size(), 4u);
  const auto r = reduce_tree(t, m, kappa);
  EXPECT_EQ(r.depth, 2u);
  EXPECT_EQ(r.levels[1], (NodeSet{2, 3}));
  EXPECT_EQ(r.levels[2].size(), 2u);
  EXPECT_EQ(r.node_count(), oracle::min_reduction(m, t, kappa));
  EXPECT_EQ(r.node_count(), 5u);
}

TEST(ReduceTree, KeepsSoleParents) {
  // 1 -> {2, 3}; 2 -> 4; 3 -> 5; 4 -> 6. Only the branch through 2 and 4
  // reaches depth 3.
  const auto m = oracle::matrix_from_edges(6, {{1, 2}, {1, 3}, {2, 4}, {3, 5}, {4, 6}});
  const auto kappa = Kappa::constant(1);
  const auto t = monitored_bfs(m, 1, 50, 15, kappa);
  ASSERT_EQ(t.depth, 3u);
  const auto r = reduce_tree(t, m, kappa);
  EXPECT_EQ(r.levels, (std::vector<NodeSet>{{1}, {2}, {4}, {6}}));
  EXPECT_EQ(r.node_count(), oracle::min_reduction(m, t, kappa));
}

TEST(ReduceTree, BushyTreeBecomesAPath) {
  const auto m = oracle::matrix_from_edges(
      10, {{1, 2}, {1, 3}, {1, 4}, {2, 5}, {3, 6}, {3, 7}, {4, 8}, {6, 9}, {7, 10}});
  const auto kappa = Kappa::constant(1);
  const auto t = monitored_bfs(m, 1, 50, 15, kappa);
  ASSERT_EQ(t.depth, 3u);
  ASSERT_EQ(oracle::min_reduction(m, t, kappa), 4u);
  const auto r = reduce_tree(t, m, kappa);
  EXPECT_EQ(r.depth, 3u);
  EXPECT_EQ(r.node_count(), 4u);
  for (const auto& level : r.levels) EXPECT_EQ(level.size(), 1u);
  EXPECT_TRUE(oracle::tree_requirements_hold(m, r, kappa));
}

TEST(ReduceTree, InfeasibleInputIsReported) {
  const auto m = chain_scenario(4, 45, 90);
  auto t = monitored_bfs(m, 1, 50, 15, Kappa::constant(1));
  EXPECT_THROW(reduce_tree(t, m, Kappa::constant(2)), InputError);
}

TEST(Revalidate, SameMatrixPasses) {
  const auto m = compact_tree_fixture();
  const auto t = monitored_bfs(m, 8, 46, 15, Kappa::linear());
  EXPECT_TRUE(revalidate(t, m, Kappa::linear()).ok());
}

TEST(Revalidate, BrokenLevelLink) {
  auto m = compact_tree_fixture();
  const auto t = monitored_bfs(m, 8, 46, 15, Kappa::linear());
  m.set_entry(12, 10, {52, 2, 250});
  const auto report = revalidate(t, m, Kappa::linear());
  ASSERT_FALSE(report.ok());
  bool saw_link = false;
  bool saw_breadth = false;
  for (const auto& v : report.violations) {
    if (v.requirement == 1) {
      EXPECT_EQ(v.nodes, (NodeSet{10}));
      ASSERT_EQ(v.links.size(), 1u);
      EXPECT_EQ(v.links[0], (Edge{10, 12}));
      saw_link = true;
    }
    saw_breadth = saw_breadth || v.requirement == 3;
  }
  EXPECT_TRUE(saw_link);
  EXPECT_TRUE(saw_breadth);
}

TEST(Revalidate, NewShortcutViolatesMargin) {
  auto m = compact_tree_fixture();
  const auto t = monitored_bfs(m, 8, 46, 15, Kappa::linear());
  m.set_entry(8, 7, {58, 2, 250});
  m.set_entry(7, 8, {55, 2, 250});
  const auto report = revalidate(t, m, Kappa::linear());
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0].requirement, 4);
  EXPECT_EQ(report.violations[0].links[0], (Edge{7, 8}));
}

TEST(Revalidate, MissingNodes) {
  const auto m = compact_tree_fixture();
  const auto t = monitored_bfs(m, 8, 46, 15, Kappa::linear());
  EXPECT_THROW(revalidate(t, chain_scenario(3, 40, 80), Kappa::linear()), InputError);
}

}  // namespace
}  // namespace topogen
