#include <gtest/gtest.h>

#include <map>
#include <set>

#include "blockroute/blocks.hpp"
#include "blockroute/graphs.hpp"
#include "blockroute/hop.hpp"
#include "blockroute/random.hpp"
#include "oracles.hpp"

using namespace blockroute;

namespace {

using EdgeList = std::vector<std::pair<Vertex, Vertex>>;
using Bipartite = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

HostGraph path_graph(std::size_t n) {
  EdgeList e;
  for (Vertex v = 0; v + 1 < n; ++v) e.emplace_back(v, v + 1);
  return HostGraph::from_edges(n, e);
}

BlockConfiguration make_config(std::size_t n, std::vector<VertexSet> blocks, std::uint32_t d_C, std::uint32_t guard) {
  BlockConfiguration cfg;
  cfg.d_C = d_C;
  cfg.s = blocks.front().size();
  cfg.guard = guard;
  cfg.blocks = std::move(blocks);
  cfg.reindex(n);
  return cfg;
}

Bipartite random_multigraph(Rng& rng) {
  const std::size_t m = 1 + rng.below(12);
  const std::uint32_t left = 1 + static_cast<std::uint32_t>(rng.below(5));
  const std::uint32_t right = 1 + static_cast<std::uint32_t>(rng.below(5));
  Bipartite edges;
  for (std::size_t i = 0; i < m; ++i) {
    edges.emplace_back(static_cast<std::uint32_t>(rng.below(left)), static_cast<std::uint32_t>(rng.below(right)));
  }
  return edges;
}

std::uint32_t max_degree(const Bipartite& edges) {
  std::map<std::uint32_t, std::uint32_t> l, r;
  std::uint32_t best = 0;
  for (auto [a, b] : edges) best = std::max({best, ++l[a], ++r[b]});
  return best;
}

// Length-1 atom moves realizing a bipartite multigraph: left id a sits at
// host vertex a, right id b at host vertex 100 + b.
HopPlan plan_from_multigraph(const Bipartite& edges) {
  HopPlan plan;
  for (auto [a, b] : edges) plan.moves.push_back({a, {a, 100 + b}});
  plan.dilation = 1;
  return plan;
}

}  // namespace

TEST(PlanBlockHop, StayingPutIsFree) {
  const auto g = generate_regular(200, 4, 1);
  const auto cfg = place_blocks(g, 4, 3, 1, 2);
  const auto plan = decompose_hop_into_matchings(plan_block_hop(g, cfg, 1, cfg.blocks[1]));
  for (const auto& m : plan.moves) EXPECT_EQ(m.length(), 0u);
  EXPECT_EQ(plan.congestion, 0u);
  EXPECT_EQ(plan.dilation, 0u);
  EXPECT_EQ(plan.rounds(), 0u);
  EXPECT_TRUE(audit_hop_plan(g, plan).empty());
}

TEST(PlanBlockHop, SingleAtomToNeighborIsOneRound) {
  const auto g = path_graph(8);
  const auto cfg = make_config(8, {{1}, {6}}, 1, 1);
  const auto plan = decompose_hop_into_matchings(plan_block_hop(g, cfg, 0, {2}));
  ASSERT_EQ(plan.moves.size(), 1u);
  EXPECT_EQ(plan.moves[0].path, (std::vector<Vertex>{1, 2}));
  EXPECT_EQ(plan.rounds(), 1u);
  EXPECT_TRUE(plan.edge_colored);
  EXPECT_TRUE(audit_hop_plan(g, plan).empty());
}

TEST(PlanBlockHop, OutOfRangeIsHopInfeasible) {
  // Range is d_C + guard + 1 = 3 hops.
  const auto g = path_graph(12);
  const auto cfg = make_config(12, {{0}, {11}}, 1, 1);
  EXPECT_NO_THROW(plan_block_hop(g, cfg, 0, {3}));
  EXPECT_THROW(plan_block_hop(g, cfg, 0, {5}), HopInfeasibleError);
}

TEST(PlanBlockHop, RejectsBadTargets) {
  const auto g = path_graph(10);
  const auto cfg = make_config(10, {{0, 1}, {5, 6}}, 1, 2);
  EXPECT_THROW(plan_block_hop(g, cfg, 0, {2}), PreconditionError);         // wrong size
  EXPECT_THROW(plan_block_hop(g, cfg, 0, {2, 2}), PreconditionError);      // not distinct
  EXPECT_THROW(plan_block_hop(g, cfg, 0, {4, 5}), PreconditionError);      // overlaps block 1
  EXPECT_THROW(plan_block_hop(g, cfg, 0, {2, 4}), PreconditionError);      // 4 is inside the guard of block 1
  EXPECT_THROW(plan_block_hop(g, cfg, 7, {2, 3}), PreconditionError);      // no such block
  EXPECT_NO_THROW(plan_block_hop(g, cfg, 0, {2, 3}));
}

TEST(PlanBlockHop, AssignmentMinimizesTotalLength) {
  // Shifting {0,1,2} to {1,2,3} costs 3 hops total, however the atoms pair up.
  const auto g = path_graph(10);
  const auto cfg = make_config(10, {{0, 1, 2}, {7, 8, 9}}, 2, 1);
  const auto plan = plan_block_hop(g, cfg, 0, {1, 2, 3});
  std::size_t total = 0;
  std::set<Vertex> targets;
  for (const auto& m : plan.moves) {
    total += m.length();
    targets.insert(m.target());
  }
  EXPECT_EQ(total, 3u);
  EXPECT_EQ(targets, (std::set<Vertex>{1, 2, 3}));
}

TEST(ProposeHopTarget, FindsFreeGuardedFootprint) {
  const auto g = generate_regular(1000, 20, 3);
  const auto cfg = place_blocks(g, 8, 4, 1, 6);
  for (BlockId b = 0; b < cfg.block_count(); ++b) {
    const auto target = propose_hop_target(g, cfg, b, 100 + b);
    ASSERT_EQ(target.size(), cfg.s);
    for (Vertex v : target) EXPECT_EQ(cfg.footprint[v], kNoBlock);
  }
}

TEST(ProposeHopTarget, NoRoomIsPlacementError) {
  const auto g = generate_regular(4, 3, 0);
  const auto cfg = make_config(4, {{0, 1, 2, 3}}, 2, 0);
  EXPECT_THROW(propose_hop_target(g, cfg, 0, 1), PlacementError);
}

TEST(EdgeColoring, SingleEdgeOneMatching) {
  const auto plan = decompose_hop_into_matchings(plan_from_multigraph({{0, 0}}));
  EXPECT_EQ(plan.rounds(), 1u);
}

TEST(EdgeColoring, MatchesBruteForceMinimum) {
  Rng rng(31);
  for (int t = 0; t < 200; ++t) {
    const auto edges = random_multigraph(rng);
    const auto delta = max_degree(edges);
    std::uint32_t colors = 0;
    const auto color = bipartite_edge_coloring(edges, &colors);
    EXPECT_EQ(colors, delta);
    EXPECT_EQ(colors, oracle::min_edge_colors(edges));
    for (std::size_t i = 0; i < edges.size(); ++i) {
      ASSERT_LT(color[i], colors);
      for (std::size_t j = i + 1; j < edges.size(); ++j) {
        if (edges[i].first == edges[j].first || edges[i].second == edges[j].second) EXPECT_NE(color[i], color[j]);
      }
    }
    const auto plan = decompose_hop_into_matchings(plan_from_multigraph(edges));
    EXPECT_TRUE(plan.edge_colored);
    EXPECT_EQ(plan.rounds(), delta);
  }
}

TEST(DecomposeHop, RoundsBoundedOnPlacedBlocks) {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto g = generate_regular(2000, 100, seed);
    const auto cfg = place_blocks(g, 16, 7, 1, seed);
    const BlockId b = static_cast<BlockId>(seed % cfg.block_count());
    const auto plan = decompose_hop_into_matchings(plan_block_hop(g, cfg, b, propose_hop_target(g, cfg, b, seed)));
    EXPECT_TRUE(audit_hop_plan(g, plan).empty());
    EXPECT_GE(plan.rounds(), std::max(plan.congestion, plan.dilation));
    EXPECT_LE(plan.rounds(), 3u * cfg.d_C);
    ++checked;
  }
  EXPECT_EQ(checked, 6u);
}

TEST(DecomposeHop, AuditCatchesDroppedRound) {
  const auto g = path_graph(10);
  const auto cfg = make_config(10, {{0, 1, 2}, {7, 8, 9}}, 2, 1);
  auto plan = decompose_hop_into_matchings(plan_block_hop(g, cfg, 0, {3, 4, 5}));
  ASSERT_FALSE(plan.matchings.empty());
  plan.matchings.pop_back();
  EXPECT_FALSE(audit_hop_plan(g, plan).empty());
}
