#include <gtest/gtest.h>

#include <algorithm>

#include "blockroute/blocks.hpp"
#include "blockroute/graphs.hpp"
#include "blockroute/random.hpp"

using namespace blockroute;

namespace {

HostGraph path_graph(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex v = 0; v + 1 < n; ++v) e.emplace_back(v, v + 1);
  return HostGraph::from_edges(n, e);
}

}  // namespace

TEST(PlaceBlocks, K4SingleBlockIsWholeGraph) {
  const auto g = generate_regular(4, 3, 0);
  const auto cfg = place_blocks(g, 1, 2, 0, 1);
  ASSERT_EQ(cfg.block_count(), 1u);
  EXPECT_EQ(cfg.blocks[0], (VertexSet{0, 1, 2, 3}));
  EXPECT_DOUBLE_EQ(cfg.occupancy(), 1.0);
  EXPECT_TRUE(audit_block_configuration(g, cfg).empty());
}

TEST(PlaceBlocks, CapacityExceededIsPlacementError) {
  const auto g = generate_regular(10, 3, 2);
  EXPECT_THROW(place_blocks(g, 3, 2, 1, 1), PlacementError);
}

TEST(PlaceBlocks, PackingCapIsEnforced) {
  const auto g = generate_regular(40, 4, 2);
  PlacementOptions opt;
  opt.packing_cap = 0.5;
  EXPECT_THROW(place_blocks(g, 6, 2, 1, 1, opt), PlacementError);  // 24/40 > 0.5
  EXPECT_NO_THROW(place_blocks(g, 5, 2, 1, 1, opt));
}

TEST(PlaceBlocks, OverConstrainedGuardFailsAfterRestarts) {
  // A path of 20 vertices cannot hold 4 blocks of 4 with pairwise gap >= 3.
  const auto g = path_graph(20);
  EXPECT_THROW(place_blocks(g, 4, 2, 3, 1), PlacementError);
}

TEST(PlaceBlocks, TableSizedConfigurationPassesAudit) {
  const auto g = generate_regular(2000, 100, 7);
  const auto cfg = place_blocks(g, 32, 7, 1, 11);
  EXPECT_EQ(cfg.block_count(), 32u);
  EXPECT_EQ(cfg.s, 49u);
  for (const auto& b : cfg.blocks) EXPECT_EQ(b.size(), 49u);
  EXPECT_TRUE(audit_block_configuration(g, cfg).empty());
}

TEST(PlaceBlocks, GuardDistanceHoldsOnSparseHosts) {
  for (std::uint32_t guard : {0u, 1u, 2u, 3u}) {
    const auto g = generate_regular(600, 3, guard);
    const auto cfg = place_blocks(g, 6, 2, guard, 5);
    EXPECT_TRUE(audit_block_configuration(g, cfg).empty()) << "guard " << guard;
    for (std::size_t i = 0; i < cfg.block_count(); ++i) {
      for (std::size_t j = i + 1; j < cfg.block_count(); ++j) {
        EXPECT_GE(set_distance(g, std::span<const Vertex>(cfg.blocks[i]), std::span<const Vertex>(cfg.blocks[j])),
                  guard);
      }
    }
  }
}

TEST(PlaceBlocks, DeterministicForFixedSeed) {
  const auto g = generate_regular(500, 6, 1);
  EXPECT_EQ(place_blocks(g, 8, 3, 2, 42).blocks, place_blocks(g, 8, 3, 2, 42).blocks);
}

TEST(PlaceBlocks, AuditCatchesBrokenConfiguration) {
  const auto g = path_graph(10);
  BlockConfiguration cfg;
  cfg.d_C = 2;
  cfg.s = 4;
  cfg.guard = 2;
  cfg.blocks = {{0, 1, 2, 3}, {4, 5, 7, 8}};  // second block disconnected, gap 1 < guard
  cfg.reindex(10);
  const auto problems = audit_block_configuration(g, cfg);
  EXPECT_EQ(problems.size(), 2u);
}

TEST(DeformationEnergy, RigidPlacementIsZero) {
  const auto g = generate_regular(60, 5, 3);
  const VertexSet ball{0, 1, 2, 3, 4, 5};
  const auto t = induced_template(g, ball);
  EXPECT_EQ(deformation_energy(g, t), 0u);
}

TEST(DeformationEnergy, OneStretchedEdgeIsOne) {
  const auto g = path_graph(4);
  BlockTemplate t;
  t.edges = {{0, 1}, {1, 2}};
  t.positions = {0, 1, 3};  // second edge now spans distance 2
  EXPECT_EQ(deformation_energy(g, t), 1u);
}

TEST(DeformationEnergy, TriangleOnPathIsOne) {
  const auto g = path_graph(3);
  BlockTemplate t;
  t.edges = {{0, 1}, {1, 2}, {0, 2}};
  t.positions = {0, 1, 2};
  EXPECT_EQ(deformation_energy(g, t), 1u);
}

TEST(DeformationEnergy, InvariantUnderRelabeling) {
  const auto g = generate_regular(80, 4, 9);
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    BlockTemplate t;
    for (std::uint32_t i = 0; i < 6; ++i) t.positions.push_back(static_cast<Vertex>(10 * i + rng.below(10)));
    for (std::uint32_t i = 0; i < 6; ++i) {
      for (std::uint32_t j = i + 1; j < 6; ++j) {
        if (rng.below(2)) t.edges.emplace_back(i, j);
      }
    }
    std::vector<std::uint32_t> relabel{3, 0, 5, 1, 4, 2};
    BlockTemplate u;
    u.positions.resize(6);
    for (std::uint32_t i = 0; i < 6; ++i) u.positions[relabel[i]] = t.positions[i];
    for (auto [a, b] : t.edges) u.edges.emplace_back(relabel[a], relabel[b]);
    EXPECT_EQ(deformation_energy(g, t), deformation_energy(g, u));
  }
}

TEST(DeformationEnergy, ZeroIffEveryEdgeOnHostEdge) {
  const auto g = generate_regular(50, 3, 4);
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    BlockTemplate t;
    VertexSet pos;
    while (pos.size() < 4) {
      const auto v = static_cast<Vertex>(rng.below(50));
      if (std::find(pos.begin(), pos.end(), v) == pos.end()) pos.push_back(v);
    }
    t.positions = pos;
    t.edges = {{0, 1}, {1, 2}, {2, 3}};
    bool all_adjacent = true;
    for (auto [a, b] : t.edges) all_adjacent = all_adjacent && g.has_edge(pos[a], pos[b]);
    EXPECT_EQ(deformation_energy(g, t) == 0, all_adjacent);
  }
}

TEST(DeformationEnergy, UnreachablePairRejected) {
  const auto g = HostGraph::from_edges(4, std::vector<std::pair<Vertex, Vertex>>{{0, 1}, {2, 3}});
  BlockTemplate t;
  t.edges = {{0, 1}};
  t.positions = {0, 2};
  EXPECT_THROW(deformation_energy(g, t), PreconditionError);
}

TEST(DeformationEnergy, NonInjectivePositionsRejected) {
  const auto g = path_graph(3);
  BlockTemplate t;
  t.edges = {{0, 1}};
  t.positions = {1, 1};
  EXPECT_THROW(deformation_energy(g, t), ContractViolation);
}
