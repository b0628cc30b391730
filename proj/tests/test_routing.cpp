#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "blockroute/assignment.hpp"
#include "blockroute/graphs.hpp"
#include "blockroute/random.hpp"
#include "blockroute/routing.hpp"
#include "oracles.hpp"

using namespace blockroute;

namespace {

using EdgeList = std::vector<std::pair<Vertex, Vertex>>;

HostGraph complete(std::size_t n) {
  EdgeList e;
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v) e.emplace_back(u, v);
  }
  return HostGraph::from_edges(n, e);
}

HostGraph cycle(std::size_t n) {
  EdgeList e;
  for (Vertex v = 0; v < n; ++v) e.emplace_back(v, static_cast<Vertex>((v + 1) % n));
  return HostGraph::from_edges(n, e);
}

std::size_t hops(const std::vector<Vertex>& path) { return path.size() - 1; }

}  // namespace

TEST(ValiantRoute, IdentityThroughIdentityIsFree) {
  const auto support = cycle(6);
  const auto id = identity_permutation(6);
  const auto out = route_via(support, id, id, 7);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(hops(out.scatter_paths[i]), 0u);
    EXPECT_EQ(hops(out.gather_paths[i]), 0u);
  }
  EXPECT_EQ(out.congestion, 0u);
  EXPECT_EQ(out.dilation, 0u);
  EXPECT_EQ(out.physical_depth, 0u);
  const auto sched = schedule_greedy(out);
  EXPECT_EQ(sched.scheduled_steps(), 0u);
  EXPECT_TRUE(audit_routing(support, sched).empty());
}

TEST(ValiantRoute, CompleteQuotientHasShortPaths) {
  const auto support = complete(8);
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto pi = random_permutation(8, rng);
    const auto sigma = random_permutation(8, rng);
    const auto out = route_via(support, pi, sigma, 3);
    for (std::size_t i = 0; i < 8; ++i) {
      EXPECT_LE(hops(out.scatter_paths[i]), 1u);
      EXPECT_LE(hops(out.gather_paths[i]), 1u);
    }
    EXPECT_LE(out.dilation, 2u);
    EXPECT_EQ(out.physical_depth, 3u * (out.congestion + out.dilation));
  }
}

TEST(ValiantRoute, RejectsNonPermutation) {
  const auto support = cycle(4);
  const Permutation bad{0, 0, 1, 2};
  EXPECT_THROW(route_via(support, bad, identity_permutation(4), 3), PreconditionError);
}

TEST(ValiantRoute, DisconnectedSupportRejected) {
  const auto support = HostGraph::from_edges(4, EdgeList{{0, 1}, {2, 3}});
  const Permutation swap{2, 3, 0, 1};
  EXPECT_THROW(route_via(support, swap, identity_permutation(4), 3), QuotientDisconnectedError);
}

TEST(ValiantRoute, LoadsMatchIndependentRecount) {
  Rng rng(9);
  const auto support = generate_regular(30, 3, 4);
  for (int t = 0; t < 25; ++t) {
    const auto pi = random_permutation(30, rng);
    const auto sigma = random_permutation(30, rng);
    const auto out = route_via(support, pi, sigma, 5);
    std::map<std::tuple<int, Vertex, Vertex>, std::uint32_t> arcs;
    std::map<std::pair<Vertex, Vertex>, std::uint32_t> edges;
    std::uint32_t longest = 0;
    for (std::size_t i = 0; i < 30; ++i) {
      ASSERT_EQ(out.scatter_paths[i].front(), i);
      ASSERT_EQ(out.scatter_paths[i].back(), sigma[i]);
      ASSERT_EQ(out.gather_paths[i].front(), sigma[i]);
      ASSERT_EQ(out.gather_paths[i].back(), pi[i]);
      int phase = 0;
      for (const auto* path : {&out.scatter_paths[i], &out.gather_paths[i]}) {
        for (std::size_t k = 0; k + 1 < path->size(); ++k) {
          ++arcs[{phase, (*path)[k], (*path)[k + 1]}];
          ++edges[std::minmax((*path)[k], (*path)[k + 1])];
        }
        ++phase;
      }
      longest = std::max(longest, static_cast<std::uint32_t>(hops(out.scatter_paths[i]) + hops(out.gather_paths[i])));
    }
    std::uint32_t c = 0, cc = 0;
    for (auto& [k, v] : arcs) c = std::max(c, v);
    for (auto& [k, v] : edges) cc = std::max(cc, v);
    EXPECT_EQ(out.congestion, c);
    EXPECT_EQ(out.combined_congestion, cc);
    EXPECT_EQ(out.dilation, longest);
    const auto sched = schedule_greedy(out);
    EXPECT_TRUE(audit_routing(support, sched).empty());
    EXPECT_GE(sched.scheduled_steps(), std::max(sched.congestion, sched.dilation));
  }
}

TEST(ValiantRoute, SeededDrawIsDeterministic) {
  const auto support = complete(8);
  QuotientGraph q;
  q.n_blocks = 8;
  q.support = support;
  Rng rng(1);
  const auto pi = random_permutation(8, rng);
  EXPECT_EQ(valiant_route(q, pi, 77, 3).intermediate, valiant_route(q, pi, 77, 3).intermediate);
}

TEST(ScheduleGreedy, EdgeDisjointRotationTakesOneStep) {
  // Blocks rotate one position around a 4-cycle; the four length-1 routes
  // share no edge and no destination.
  const auto support = cycle(4);
  const Permutation rotate{1, 2, 3, 0};
  const auto out = schedule_greedy(route_via(support, rotate, identity_permutation(4), 3));
  EXPECT_EQ(out.scheduled_steps(), 1u);
  EXPECT_TRUE(audit_routing(support, out).empty());
}

TEST(ScheduleGreedy, SwapAcrossOneEdgeNeedsTwoSteps) {
  // Edge capacity is one block per step in either direction.
  const auto support = complete(2);
  const Permutation swap{1, 0};
  const auto out = schedule_greedy(route_via(support, swap, identity_permutation(2), 3));
  EXPECT_EQ(out.congestion, 1u);
  EXPECT_EQ(out.scheduled_steps(), 2u);
  EXPECT_TRUE(audit_routing(support, out).empty());
}

TEST(ScheduleGreedy, AuditFlagsTamperedSchedule) {
  const auto support = cycle(4);
  const Permutation rotate{1, 2, 3, 0};
  auto out = schedule_greedy(route_via(support, rotate, identity_permutation(4), 3));
  out.schedule->front().pop_back();
  EXPECT_FALSE(audit_routing(support, out).empty());
}

TEST(ValiantRoute, CongestionTailIsLogarithmic) {
  // With sigma uniform, congestion concentrates; exceeding 6 ln N_L above
  // twice its mean should be rare.
  const std::size_t k = 64;
  const auto support = generate_regular(k, 4, 21);
  Rng rng(3);
  const auto pi = random_permutation(k, rng);
  std::vector<std::uint32_t> loads;
  for (int t = 0; t < 200; ++t) loads.push_back(route_via(support, pi, random_permutation(k, rng), 3).congestion);
  const double mean = std::accumulate(loads.begin(), loads.end(), 0.0) / static_cast<double>(loads.size());
  const double bound = 6.0 * std::log(static_cast<double>(k)) + 2.0 * mean;
  const auto above = std::count_if(loads.begin(), loads.end(), [&](auto c) { return c > bound; });
  EXPECT_LE(static_cast<double>(above) / 200.0, 0.05);
}

TEST(MinCostAssignment, MatchesBruteForce) {
  Rng rng(12);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 1 + rng.below(7);
    std::vector<std::int64_t> cost(n * n);
    for (auto& c : cost) c = static_cast<std::int64_t>(rng.below(t % 3 == 0 ? 3 : 50));
    const auto assign = min_cost_assignment(n, cost);
    ASSERT_EQ(assign.size(), n);
    std::vector<char> seen(n, 0);
    std::int64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_LT(assign[i], n);
      EXPECT_FALSE(seen[assign[i]]);
      seen[assign[i]] = 1;
      total += cost[i * n + assign[i]];
    }
    EXPECT_EQ(total, oracle::brute_force_assignment_cost(n, cost));
  }
}

TEST(MinCostAssignment, RejectsWrongShape) {
  const std::vector<std::int64_t> cost(5);
  EXPECT_THROW(min_cost_assignment(2, cost), PreconditionError);
}
