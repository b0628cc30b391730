#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "blockroute/error.hpp"
#include "blockroute/graphs.hpp"
#include "blockroute/quotient.hpp"
#include "blockroute/random.hpp"

namespace blockroute {

using Permutation = std::vector<BlockId>;

enum class Phase : std::uint8_t { scatter = 0, gather = 1 };

/// Traversal of one directed quotient arc within one routing phase.
struct PhaseArc {
  Phase phase;
  Vertex from;
  Vertex to;
  auto operator<=>(const PhaseArc&) const = default;
};

/// One block advancing one quotient hop within a schedule step.
struct ScheduledHop {
  BlockId block;
  Vertex from;
  Vertex to;
};

using ScheduleStep = std::vector<ScheduledHop>;

/// Result of Valiant two-phase routing on the quotient support graph.
///
/// Congestion is the largest number of blocks crossing one directed arc in a
/// single phase; dilation is the longest scatter+gather route of any block.
struct RoutingOutcome {
  Permutation permutation;   // target pi
  Permutation intermediate;  // sigma
  std::vector<std::vector<Vertex>> scatter_paths;  // i -> sigma(i), endpoints included
  std::vector<std::vector<Vertex>> gather_paths;   // sigma(i) -> pi(i)
  std::map<PhaseArc, std::uint32_t> arc_loads;
  std::map<std::pair<Vertex, Vertex>, std::uint32_t> edge_loads;  // undirected, both phases combined
  std::uint32_t congestion = 0;           // C_Q = max arc_loads
  std::uint32_t combined_congestion = 0;  // max edge_loads
  std::uint32_t dilation = 0;             // D_Q
  std::uint32_t d_C = 0;
  std::uint64_t physical_depth = 0;       // d_C * (C_Q + D_Q)
  std::optional<std::vector<ScheduleStep>> schedule;

  std::size_t scheduled_steps() const { return schedule ? schedule->size() : 0; }
};

inline bool is_permutation(const Permutation& p) {
  std::vector<char> seen(p.size(), 0);
  for (BlockId x : p) {
    if (x >= p.size() || seen[x]) return false;
    seen[x] = 1;
  }
  return true;
}

inline Permutation identity_permutation(std::size_t n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

inline Permutation random_permutation(std::size_t n, Rng& rng) {
  Permutation p = identity_permutation(n);
  rng.shuffle(std::span<BlockId>(p));
  return p;
}

/// Routes block i along i -> sigma(i) -> pi(i) using deterministic shortest
/// paths in `support` (BFS from the destination, smallest-id parent).
inline RoutingOutcome route_via(const HostGraph& support, const Permutation& pi, const Permutation& sigma,
                                std::uint32_t d_C) {
  const std::size_t k = support.vertex_count();
  if (pi.size() != k || !is_permutation(pi)) throw PreconditionError("valiant_route: pi is not a permutation of the blocks");
  if (sigma.size() != k || !is_permutation(sigma)) throw PreconditionError("valiant_route: sigma is not a permutation");

  std::vector<std::vector<std::uint32_t>> dist_to(k);
  auto distances = [&](Vertex t) -> const std::vector<std::uint32_t>& {
    if (dist_to[t].empty()) {
      dist_to[t] = bfs_distances(support, t);
      if (std::any_of(dist_to[t].begin(), dist_to[t].end(), [](auto d) { return d == kUnreachable; })) {
        throw QuotientDisconnectedError("valiant_route: quotient support is disconnected");
      }
    }
    return dist_to[t];
  };

  RoutingOutcome out;
  out.permutation = pi;
  out.intermediate = sigma;
  out.d_C = d_C;
  out.scatter_paths.resize(k);
  out.gather_paths.resize(k);
  for (BlockId i = 0; i < k; ++i) {
    out.scatter_paths[i] = descend_shortest_path(support, distances(sigma[i]), i);
    out.gather_paths[i] = descend_shortest_path(support, distances(pi[i]), sigma[i]);
  }

  auto tally = [&](const std::vector<Vertex>& path, Phase phase) {
    for (std::size_t h = 0; h + 1 < path.size(); ++h) {
      ++out.arc_loads[PhaseArc{phase, path[h], path[h + 1]}];
      ++out.edge_loads[std::minmax(path[h], path[h + 1])];
    }
  };
  for (BlockId i = 0; i < k; ++i) {
    tally(out.scatter_paths[i], Phase::scatter);
    tally(out.gather_paths[i], Phase::gather);
    const auto total = static_cast<std::uint32_t>(out.scatter_paths[i].size() + out.gather_paths[i].size() - 2);
    out.dilation = std::max(out.dilation, total);
  }
  for (const auto& [arc, load] : out.arc_loads) out.congestion = std::max(out.congestion, load);
  for (const auto& [edge, load] : out.edge_loads) out.combined_congestion = std::max(out.combined_congestion, load);
  out.physical_depth = static_cast<std::uint64_t>(d_C) * (out.congestion + out.dilation);
  return out;
}

/// Valiant two-phase routing with sigma drawn uniformly from `seed`.
inline RoutingOutcome valiant_route(const QuotientGraph& q, const Permutation& pi, std::uint64_t seed,
                                    std::uint32_t d_C) {
  Rng rng(seed);
  const Permutation sigma = random_permutation(q.n_blocks, rng);
  return route_via(q.support, pi, sigma, d_C);
}

/// Schedules the routes on the quotient: every step advances a maximal set of
/// blocks by one hop, with each support edge used at most once per step and
/// no supervertex entered by two blocks in the same step. Blocks with the
/// longest residual route go first (ties by block id).
inline RoutingOutcome schedule_greedy(RoutingOutcome outcome) {
  const std::size_t k = outcome.scatter_paths.size();
  std::vector<std::vector<Vertex>> route(k);
  for (BlockId i = 0; i < k; ++i) {
    route[i] = outcome.scatter_paths[i];
    route[i].insert(route[i].end(), outcome.gather_paths[i].begin() + 1, outcome.gather_paths[i].end());
  }
  std::vector<std::size_t> pos(k, 0);
  auto remaining = [&](BlockId i) { return route[i].size() - 1 - pos[i]; };

  std::vector<ScheduleStep> steps;
  std::vector<BlockId> order(k);
  std::iota(order.begin(), order.end(), 0);
  for (;;) {
    std::stable_sort(order.begin(), order.end(), [&](BlockId a, BlockId b) { return remaining(a) > remaining(b); });
    if (order.empty() || remaining(order.front()) == 0) break;
    std::set<std::pair<Vertex, Vertex>> used_edges;
    std::unordered_set<Vertex> entered;
    ScheduleStep step;
    for (BlockId i : order) {
      if (remaining(i) == 0) break;
      const Vertex from = route[i][pos[i]];
      const Vertex to = route[i][pos[i] + 1];
      const auto edge = std::minmax(from, to);
      if (used_edges.contains(edge) || entered.contains(to)) continue;
      used_edges.insert(edge);
      entered.insert(to);
      step.push_back({i, from, to});
    }
    if (step.empty()) throw RoutingError("schedule_greedy: no block could advance (livelock)");
    for (const auto& hop : step) ++pos[hop.block];
    steps.push_back(std::move(step));
  }
  outcome.schedule = std::move(steps);
  return outcome;
}

/// Checks path validity, load accounting and, when present, schedule
/// validity. Returns violations (empty if none).
inline std::vector<std::string> audit_routing(const HostGraph& support, const RoutingOutcome& r) {
  std::vector<std::string> problems;
  const std::size_t k = support.vertex_count();
  auto check_path = [&](const std::vector<Vertex>& path, Vertex from, Vertex to, const char* what, BlockId i) {
    if (path.empty() || path.front() != from || path.back() != to) {
      problems.push_back(std::string(what) + " path of block " + std::to_string(i) + " has wrong endpoints");
      return;
    }
    for (std::size_t h = 0; h + 1 < path.size(); ++h) {
      if (!support.has_edge(path[h], path[h + 1])) {
        problems.push_back(std::string(what) + " path of block " + std::to_string(i) + " leaves the support");
      }
    }
    const auto dist = bfs_distances(support, to);
    if (dist[from] != path.size() - 1) {
      problems.push_back(std::string(what) + " path of block " + std::to_string(i) + " is not shortest");
    }
  };

  std::uint64_t total_length = 0;
  std::uint32_t dilation = 0;
  for (BlockId i = 0; i < k; ++i) {
    check_path(r.scatter_paths[i], i, r.intermediate[i], "scatter", i);
    check_path(r.gather_paths[i], r.intermediate[i], r.permutation[i], "gather", i);
    const auto len = static_cast<std::uint32_t>(r.scatter_paths[i].size() + r.gather_paths[i].size() - 2);
    total_length += len;
    dilation = std::max(dilation, len);
  }
  std::uint64_t arc_total = 0, edge_total = 0;
  std::uint32_t congestion = 0;
  for (const auto& [arc, load] : r.arc_loads) {
    arc_total += load;
    congestion = std::max(congestion, load);
  }
  for (const auto& [edge, load] : r.edge_loads) edge_total += load;
  if (arc_total != total_length || edge_total != total_length) problems.push_back("load accounting mismatch");
  if (congestion != r.congestion) problems.push_back("C_Q differs from max arc load");
  if (dilation != r.dilation) problems.push_back("D_Q differs from max route length");
  if (r.physical_depth != static_cast<std::uint64_t>(r.d_C) * (r.congestion + r.dilation)) {
    problems.push_back("T_physical differs from d_C (C_Q + D_Q)");
  }

  if (r.schedule) {
    std::vector<Vertex> at(k);
    std::iota(at.begin(), at.end(), 0);
    std::vector<std::vector<Vertex>> route(k);
    std::vector<std::size_t> pos(k, 0);
    for (BlockId i = 0; i < k; ++i) {
      route[i] = r.scatter_paths[i];
      route[i].insert(route[i].end(), r.gather_paths[i].begin() + 1, r.gather_paths[i].end());
    }
    for (std::size_t t = 0; t < r.schedule->size(); ++t) {
      std::set<std::pair<Vertex, Vertex>> used;
      std::unordered_set<Vertex> entered;
      std::unordered_set<BlockId> moved;
      for (const auto& hop : (*r.schedule)[t]) {
        const std::string where = "step " + std::to_string(t) + ", block " + std::to_string(hop.block);
        if (!moved.insert(hop.block).second) problems.push_back(where + ": moved twice");
        if (at[hop.block] != hop.from) problems.push_back(where + ": not at its recorded position");
        if (!support.has_edge(hop.from, hop.to)) problems.push_back(where + ": hop is not a support edge");
        if (!used.insert(std::minmax(hop.from, hop.to)).second) problems.push_back(where + ": edge used twice");
        if (!entered.insert(hop.to).second) problems.push_back(where + ": supervertex entered twice");
        if (pos[hop.block] + 1 >= route[hop.block].size() || route[hop.block][pos[hop.block] + 1] != hop.to) {
          problems.push_back(where + ": departs from its route");
        }
        at[hop.block] = hop.to;
        ++pos[hop.block];
      }
    }
    for (BlockId i = 0; i < k; ++i) {
      if (at[i] != r.permutation[i]) problems.push_back("block " + std::to_string(i) + " not delivered");
    }
    if (r.schedule->size() < std::max(r.congestion, r.dilation)) {
      problems.push_back("schedule shorter than max(C_Q, D_Q)");
    }
  }
  return problems;
}

}  // namespace blockroute
