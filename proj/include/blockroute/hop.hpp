#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "blockroute/assignment.hpp"
#include "blockroute/blocks.hpp"
#include "blockroute/error.hpp"
#include "blockroute/graphs.hpp"
#include "blockroute/random.hpp"

namespace blockroute {

/// One atom's route from its source vertex to its target (endpoints included).
struct AtomMove {
  Vertex source = 0;
  std::vector<Vertex> path;

  Vertex target() const { return path.back(); }
  std::size_t length() const { return path.size() - 1; }
};

/// An atom advancing across one host edge within a matching round.
struct RoundHop {
  std::uint32_t atom;
  Vertex from;
  Vertex to;
};

using MatchingRound = std::vector<RoundHop>;

/// Physical realization of one block hop.
struct HopPlan {
  BlockId block = 0;
  std::vector<AtomMove> moves;
  std::uint32_t congestion = 0;  // max undirected host-edge load over all paths
  std::uint32_t dilation = 0;    // max path length
  std::vector<MatchingRound> matchings;
  bool edge_colored = false;     // true when rounds come from a bipartite edge coloring

  std::size_t rounds() const { return matchings.size(); }
};

// --------------------------------------------------------------------------
// Bipartite edge coloring

/// Colors the edges of a bipartite multigraph with exactly Delta colors so
/// that no two edges sharing an endpoint get the same color (Konig's edge
/// coloring theorem, via alternating-path recoloring).
///
/// `edges` holds (left id, right id); left and right ids are independent
/// namespaces. Returns one color per edge in [0, Delta).
inline std::vector<std::uint32_t> bipartite_edge_coloring(std::span<const std::pair<std::uint32_t, std::uint32_t>> edges,
                                                          std::uint32_t* color_count = nullptr) {
  std::map<std::uint32_t, std::uint32_t> left_id, right_id;
  for (auto [l, r] : edges) {
    left_id.try_emplace(l, static_cast<std::uint32_t>(left_id.size()));
    right_id.try_emplace(r, static_cast<std::uint32_t>(right_id.size()));
  }
  std::vector<std::uint32_t> ldeg(left_id.size(), 0), rdeg(right_id.size(), 0);
  for (auto [l, r] : edges) {
    ++ldeg[left_id[l]];
    ++rdeg[right_id[r]];
  }
  std::uint32_t delta = 0;
  for (auto d : ldeg) delta = std::max(delta, d);
  for (auto d : rdeg) delta = std::max(delta, d);
  if (color_count) *color_count = delta;

  static constexpr std::int64_t kFree = -1;
  // slot[side][vertex][color] = edge index holding that color, or kFree
  std::vector<std::vector<std::int64_t>> lslot(left_id.size(), std::vector<std::int64_t>(delta, kFree));
  std::vector<std::vector<std::int64_t>> rslot(right_id.size(), std::vector<std::int64_t>(delta, kFree));
  std::vector<std::uint32_t> color(edges.size(), 0);
  std::vector<std::uint32_t> el(edges.size()), er(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    el[e] = left_id[edges[e].first];
    er[e] = right_id[edges[e].second];
  }

  auto first_free = [](const std::vector<std::int64_t>& slots) {
    return static_cast<std::uint32_t>(std::find(slots.begin(), slots.end(), kFree) - slots.begin());
  };

  for (std::size_t e = 0; e < edges.size(); ++e) {
    const std::uint32_t u = el[e], v = er[e];
    const std::uint32_t a = first_free(lslot[u]);
    const std::uint32_t b = first_free(rslot[v]);
    if (rslot[v][a] != kFree) {
      // Swap colors a and b along the alternating path that starts at v with color a.
      std::vector<std::size_t> chain;
      bool on_right = true;
      std::uint32_t at = v;
      std::uint32_t want = a;
      for (;;) {
        const std::int64_t next = on_right ? rslot[at][want] : lslot[at][want];
        if (next == kFree) break;
        chain.push_back(static_cast<std::size_t>(next));
        at = on_right ? el[static_cast<std::size_t>(next)] : er[static_cast<std::size_t>(next)];
        on_right = !on_right;
        want = want == a ? b : a;
      }
      for (std::size_t f : chain) {
        lslot[el[f]][color[f]] = kFree;
        rslot[er[f]][color[f]] = kFree;
      }
      for (std::size_t f : chain) {
        color[f] = color[f] == a ? b : a;
        lslot[el[f]][color[f]] = static_cast<std::int64_t>(f);
        rslot[er[f]][color[f]] = static_cast<std::int64_t>(f);
      }
    }
    color[e] = a;
    lslot[u][a] = static_cast<std::int64_t>(e);
    rslot[v][a] = static_cast<std::int64_t>(e);
  }
  return color;
}

// --------------------------------------------------------------------------
// Hop planning

struct HopOptions {
  std::size_t seed_tries = 50;
};

namespace detail {

// Distance from every vertex to the nearest vertex of any block other than `skip`.
inline std::vector<std::uint32_t> distance_to_other_blocks(const HostGraph& g, const BlockConfiguration& cfg,
                                                           BlockId skip) {
  VertexSet sources;
  for (BlockId b = 0; b < cfg.block_count(); ++b) {
    if (b != skip) sources.insert(sources.end(), cfg.blocks[b].begin(), cfg.blocks[b].end());
  }
  if (sources.empty()) return std::vector<std::uint32_t>(g.vertex_count(), kUnreachable);
  return bfs_distances(g, std::span<const Vertex>(sources));
}

}  // namespace detail

/// A size-s footprint for `block` next to its current one: a BFS ball grown
/// from a free neighbor of the block, through vertices that are outside the
/// block and at distance >= guard from every other block.
inline VertexSet propose_hop_target(const HostGraph& g, const BlockConfiguration& cfg, BlockId block,
                                    std::uint64_t seed, const HopOptions& opt = {}) {
  const auto dist_other = detail::distance_to_other_blocks(g, cfg, block);
  std::vector<char> allowed(g.vertex_count(), 0);
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    allowed[v] = cfg.footprint[v] == kNoBlock && dist_other[v] >= std::max<std::uint32_t>(cfg.guard, 1);
  }
  std::set<Vertex> frontier;
  for (Vertex u : cfg.blocks[block]) {
    for (Vertex v : g.neighbors(u)) {
      if (allowed[v]) frontier.insert(v);
    }
  }
  std::vector<Vertex> roots(frontier.begin(), frontier.end());
  Rng rng(seed);
  for (std::size_t t = 0; t < opt.seed_tries && !roots.empty(); ++t) {
    const std::size_t pick = rng.below(roots.size());
    VertexSet ball = detail::grow_ball(g, roots[pick], cfg.s, allowed);
    if (ball.size() == cfg.s) {
      std::sort(ball.begin(), ball.end());
      return ball;
    }
    roots.erase(roots.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  throw PlacementError("propose_hop_target: no free footprint of size " + std::to_string(cfg.s) +
                       " next to block " + std::to_string(block));
}

/// Assigns the atoms of `block` to `target` minimizing total path length and
/// routes each along a shortest host path. Every atom must be within
/// d_C + guard + 1 hops of its assigned target.
inline HopPlan plan_block_hop(const HostGraph& g, const BlockConfiguration& cfg, BlockId block,
                              const VertexSet& target) {
  if (block >= cfg.block_count()) throw PreconditionError("plan_block_hop: no such block");
  const VertexSet& source = cfg.blocks[block];
  const std::size_t s = source.size();
  if (target.size() != s) throw PreconditionError("plan_block_hop: target size differs from block size");
  {
    VertexSet sorted = target;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw PreconditionError("plan_block_hop: target vertices are not distinct");
    }
  }
  const auto dist_other = detail::distance_to_other_blocks(g, cfg, block);
  for (Vertex t : target) {
    if (t >= g.vertex_count()) throw PreconditionError("plan_block_hop: target vertex out of range");
    const std::int32_t owner = cfg.footprint[t];
    if (owner != kNoBlock && static_cast<BlockId>(owner) != block) {
      throw PreconditionError("plan_block_hop: target overlaps another block");
    }
    if (dist_other[t] < cfg.guard) throw PreconditionError("plan_block_hop: target violates the guard distance");
  }

  const std::uint32_t range = cfg.d_C + cfg.guard + 1;
  constexpr std::int64_t kForbidden = 1'000'000'000;
  std::vector<std::vector<std::uint32_t>> dist_from(s);
  std::vector<std::int64_t> cost(s * s);
  for (std::size_t i = 0; i < s; ++i) {
    dist_from[i] = bfs_distances(g, source[i]);
    for (std::size_t j = 0; j < s; ++j) {
      const std::uint32_t d = dist_from[i][target[j]];
      cost[i * s + j] = d <= range ? static_cast<std::int64_t>(d) : kForbidden;
    }
  }
  const auto assignment = min_cost_assignment(s, cost);

  HopPlan plan;
  plan.block = block;
  std::map<std::pair<Vertex, Vertex>, std::uint32_t> load;
  for (std::size_t i = 0; i < s; ++i) {
    if (cost[i * s + assignment[i]] >= kForbidden) {
      throw HopInfeasibleError("plan_block_hop: atom at vertex " + std::to_string(source[i]) +
                               " cannot reach a target within " + std::to_string(range) + " hops");
    }
    auto path = descend_shortest_path(g, dist_from[i], target[assignment[i]]);
    std::reverse(path.begin(), path.end());
    for (std::size_t h = 0; h + 1 < path.size(); ++h) ++load[std::minmax(path[h], path[h + 1])];
    plan.dilation = std::max(plan.dilation, static_cast<std::uint32_t>(path.size() - 1));
    plan.moves.push_back({source[i], std::move(path)});
  }
  for (const auto& [edge, l] : load) plan.congestion = std::max(plan.congestion, l);
  return plan;
}

/// Splits the atom moves of a plan into rounds that each use every host edge
/// at most once.
///
/// Single-edge moves between disjoint source and target sets form a bipartite
/// multigraph and are edge-colored into exactly Delta rounds. Otherwise each
/// round greedily advances a maximal edge-disjoint set of atoms by one hop,
/// longest residual path first.
inline HopPlan decompose_hop_into_matchings(HopPlan plan) {
  plan.matchings.clear();
  const auto& moves = plan.moves;
  const bool single_edge = std::all_of(moves.begin(), moves.end(), [](const AtomMove& m) { return m.length() <= 1; });
  bool disjoint_sides = true;
  if (single_edge) {
    std::set<Vertex> sources, targets;
    for (const auto& m : moves) {
      if (m.length() == 1) {
        sources.insert(m.path[0]);
        targets.insert(m.path[1]);
      }
    }
    for (Vertex v : sources) disjoint_sides = disjoint_sides && !targets.contains(v);
  }

  if (single_edge && disjoint_sides) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::vector<std::uint32_t> atom_of_edge;
    for (std::uint32_t a = 0; a < moves.size(); ++a) {
      if (moves[a].length() == 1) {
        edges.emplace_back(moves[a].path[0], moves[a].path[1]);
        atom_of_edge.push_back(a);
      }
    }
    std::uint32_t colors = 0;
    const auto color = bipartite_edge_coloring(edges, &colors);
    plan.matchings.assign(colors, {});
    for (std::size_t e = 0; e < edges.size(); ++e) {
      plan.matchings[color[e]].push_back({atom_of_edge[e], edges[e].first, edges[e].second});
    }
    plan.edge_colored = true;
    return plan;
  }

  plan.edge_colored = false;
  std::vector<std::size_t> pos(moves.size(), 0);
  auto remaining = [&](std::uint32_t a) { return moves[a].length() - pos[a]; };
  std::vector<std::uint32_t> order(moves.size());
  std::iota(order.begin(), order.end(), 0);
  for (;;) {
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return remaining(a) > remaining(b); });
    if (order.empty() || remaining(order.front()) == 0) break;
    std::set<std::pair<Vertex, Vertex>> used;
    MatchingRound round;
    for (std::uint32_t a : order) {
      if (remaining(a) == 0) break;
      const Vertex from = moves[a].path[pos[a]];
      const Vertex to = moves[a].path[pos[a] + 1];
      if (!used.insert(std::minmax(from, to)).second) continue;
      round.push_back({a, from, to});
    }
    for (const auto& hop : round) ++pos[hop.atom];
    plan.matchings.push_back(std::move(round));
  }
  return plan;
}

/// Checks that the rounds replay every path exactly, use each host edge at
/// most once per round, and number at least max(C_phys, D_phys).
inline std::vector<std::string> audit_hop_plan(const HostGraph& g, const HopPlan& plan) {
  std::vector<std::string> problems;
  std::vector<std::size_t> pos(plan.moves.size(), 0);
  for (std::size_t r = 0; r < plan.matchings.size(); ++r) {
    std::set<std::pair<Vertex, Vertex>> used;
    std::set<std::uint32_t> atoms;
    for (const auto& hop : plan.matchings[r]) {
      const std::string where = "round " + std::to_string(r) + ", atom " + std::to_string(hop.atom);
      if (!g.has_edge(hop.from, hop.to)) problems.push_back(where + ": not a host edge");
      if (!used.insert(std::minmax(hop.from, hop.to)).second) problems.push_back(where + ": edge reused in round");
      if (!atoms.insert(hop.atom).second) problems.push_back(where + ": atom moved twice");
      const auto& path = plan.moves[hop.atom].path;
      if (pos[hop.atom] + 1 >= path.size() || path[pos[hop.atom]] != hop.from || path[pos[hop.atom] + 1] != hop.to) {
        problems.push_back(where + ": departs from its path");
      }
      ++pos[hop.atom];
    }
  }
  std::set<Vertex> targets;
  for (std::size_t a = 0; a < plan.moves.size(); ++a) {
    if (pos[a] != plan.moves[a].length()) problems.push_back("atom " + std::to_string(a) + " not delivered");
    targets.insert(plan.moves[a].target());
  }
  if (targets.size() != plan.moves.size()) problems.push_back("targets not pairwise distinct");
  if (plan.rounds() < std::max(plan.congestion, plan.dilation)) problems.push_back("fewer rounds than max(C, D)");
  return problems;
}

}  // namespace blockroute
