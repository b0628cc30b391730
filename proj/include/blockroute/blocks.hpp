#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "blockroute/error.hpp"
#include "blockroute/graphs.hpp"
#include "blockroute/random.hpp"

namespace blockroute {

using BlockId = std::uint32_t;
inline constexpr std::int32_t kNoBlock = -1;

/// N_L disjoint, connected, guard-separated vertex sets of equal size s = d_C^2.
struct BlockConfiguration {
  std::vector<VertexSet> blocks;     // each sorted ascending
  std::uint32_t d_C = 0;
  std::size_t s = 0;                 // block size
  std::uint32_t guard = 0;           // minimum pairwise hop distance
  std::vector<std::int32_t> footprint;  // vertex -> block id, or kNoBlock

  std::size_t block_count() const { return blocks.size(); }

  double occupancy() const {
    return footprint.empty() ? 0.0
                             : static_cast<double>(blocks.size() * s) / static_cast<double>(footprint.size());
  }

  /// Rebuilds the footprint index from `blocks`.
  void reindex(std::size_t n_vertices) {
    footprint.assign(n_vertices, kNoBlock);
    for (BlockId b = 0; b < blocks.size(); ++b) {
      for (Vertex v : blocks[b]) footprint[v] = static_cast<std::int32_t>(b);
    }
  }
};

struct PlacementOptions {
  std::size_t seed_tries_per_block = 50;
  std::size_t restarts = 10;
  double packing_cap = 1.0;  // maximum admissible occupancy N_L*s/N_phys
};

namespace detail {

// BFS ball of up to `size` vertices rooted at `root`, restricted to vertices
// with allowed[v]. Neighbors are visited in ascending id order.
inline VertexSet grow_ball(const HostGraph& g, Vertex root, std::size_t size, const std::vector<char>& allowed) {
  VertexSet ball{root};
  std::vector<char> seen(g.vertex_count(), 0);
  seen[root] = 1;
  for (std::size_t head = 0; head < ball.size() && ball.size() < size; ++head) {
    for (Vertex v : g.neighbors(ball[head])) {
      if (seen[v] || !allowed[v]) continue;
      seen[v] = 1;
      ball.push_back(v);
      if (ball.size() == size) break;
    }
  }
  return ball;
}

// Marks every vertex within `radius` hops of `sources` (radius 0 marks the
// sources themselves).
inline void mark_within(const HostGraph& g, std::span<const Vertex> sources, std::uint32_t radius,
                        std::vector<char>& mark) {
  std::vector<std::uint32_t> dist(g.vertex_count(), kUnreachable);
  std::vector<Vertex> queue(sources.begin(), sources.end());
  for (Vertex s : sources) {
    dist[s] = 0;
    mark[s] = 1;
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Vertex u = queue[head];
    if (dist[u] == radius) continue;
    for (Vertex v : g.neighbors(u)) {
      if (dist[v] != kUnreachable) continue;
      dist[v] = dist[u] + 1;
      mark[v] = 1;
      queue.push_back(v);
    }
  }
}

inline bool induces_connected(const HostGraph& g, const VertexSet& set) {
  if (set.empty()) return false;
  std::vector<char> inside(g.vertex_count(), 0);
  for (Vertex v : set) inside[v] = 1;
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<Vertex> queue{set.front()};
  seen[set.front()] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (Vertex v : g.neighbors(queue[head])) {
      if (inside[v] && !seen[v]) {
        seen[v] = 1;
        queue.push_back(v);
      }
    }
  }
  return queue.size() == set.size();
}

}  // namespace detail

/// Places n_blocks BFS-ball blocks of size d_C^2 with pairwise distance >= guard.
///
/// Each block is grown from a uniformly random available vertex, where a
/// vertex is available when it lies at distance >= guard from every block
/// already placed. A block that cannot reach full size is re-seeded; after
/// too many failures the whole placement restarts from the next seed.
inline BlockConfiguration place_blocks(const HostGraph& g, std::size_t n_blocks, std::uint32_t d_C,
                                       std::uint32_t guard, std::uint64_t seed,
                                       const PlacementOptions& opt = {}) {
  const std::size_t n = g.vertex_count();
  const std::size_t s = static_cast<std::size_t>(d_C) * d_C;
  if (d_C == 0) throw PreconditionError("place_blocks: d_C must be >= 1");
  if (n_blocks * s > n) {
    throw PlacementError("place_blocks: " + std::to_string(n_blocks) + " blocks of size " + std::to_string(s) +
                         " exceed " + std::to_string(n) + " vertices");
  }
  if (static_cast<double>(n_blocks * s) > opt.packing_cap * static_cast<double>(n)) {
    throw PlacementError("place_blocks: occupancy exceeds packing cap");
  }

  for (std::size_t restart = 0; restart < opt.restarts; ++restart) {
    Rng rng(seed + 0x9e3779b97f4a7c15ULL * restart);
    std::vector<char> unavailable(n, 0);
    BlockConfiguration cfg;
    cfg.d_C = d_C;
    cfg.s = s;
    cfg.guard = guard;
    bool failed = false;
    for (std::size_t b = 0; b < n_blocks && !failed; ++b) {
      std::vector<char> allowed(n);
      VertexSet candidates;
      for (Vertex v = 0; v < n; ++v) {
        allowed[v] = !unavailable[v];
        if (allowed[v]) candidates.push_back(v);
      }
      bool placed = false;
      for (std::size_t t = 0; t < opt.seed_tries_per_block && !candidates.empty(); ++t) {
        const Vertex root = candidates[rng.below(candidates.size())];
        VertexSet ball = detail::grow_ball(g, root, s, allowed);
        if (ball.size() < s) continue;
        std::sort(ball.begin(), ball.end());
        // Anything closer than `guard` to this block is off-limits from now on.
        if (guard > 0) detail::mark_within(g, ball, guard - 1, unavailable);
        for (Vertex v : ball) unavailable[v] = 1;
        cfg.blocks.push_back(std::move(ball));
        placed = true;
        break;
      }
      failed = !placed;
    }
    if (!failed) {
      cfg.reindex(n);
      return cfg;
    }
  }
  throw PlacementError("place_blocks: could not place " + std::to_string(n_blocks) + " blocks of size " +
                       std::to_string(s) + " with guard " + std::to_string(guard) + " after " +
                       std::to_string(opt.restarts) + " restarts (over-constrained occupancy)");
}

/// Invariant violations of a configuration on g (empty if valid).
inline std::vector<std::string> audit_block_configuration(const HostGraph& g, const BlockConfiguration& cfg) {
  std::vector<std::string> problems;
  std::vector<std::int32_t> owner(g.vertex_count(), kNoBlock);
  for (BlockId b = 0; b < cfg.blocks.size(); ++b) {
    const auto& block = cfg.blocks[b];
    if (block.size() != cfg.s) problems.push_back("block " + std::to_string(b) + " has wrong size");
    for (Vertex v : block) {
      if (owner[v] != kNoBlock) problems.push_back("vertex " + std::to_string(v) + " in two blocks");
      owner[v] = static_cast<std::int32_t>(b);
    }
    if (!detail::induces_connected(g, block)) problems.push_back("block " + std::to_string(b) + " not connected");
  }
  if (owner != cfg.footprint) problems.push_back("footprint index out of sync");
  if (cfg.occupancy() > 1.0) problems.push_back("occupancy above 1");
  for (BlockId b = 0; b < cfg.blocks.size(); ++b) {
    const auto dist = bfs_distances(g, std::span<const Vertex>(cfg.blocks[b]));
    for (BlockId c = b + 1; c < cfg.blocks.size(); ++c) {
      std::uint32_t d = kUnreachable;
      for (Vertex v : cfg.blocks[c]) d = std::min(d, dist[v]);
      if (d < cfg.guard) {
        problems.push_back("blocks " + std::to_string(b) + "," + std::to_string(c) + " at distance " +
                           std::to_string(d) + " < guard");
      }
    }
  }
  return problems;
}

// --------------------------------------------------------------------------
// Deformation energy

/// Rigid template E(B) with current host positions of its vertices.
struct BlockTemplate {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // template vertex pairs
  std::vector<Vertex> positions;                               // template vertex -> host vertex
};

/// Template whose edges are the edges induced by `block`, positioned in place.
inline BlockTemplate induced_template(const HostGraph& g, const VertexSet& block) {
  BlockTemplate t;
  t.positions = block;
  for (std::uint32_t i = 0; i < block.size(); ++i) {
    for (std::uint32_t j = i + 1; j < block.size(); ++j) {
      if (g.has_edge(block[i], block[j])) t.edges.emplace_back(i, j);
    }
  }
  return t;
}

/// Sum over template edges of the host distance between their current
/// positions, minus the number of template edges. Zero iff every template
/// edge sits on a host edge.
inline std::uint64_t deformation_energy(const HostGraph& g, const BlockTemplate& t) {
  {
    VertexSet sorted = t.positions;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ContractViolation("deformation_energy: template positions are not injective");
    }
  }
  std::unordered_map<Vertex, std::vector<std::uint32_t>> dist_cache;
  std::uint64_t total = 0;
  for (auto [a, b] : t.edges) {
    if (a >= t.positions.size() || b >= t.positions.size()) {
      throw PreconditionError("deformation_energy: template vertex without position");
    }
    const Vertex x = t.positions[a];
    const Vertex y = t.positions[b];
    auto it = dist_cache.find(x);
    if (it == dist_cache.end()) it = dist_cache.emplace(x, bfs_distances(g, x)).first;
    const std::uint32_t d = it->second[y];
    if (d == kUnreachable) throw PreconditionError("deformation_energy: template edge maps to unreachable pair");
    total += d;
  }
  return total - t.edges.size();
}

}  // namespace blockroute
