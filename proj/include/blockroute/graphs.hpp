#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <ranges>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "blockroute/error.hpp"
#include "blockroute/random.hpp"

namespace blockroute {

using Vertex = std::uint32_t;
using VertexSet = std::vector<Vertex>;

inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

/// Anything exposing dense vertex ids and per-vertex neighbor ranges.
template <class G>
concept AdjacencyGraph = requires(const G& g, Vertex v) {
  { g.vertex_count() } -> std::convertible_to<std::size_t>;
  { g.neighbors(v) } -> std::ranges::input_range;
};

/// Simple undirected graph with sorted neighbor lists.
///
/// Immutable after construction. `degree()` is set only when the graph was
/// built as a regular graph (either generated or certified by the builder).
class HostGraph {
 public:
  HostGraph() = default;

  /// Builds from an edge list. Self-loops and duplicates are rejected.
  static HostGraph from_edges(std::size_t n, std::span<const std::pair<Vertex, Vertex>> edges,
                              std::optional<std::uint32_t> degree = std::nullopt,
                              std::uint64_t seed = 0) {
    HostGraph g;
    g.adjacency_.assign(n, {});
    for (auto [u, v] : edges) {
      if (u >= n || v >= n) throw ContractViolation("edge endpoint out of range");
      if (u == v) throw ContractViolation("self-loop in edge list");
      g.adjacency_[u].push_back(v);
      g.adjacency_[v].push_back(u);
    }
    for (auto& row : g.adjacency_) {
      std::sort(row.begin(), row.end());
      if (std::adjacent_find(row.begin(), row.end()) != row.end()) {
        throw ContractViolation("duplicate edge in edge list");
      }
    }
    g.edge_count_ = edges.size();
    g.degree_ = degree;
    g.seed_ = seed;
    if (degree) {
      for (const auto& row : g.adjacency_) {
        if (row.size() != *degree) throw ContractViolation("declared degree does not hold");
      }
    }
    return g;
  }

  std::size_t vertex_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  std::optional<std::uint32_t> degree() const { return degree_; }
  std::uint64_t seed() const { return seed_; }

  std::span<const Vertex> neighbors(Vertex v) const { return adjacency_[v]; }

  bool has_edge(Vertex u, Vertex v) const {
    const auto& row = adjacency_[u];
    return std::binary_search(row.begin(), row.end(), v);
  }

  std::vector<std::pair<Vertex, Vertex>> edges() const {
    std::vector<std::pair<Vertex, Vertex>> out;
    out.reserve(edge_count_);
    for (Vertex u = 0; u < adjacency_.size(); ++u) {
      for (Vertex v : adjacency_[u]) {
        if (u < v) out.emplace_back(u, v);
      }
    }
    return out;
  }

 private:
  std::vector<std::vector<Vertex>> adjacency_;
  std::size_t edge_count_ = 0;
  std::optional<std::uint32_t> degree_;
  std::uint64_t seed_ = 0;
};

/// r-uniform hypergraph on dense vertex ids.
struct Hypergraph {
  std::size_t n_vertices = 0;
  std::size_t r = 0;
  std::vector<VertexSet> hyperedges;

  /// Per-vertex hyperedge count, if every vertex has the same one.
  std::optional<std::size_t> regular_degree() const {
    std::vector<std::size_t> count(n_vertices, 0);
    for (const auto& e : hyperedges) {
      for (Vertex v : e) ++count[v];
    }
    if (count.empty()) return std::nullopt;
    if (std::adjacent_find(count.begin(), count.end(), std::not_equal_to<>()) != count.end()) {
      return std::nullopt;
    }
    return count.front();
  }

  void validate() const {
    for (const auto& e : hyperedges) {
      if (e.size() != r) throw ContractViolation("hyperedge size differs from uniformity r");
      VertexSet sorted = e;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ContractViolation("hyperedge repeats a vertex");
      }
      if (!sorted.empty() && sorted.back() >= n_vertices) {
        throw ContractViolation("hyperedge vertex out of range");
      }
    }
  }
};

// --------------------------------------------------------------------------
// Traversal

/// Multi-source BFS. Unreachable vertices get kUnreachable.
template <AdjacencyGraph G>
std::vector<std::uint32_t> bfs_distances(const G& g, std::span<const Vertex> sources) {
  if (sources.empty()) throw PreconditionError("bfs_distances: empty source set");
  std::vector<std::uint32_t> dist(g.vertex_count(), kUnreachable);
  std::vector<Vertex> frontier;
  frontier.reserve(g.vertex_count());
  for (Vertex s : sources) {
    if (dist[s] != 0) {
      dist[s] = 0;
      frontier.push_back(s);
    }
  }
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    const Vertex u = frontier[head];
    for (Vertex v : g.neighbors(u)) {
      if (dist[v] == kUnreachable) {
        dist[v] = dist[u] + 1;
        frontier.push_back(v);
      }
    }
  }
  return dist;
}

template <AdjacencyGraph G>
std::vector<std::uint32_t> bfs_distances(const G& g, Vertex source) {
  const Vertex s[1] = {source};
  return bfs_distances(g, std::span<const Vertex>(s));
}

/// min over a in A, b in B of dist(a, b); 0 iff the sets intersect.
template <AdjacencyGraph G>
std::uint32_t set_distance(const G& g, std::span<const Vertex> a, std::span<const Vertex> b) {
  if (a.empty() || b.empty()) throw PreconditionError("set_distance: empty vertex set");
  const auto dist = bfs_distances(g, a);
  std::uint32_t best = kUnreachable;
  for (Vertex v : b) best = std::min(best, dist[v]);
  return best;
}

/// Walks a shortest path from `from` toward the BFS root of `dist_to_root`,
/// always stepping to the smallest-id neighbor one hop closer.
/// Returns the vertex sequence including both endpoints.
template <AdjacencyGraph G>
std::vector<Vertex> descend_shortest_path(const G& g, std::span<const std::uint32_t> dist_to_root,
                                          Vertex from) {
  if (dist_to_root[from] == kUnreachable) {
    throw RoutingError("descend_shortest_path: source unreachable from root");
  }
  std::vector<Vertex> path{from};
  Vertex cur = from;
  while (dist_to_root[cur] != 0) {
    const std::uint32_t want = dist_to_root[cur] - 1;
    for (Vertex v : g.neighbors(cur)) {  // neighbor ranges are ascending
      if (dist_to_root[v] == want) {
        cur = v;
        break;
      }
    }
    path.push_back(cur);
  }
  return path;
}

template <AdjacencyGraph G>
bool is_connected(const G& g) {
  if (g.vertex_count() == 0) return true;
  const auto dist = bfs_distances(g, Vertex{0});
  return std::none_of(dist.begin(), dist.end(), [](auto d) { return d == kUnreachable; });
}

/// Eccentricity maximum over all vertices; kUnreachable when disconnected.
template <AdjacencyGraph G>
std::uint32_t diameter(const G& g) {
  std::uint32_t best = 0;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    const auto dist = bfs_distances(g, v);
    for (auto d : dist) best = std::max(best, d);
  }
  return best;
}

// --------------------------------------------------------------------------
// Audits

/// Returns human-readable violations of the HostGraph invariants (empty if none).
inline std::vector<std::string> audit_host_graph(const HostGraph& g) {
  std::vector<std::string> problems;
  std::size_t degree_sum = 0;
  for (Vertex u = 0; u < g.vertex_count(); ++u) {
    const auto row = g.neighbors(u);
    degree_sum += row.size();
    if (!std::is_sorted(row.begin(), row.end())) problems.push_back("unsorted neighbors at " + std::to_string(u));
    if (std::adjacent_find(row.begin(), row.end()) != row.end()) {
      problems.push_back("duplicate neighbor at " + std::to_string(u));
    }
    for (Vertex v : row) {
      if (v == u) problems.push_back("self-loop at " + std::to_string(u));
      else if (!g.has_edge(v, u)) problems.push_back("asymmetric edge " + std::to_string(u) + "-" + std::to_string(v));
    }
    if (g.degree() && row.size() != *g.degree()) {
      problems.push_back("vertex " + std::to_string(u) + " has degree " + std::to_string(row.size()));
    }
  }
  if (degree_sum != 2 * g.edge_count()) problems.push_back("handshake mismatch");
  return problems;
}

// --------------------------------------------------------------------------
// Generators

struct RegularGeneratorOptions {
  std::size_t max_attempts = 100;
  std::size_t rewiring_passes = 50;
  std::size_t rewiring_tries = 64;  // random edges probed per unpaired stub pair
};

namespace detail {

inline std::uint64_t edge_key(Vertex u, Vertex v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

// Mutable edge store with O(1) membership, insertion, removal and uniform sampling.
class EdgePool {
 public:
  explicit EdgePool(std::size_t reserve) {
    edges_.reserve(reserve);
    index_.reserve(reserve * 2);
  }

  bool contains(Vertex u, Vertex v) const { return index_.contains(edge_key(u, v)); }

  bool insert(Vertex u, Vertex v) {
    if (u == v) return false;
    auto [it, fresh] = index_.try_emplace(edge_key(u, v), edges_.size());
    if (!fresh) return false;
    edges_.emplace_back(u, v);
    return true;
  }

  void erase_at(std::size_t i) {
    index_.erase(edge_key(edges_[i].first, edges_[i].second));
    if (i + 1 != edges_.size()) {
      edges_[i] = edges_.back();
      index_[edge_key(edges_[i].first, edges_[i].second)] = i;
    }
    edges_.pop_back();
  }

  std::size_t size() const { return edges_.size(); }
  const std::pair<Vertex, Vertex>& at(std::size_t i) const { return edges_[i]; }
  const std::vector<std::pair<Vertex, Vertex>>& all() const { return edges_; }

 private:
  std::vector<std::pair<Vertex, Vertex>> edges_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

// One configuration-model attempt. Returns the edge list on success, or an
// explanation on failure.
inline std::optional<std::vector<std::pair<Vertex, Vertex>>> try_configuration_model(
    std::size_t n, std::uint32_t d, std::uint64_t seed, const RegularGeneratorOptions& opt,
    std::string& diagnostics) {
  Rng rng(seed);
  std::vector<Vertex> stubs;
  stubs.reserve(n * d);
  for (Vertex v = 0; v < n; ++v) stubs.insert(stubs.end(), d, v);
  rng.shuffle(std::span<Vertex>(stubs));

  EdgePool pool(n * d / 2);
  std::vector<Vertex> unpaired;
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
    if (!pool.insert(stubs[i], stubs[i + 1])) {
      unpaired.push_back(stubs[i]);
      unpaired.push_back(stubs[i + 1]);
    }
  }

  for (std::size_t pass = 0; pass < opt.rewiring_passes && !unpaired.empty(); ++pass) {
    rng.shuffle(std::span<Vertex>(unpaired));
    std::vector<Vertex> leftover;
    for (std::size_t i = 0; i + 1 < unpaired.size(); i += 2) {
      const Vertex x = unpaired[i];
      const Vertex y = unpaired[i + 1];
      if (x != y && pool.insert(x, y)) continue;
      bool placed = false;
      for (std::size_t attempt = 0; attempt < opt.rewiring_tries && pool.size() > 0; ++attempt) {
        const std::size_t idx = rng.below(pool.size());
        auto [a, b] = pool.at(idx);
        if (rng.below(2) == 1) std::swap(a, b);
        // Replace {a,b} by {x,a} and {y,b}.
        if (a == x || b == y || a == y || b == x) continue;
        if (pool.contains(x, a) || pool.contains(y, b)) continue;
        if (x == y && a == b) continue;
        pool.erase_at(idx);
        pool.insert(x, a);
        pool.insert(y, b);
        placed = true;
        break;
      }
      if (!placed) {
        leftover.push_back(x);
        leftover.push_back(y);
      }
    }
    unpaired = std::move(leftover);
  }
  if (!unpaired.empty()) {
    std::ostringstream os;
    os << "seed " << seed << ": " << unpaired.size() << " stubs left after rewiring";
    diagnostics = os.str();
    return std::nullopt;
  }
  return pool.all();
}

}  // namespace detail

/// Random simple connected d'-regular graph via the configuration model.
///
/// Stubs are paired uniformly; self-loops and repeated pairs are dropped and
/// the resulting deficits are repaired by random rewiring. An attempt that
/// cannot be repaired, or whose result is disconnected, is retried with the
/// next seed. Deterministic for fixed (n, d', seed).
inline HostGraph generate_regular(std::size_t n, std::uint32_t d_prime, std::uint64_t seed,
                                  const RegularGeneratorOptions& opt = {}) {
  if ((n * d_prime) % 2 != 0) throw PreconditionError("generate_regular: n*d' must be even");
  if (d_prime >= n) throw PreconditionError("generate_regular: d' must be < n");
  if (n > std::numeric_limits<Vertex>::max()) throw PreconditionError("generate_regular: n too large");

  std::string diagnostics = "no attempt made";
  for (std::size_t attempt = 0; attempt < opt.max_attempts; ++attempt) {
    const std::uint64_t s = seed + attempt;
    auto edges = detail::try_configuration_model(n, d_prime, s, opt, diagnostics);
    if (!edges) continue;
    HostGraph g = HostGraph::from_edges(n, *edges, d_prime, s);
    if (!is_connected(g)) {
      diagnostics = "seed " + std::to_string(s) + ": disconnected";
      continue;
    }
    return g;
  }
  throw GenerationError("generate_regular(n=" + std::to_string(n) + ", d'=" + std::to_string(d_prime) +
                        ") failed after " + std::to_string(opt.max_attempts) +
                        " attempts; last: " + diagnostics);
}

/// Graph whose edges join every pair of vertices sharing a hyperedge.
///
/// The degree field is d(r-1) only when the hypergraph is regular and no two
/// hyperedges contribute the same vertex pair.
inline HostGraph clique_expansion(const Hypergraph& h) {
  h.validate();
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::pair<Vertex, Vertex>> edges;
  bool merged = false;
  for (const auto& e : h.hyperedges) {
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (std::size_t j = i + 1; j < e.size(); ++j) {
        if (seen.insert(detail::edge_key(e[i], e[j])).second) {
          edges.emplace_back(e[i], e[j]);
        } else {
          merged = true;
        }
      }
    }
  }
  std::optional<std::uint32_t> degree;
  if (auto d = h.regular_degree(); d && !merged) {
    degree = static_cast<std::uint32_t>(*d * (h.r - 1));
  }
  return HostGraph::from_edges(h.n_vertices, edges, degree);
}

}  // namespace blockroute
