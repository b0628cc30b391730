#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "blockroute/blocks.hpp"
#include "blockroute/error.hpp"
#include "blockroute/graphs.hpp"
#include "blockroute/spectral.hpp"

namespace blockroute {

/// Weighted supervertex graph of a block configuration.
///
/// `weights` holds A_Q[i][j] = |E(B_i, B_j)| / sqrt(|B_i| |B_j|) (row-major,
/// zero diagonal). `support` joins blocks at host distance <= guard + 1 and is
/// the graph routing runs on; it contains every pair with positive weight.
struct QuotientGraph {
  std::size_t n_blocks = 0;
  std::vector<double> weights;
  HostGraph support;
  double avg_degree = 0.0;  // d'_Q, mean row sum of weights
  SpectralSummary spectral;
  std::vector<double> second_vector;  // eigenvector for lambda_2 of A_Q
  std::uint32_t diameter = 0;         // hops on support

  double weight(BlockId i, BlockId j) const { return weights[i * n_blocks + j]; }
};

struct QuotientOptions {
  LanczosOptions lanczos;
  bool uniform_shortcut = true;  // count / s when every block has size s
};

namespace detail {

// Number of host edges between each pair of blocks (row-major, symmetric).
inline std::vector<std::uint64_t> inter_block_edge_counts(const HostGraph& g, const BlockConfiguration& cfg) {
  const std::size_t k = cfg.block_count();
  std::vector<std::uint64_t> counts(k * k, 0);
  for (BlockId b = 0; b < k; ++b) {
    for (Vertex u : cfg.blocks[b]) {
      for (Vertex v : g.neighbors(u)) {
        const std::int32_t c = cfg.footprint[v];
        if (c != kNoBlock && static_cast<BlockId>(c) != b) ++counts[b * k + static_cast<BlockId>(c)];
      }
    }
  }
  return counts;
}

// Pairs of blocks at host distance <= radius.
inline std::vector<std::pair<Vertex, Vertex>> blocks_within(const HostGraph& g, const BlockConfiguration& cfg,
                                                            std::uint32_t radius) {
  const std::size_t k = cfg.block_count();
  std::vector<std::pair<Vertex, Vertex>> pairs;
  std::vector<std::uint32_t> dist(g.vertex_count());
  std::vector<Vertex> queue;
  for (BlockId b = 0; b < k; ++b) {
    std::fill(dist.begin(), dist.end(), kUnreachable);
    queue.assign(cfg.blocks[b].begin(), cfg.blocks[b].end());
    for (Vertex v : queue) dist[v] = 0;
    std::vector<char> hit(k, 0);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Vertex u = queue[head];
      const std::int32_t owner = cfg.footprint[u];
      if (owner != kNoBlock && static_cast<BlockId>(owner) != b) hit[static_cast<std::size_t>(owner)] = 1;
      if (dist[u] == radius) continue;
      for (Vertex v : g.neighbors(u)) {
        if (dist[v] == kUnreachable) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
      }
    }
    for (BlockId c = b + 1; c < k; ++c) {
      if (hit[c]) pairs.emplace_back(b, c);
    }
  }
  return pairs;
}

}  // namespace detail

/// Quotient weights from the general normalization D_B^{-1/2} S^T A S D_B^{-1/2}
/// with the diagonal removed. Works for blocks of unequal size.
inline std::vector<double> normalized_quotient_weights(const HostGraph& g, const BlockConfiguration& cfg) {
  const std::size_t k = cfg.block_count();
  const auto counts = detail::inter_block_edge_counts(g, cfg);
  std::vector<double> w(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const double norm = std::sqrt(static_cast<double>(cfg.blocks[i].size()) * static_cast<double>(cfg.blocks[j].size()));
      w[i * k + j] = static_cast<double>(counts[i * k + j]) / norm;
    }
  }
  return w;
}

/// Builds the quotient graph, its spectral summary and its diameter.
inline QuotientGraph build_quotient(const HostGraph& g, const BlockConfiguration& cfg,
                                    const QuotientOptions& opt = {}) {
  const std::size_t k = cfg.block_count();
  if (k < 2) throw PreconditionError("build_quotient: need at least two blocks");
  if (cfg.footprint.size() != g.vertex_count()) throw PreconditionError("build_quotient: configuration/graph mismatch");

  QuotientGraph q;
  q.n_blocks = k;

  const bool uniform = std::all_of(cfg.blocks.begin(), cfg.blocks.end(),
                                   [&](const VertexSet& b) { return b.size() == cfg.s; });
  if (uniform && opt.uniform_shortcut) {
    const auto counts = detail::inter_block_edge_counts(g, cfg);
    q.weights.resize(k * k);
    for (std::size_t i = 0; i < k * k; ++i) q.weights[i] = static_cast<double>(counts[i]) / static_cast<double>(cfg.s);
  } else {
    q.weights = normalized_quotient_weights(g, cfg);
  }

  q.support = HostGraph::from_edges(k, detail::blocks_within(g, cfg, cfg.guard + 1));
  if (!is_connected(q.support)) {
    throw QuotientDisconnectedError("build_quotient: support graph of " + std::to_string(k) +
                                    " blocks is disconnected");
  }

  double total = 0.0;
  for (double w : q.weights) total += w;
  q.avg_degree = total / static_cast<double>(k);
  if (!(q.avg_degree > 0.0)) {
    throw QuotientDisconnectedError("build_quotient: no host edges between blocks (d'_Q = 0)");
  }

  auto pairs = extreme_eigenpairs(SymmetricCsr::from_dense(k, q.weights), opt.lanczos);
  q.spectral = with_ratio(pairs.summary, q.avg_degree);
  q.second_vector = std::move(pairs.second_vector);
  q.diameter = diameter(q.support);
  return q;
}

/// Invariant violations of a built quotient (empty if none).
inline std::vector<std::string> audit_quotient(const HostGraph& g, const BlockConfiguration& cfg,
                                               const QuotientGraph& q) {
  std::vector<std::string> problems;
  const std::size_t k = q.n_blocks;
  for (std::size_t i = 0; i < k; ++i) {
    if (q.weight(i, i) != 0.0) problems.push_back("nonzero diagonal at " + std::to_string(i));
    for (std::size_t j = 0; j < k; ++j) {
      if (q.weight(i, j) < 0.0) problems.push_back("negative weight");
      if (q.weight(i, j) != q.weight(j, i)) problems.push_back("asymmetric weight");
    }
  }
  for (BlockId i = 0; i < k; ++i) {
    const auto dist = bfs_distances(g, std::span<const Vertex>(cfg.blocks[i]));
    for (BlockId j = 0; j < k; ++j) {
      if (i == j) continue;
      std::uint32_t d = kUnreachable;
      for (Vertex v : cfg.blocks[j]) d = std::min(d, dist[v]);
      const bool near = d <= cfg.guard + 1;
      if (near != q.support.has_edge(i, j)) problems.push_back("support disagrees with distance rule");
      if (q.weight(i, j) > 0.0 && d != 1) problems.push_back("positive weight between non-adjacent blocks");
      if (d == 1 && !(q.weight(i, j) > 0.0)) problems.push_back("adjacent blocks with zero weight");
      if (!near && q.weight(i, j) != 0.0) problems.push_back("far blocks with nonzero weight");
    }
  }
  return problems;
}

// --------------------------------------------------------------------------
// Sweep cut

struct SweepCut {
  std::vector<BlockId> side;      // blocks on the small side
  double quotient_conductance = 0.0;
  double host_conductance = 0.0;  // |E(T, T^c)| / (|T| d') of the lifted set
};

/// Best-conductance prefix of the blocks ordered by the second eigenvector
/// of A_Q, lifted to the union of its blocks in the host.
inline SweepCut lifted_sweep_cut(const HostGraph& g, const BlockConfiguration& cfg, const QuotientGraph& q) {
  if (!g.degree()) throw PreconditionError("lifted_sweep_cut: host must be regular");
  const std::size_t k = q.n_blocks;
  std::vector<BlockId> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](BlockId a, BlockId b) { return q.second_vector[a] < q.second_vector[b]; });

  std::vector<double> volume(k, 0.0);
  double total_volume = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) volume[i] += q.weight(i, j);
    total_volume += volume[i];
  }

  std::vector<char> in_set(k, 0);
  double cut = 0.0, vol = 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_len = 1;
  for (std::size_t len = 1; len < k; ++len) {
    const BlockId b = order[len - 1];
    for (std::size_t j = 0; j < k; ++j) cut += in_set[j] ? -q.weight(b, j) : q.weight(b, j);
    in_set[b] = 1;
    vol += volume[b];
    const double denom = std::min(vol, total_volume - vol);
    if (denom <= 0.0) continue;
    const double phi = cut / denom;
    if (phi < best) {
      best = phi;
      best_len = len;
    }
  }

  SweepCut out;
  out.quotient_conductance = best;
  out.side.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best_len));
  if (out.side.size() * 2 > k) {  // report the smaller side
    out.side.assign(order.begin() + static_cast<std::ptrdiff_t>(best_len), order.end());
  }

  std::vector<char> lifted(g.vertex_count(), 0);
  std::size_t size = 0;
  for (BlockId b : out.side) {
    for (Vertex v : cfg.blocks[b]) lifted[v] = 1;
    size += cfg.blocks[b].size();
  }
  std::uint64_t boundary = 0;
  for (Vertex u = 0; u < g.vertex_count(); ++u) {
    if (!lifted[u]) continue;
    for (Vertex v : g.neighbors(u)) boundary += lifted[v] ? 0 : 1;
  }
  out.host_conductance = static_cast<double>(boundary) / (static_cast<double>(size) * *g.degree());
  return out;
}

// --------------------------------------------------------------------------
// Regime conditions

enum class RegimeVerdict { no, marginal, yes };

inline const char* to_string(RegimeVerdict v) {
  switch (v) {
    case RegimeVerdict::yes: return "yes";
    case RegimeVerdict::marginal: return "marginal";
    case RegimeVerdict::no: return "no";
  }
  return "?";
}

struct RegimeCheck {
  double loose_threshold = 0.0;  // d_C^2 (r-1) / (1 - beta)
  double tight_threshold = 0.0;  // d_C (r-1) / (1 - beta)
  bool in_loose_regime = false;
  bool in_tight_regime = false;
  RegimeVerdict verdict = RegimeVerdict::no;  // against the loose threshold
};

/// Fraction of the loose threshold above which an out-of-regime degree is
/// reported as marginal rather than no.
inline constexpr double kMarginalFraction = 0.75;

inline RegimeCheck regime_check(double d_prime, std::uint32_t d_C, std::uint32_t r, double beta_host) {
  if (!(beta_host >= 0.0) || beta_host >= 1.0) throw PreconditionError("regime_check: beta must lie in [0, 1)");
  if (r < 2) throw PreconditionError("regime_check: r must be >= 2");
  RegimeCheck c;
  const double gap = 1.0 - beta_host;
  c.loose_threshold = static_cast<double>(d_C) * d_C * (r - 1) / gap;
  c.tight_threshold = static_cast<double>(d_C) * (r - 1) / gap;
  c.in_loose_regime = d_prime > c.loose_threshold;
  c.in_tight_regime = d_prime > c.tight_threshold;
  c.verdict = c.in_loose_regime                                   ? RegimeVerdict::yes
              : d_prime >= kMarginalFraction * c.loose_threshold ? RegimeVerdict::marginal
                                                                  : RegimeVerdict::no;
  return c;
}

enum class RegimeForm { tight, loose };

/// Smallest base degree d such that d' = d(r-1) satisfies the regime
/// condition with the Ramanujan value beta = 2 sqrt(d'-1)/d'.
inline std::uint32_t min_degree_for_regime(std::uint32_t d_C, std::uint32_t r, RegimeForm form = RegimeForm::tight) {
  if (d_C < 2) throw PreconditionError("min_degree_for_regime: d_C must be >= 2");
  if (r < 3) throw PreconditionError("min_degree_for_regime: r must be >= 3");
  const double width = form == RegimeForm::tight ? static_cast<double>(d_C) : static_cast<double>(d_C) * d_C;
  for (std::uint32_t d = 1;; ++d) {
    const double dp = static_cast<double>(d) * (r - 1);
    if (dp < 2.0) continue;
    const double beta = 2.0 * std::sqrt(dp - 1.0) / dp;
    if (beta >= 1.0) continue;
    if (dp > width * (r - 1) / (1.0 - beta)) return d;
  }
}

}  // namespace blockroute
