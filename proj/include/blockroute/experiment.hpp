#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "blockroute/blocks.hpp"
#include "blockroute/error.hpp"
#include "blockroute/ft_budget.hpp"
#include "blockroute/graphs.hpp"
#include "blockroute/hop.hpp"
#include "blockroute/quotient.hpp"
#include "blockroute/random.hpp"
#include "blockroute/routing.hpp"
#include "blockroute/spectral.hpp"

namespace blockroute {

enum class Mode { simulate, sweep, regime, ft_budget, decompose };
enum class OutputFormat { csv, json };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::simulate: return "simulate";
    case Mode::sweep: return "sweep";
    case Mode::regime: return "regime";
    case Mode::ft_budget: return "ft-budget";
    case Mode::decompose: return "decompose";
  }
  return "?";
}

inline Mode parse_mode(const std::string& s) {
  for (Mode m : {Mode::simulate, Mode::sweep, Mode::regime, Mode::ft_budget, Mode::decompose}) {
    if (s == to_string(m)) return m;
  }
  throw PreconditionError("unknown mode '" + s + "'");
}

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw PreconditionError("unknown output format '" + s + "' (expected csv or json)");
}

/// Host size used when a config does not give one. Large enough for 64
/// blocks of 49 atoms; see README for how it was chosen.
inline constexpr std::size_t kDefaultHostVertices = 5000;

struct ExperimentConfig {
  Mode mode = Mode::simulate;
  std::size_t n_vertices = kDefaultHostVertices;
  std::uint32_t d_prime = 100;
  std::uint32_t r = 3;
  std::uint32_t d_C = 3;
  std::uint32_t N_L = 8;
  std::uint32_t guard = 1;
  std::size_t trials = 3;
  std::uint64_t base_seed = 1;
  std::string output_path;  // empty means stdout
  OutputFormat output_format = OutputFormat::csv;
  std::size_t parallelism = 0;  // 0 means hardware concurrency
  bool timing = false;          // emit wall_time_ms (breaks byte-for-byte determinism)

  std::vector<std::uint32_t> d_prime_list{50, 100, 200, 400};  // sweep
  std::vector<std::uint32_t> d_C_list{3, 5, 7, 9};             // regime

  // ft-budget
  double p_phys = 1e-4;
  double C_circ = 10.0;
  double p_th = 1e-2;
  double p_target = 1e-9;
  std::vector<double> p_phys_rows{5e-3, 1e-3, 1e-4, 1e-5};
  std::vector<std::uint32_t> ft_d_C_list{5, 7, 9};

  /// Mode-specific defaults for d', d_C and N_L.
  static ExperimentConfig defaults_for(Mode mode) {
    ExperimentConfig c;
    c.mode = mode;
    if (mode == Mode::sweep) {
      c.d_C = 7;
      c.N_L = 32;
      c.d_prime = 200;
    } else if (mode == Mode::ft_budget) {
      c.d_C = 7;
      c.N_L = 100;
    }
    return c;
  }

  FtParams ft_params(std::uint32_t code_distance) const {
    FtParams p;
    p.p_phys = p_phys;
    p.C_circ = C_circ;
    p.p_th = p_th;
    p.d_C = code_distance;
    p.N_L = N_L;
    p.p_target = p_target;
    return p;
  }

  void validate() const {
    if (trials < 1) throw PreconditionError("config: trials must be >= 1");
    switch (mode) {
      case Mode::simulate:
      case Mode::decompose:
        validate_simulation(d_prime);
        break;
      case Mode::sweep:
        if (d_prime_list.empty()) throw PreconditionError("config: d_prime_list is empty");
        for (auto dp : d_prime_list) validate_simulation(dp);
        break;
      case Mode::regime:
        if (d_C_list.empty()) throw PreconditionError("config: d_C_list is empty");
        for (auto d : d_C_list) {
          if (d < 2) throw PreconditionError("config: regime table needs d_C >= 2");
        }
        if (r < 3) throw PreconditionError("config: regime table needs r >= 3");
        break;
      case Mode::ft_budget:
        ft_params(d_C).validate();
        for (double p : p_phys_rows) {
          FtParams row = ft_params(d_C);
          row.p_phys = p;
          row.validate();
        }
        break;
    }
  }

 private:
  void validate_simulation(std::uint32_t degree) const {
    const std::size_t s = static_cast<std::size_t>(d_C) * d_C;
    if (d_C < 1) throw PreconditionError("config: d_C must be >= 1");
    if (N_L < 2) throw PreconditionError("config: N_L must be >= 2");
    if (r < 2) throw PreconditionError("config: r must be >= 2");
    if (degree < 1 || degree >= n_vertices) throw PreconditionError("config: need 1 <= d' < n_vertices");
    if ((n_vertices * degree) % 2 != 0) throw PreconditionError("config: n_vertices * d' must be even");
    if (static_cast<std::size_t>(N_L) * s > n_vertices) {
      throw PreconditionError("config: N_L * d_C^2 = " + std::to_string(N_L * s) + " exceeds n_vertices = " +
                              std::to_string(n_vertices));
    }
  }
};

// --------------------------------------------------------------------------
// Worker pool

/// Evaluates fn(0..count-1) on `workers` threads and returns results in index
/// order. The exception of the lowest failing index is rethrown.
template <class Fn>
auto parallel_map(std::size_t count, std::size_t workers, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}));
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(count, 1));
  std::vector<std::optional<Result>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<Result> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// --------------------------------------------------------------------------
// Simulation trials

struct TrialRecord {
  std::uint32_t d_C = 0;
  std::uint32_t N_L = 0;
  std::uint32_t d_prime = 0;
  std::uint64_t seed = 0;
  double beta_host = 0.0;
  double beta_Q = 0.0;
  double d_Q_avg = 0.0;
  std::uint32_t diameter_Q = 0;
  std::uint32_t C_Q = 0;
  std::uint32_t D_Q = 0;
  std::uint64_t T_sched = 0;
  std::uint64_t T_physical = 0;
  std::uint64_t hop_decomposition_rounds = 0;
  double wall_time_ms = 0.0;
};

/// Everything a trial built, kept for audits and tests.
struct TrialArtifacts {
  HostGraph host;
  SpectralSummary host_spectrum;
  BlockConfiguration blocks;
  QuotientGraph quotient;
  RoutingOutcome routing;
  HopPlan hop;
  TrialRecord record;
};

namespace detail {

inline void require_clean(const std::vector<std::string>& problems, const std::string& what) {
  if (problems.empty()) return;
  std::string msg = what + " audit failed:";
  for (const auto& p : problems) msg += " [" + p + "]";
  throw ContractViolation(msg);
}

inline std::string trial_context(const ExperimentConfig& cfg, std::uint32_t d_prime, std::uint64_t seed) {
  return "trial (d_C=" + std::to_string(cfg.d_C) + ", N_L=" + std::to_string(cfg.N_L) +
         ", d'=" + std::to_string(d_prime) + ", n=" + std::to_string(cfg.n_vertices) +
         ", seed=" + std::to_string(seed) + ")";
}

}  // namespace detail

/// One full pipeline run with seed base_seed + trial_index: host, blocks,
/// quotient, Valiant routing, greedy schedule and one sampled block hop.
/// Every stage is audited; a failed audit raises ContractViolation.
inline TrialArtifacts run_trial_artifacts(const ExperimentConfig& cfg, std::size_t trial_index) {
  const std::uint64_t seed = cfg.base_seed + trial_index;
  const auto start = std::chrono::steady_clock::now();
  try {
    HostGraph host = generate_regular(cfg.n_vertices, cfg.d_prime, derive_seed(seed, 0));
    detail::require_clean(audit_host_graph(host), "host graph");
    SpectralSummary host_spectrum = host_spectral_ratio(host);

    BlockConfiguration blocks = place_blocks(host, cfg.N_L, cfg.d_C, cfg.guard, derive_seed(seed, 1));
    detail::require_clean(audit_block_configuration(host, blocks), "block configuration");

    QuotientGraph quotient = build_quotient(host, blocks);
    detail::require_clean(audit_quotient(host, blocks, quotient), "quotient");

    Rng perm_rng(derive_seed(seed, 2));
    const Permutation pi = random_permutation(cfg.N_L, perm_rng);
    RoutingOutcome routing = schedule_greedy(valiant_route(quotient, pi, derive_seed(seed, 3), cfg.d_C));
    detail::require_clean(audit_routing(quotient.support, routing), "routing");

    Rng hop_rng(derive_seed(seed, 4));
    const auto block = static_cast<BlockId>(hop_rng.below(cfg.N_L));
    const VertexSet target = propose_hop_target(host, blocks, block, derive_seed(seed, 5));
    HopPlan hop = decompose_hop_into_matchings(plan_block_hop(host, blocks, block, target));
    detail::require_clean(audit_hop_plan(host, hop), "hop plan");

    TrialRecord rec;
    rec.d_C = cfg.d_C;
    rec.N_L = cfg.N_L;
    rec.d_prime = cfg.d_prime;
    rec.seed = seed;
    rec.beta_host = host_spectrum.beta;
    rec.beta_Q = quotient.spectral.beta;
    rec.d_Q_avg = quotient.avg_degree;
    rec.diameter_Q = quotient.diameter;
    rec.C_Q = routing.congestion;
    rec.D_Q = routing.dilation;
    rec.T_sched = routing.scheduled_steps();
    rec.T_physical = routing.physical_depth;
    rec.hop_decomposition_rounds = hop.rounds();
    rec.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return {std::move(host), host_spectrum, std::move(blocks), std::move(quotient),
            std::move(routing), std::move(hop), rec};
  } catch (Error& e) {
    e.add_context(detail::trial_context(cfg, cfg.d_prime, seed));
    throw;
  }
}

inline TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t trial_index) {
  return run_trial_artifacts(cfg, trial_index).record;
}

/// Means over the trials of one configuration, plus alpha.
struct TrialAggregate {
  std::uint32_t d_C = 0;
  std::uint32_t N_L = 0;
  std::uint32_t d_prime = 0;
  std::size_t trials = 0;
  double beta_host = 0.0;
  double beta_Q = 0.0;
  double max_beta_Q = 0.0;
  double d_Q_avg = 0.0;
  double diameter_Q = 0.0;
  double C_Q = 0.0;
  double D_Q = 0.0;
  double T_sched = 0.0;
  double T_physical = 0.0;
  double hop_decomposition_rounds = 0.0;
  double alpha = 0.0;  // mean T_physical / (d_C log2 N_L)
  double wall_time_ms = 0.0;
};

inline TrialAggregate aggregate(const std::vector<TrialRecord>& records) {
  TrialAggregate a;
  if (records.empty()) return a;
  a.d_C = records.front().d_C;
  a.N_L = records.front().N_L;
  a.d_prime = records.front().d_prime;
  a.trials = records.size();
  for (const auto& r : records) {
    a.beta_host += r.beta_host;
    a.beta_Q += r.beta_Q;
    a.max_beta_Q = std::max(a.max_beta_Q, r.beta_Q);
    a.d_Q_avg += r.d_Q_avg;
    a.diameter_Q += r.diameter_Q;
    a.C_Q += r.C_Q;
    a.D_Q += r.D_Q;
    a.T_sched += static_cast<double>(r.T_sched);
    a.T_physical += static_cast<double>(r.T_physical);
    a.hop_decomposition_rounds += static_cast<double>(r.hop_decomposition_rounds);
    a.wall_time_ms += r.wall_time_ms;
  }
  const double k = static_cast<double>(records.size());
  for (double* f : {&a.beta_host, &a.beta_Q, &a.d_Q_avg, &a.diameter_Q, &a.C_Q, &a.D_Q, &a.T_sched, &a.T_physical,
                    &a.hop_decomposition_rounds, &a.wall_time_ms}) {
    *f /= k;
  }
  const double scale = a.d_C * std::log2(static_cast<double>(a.N_L));
  a.alpha = scale > 0.0 ? a.T_physical / scale : 0.0;
  return a;
}

struct SimulateResult {
  std::vector<TrialRecord> records;
  TrialAggregate summary;
};

inline SimulateResult run_simulate(const ExperimentConfig& cfg) {
  cfg.validate();
  SimulateResult out;
  out.records = parallel_map(cfg.trials, cfg.parallelism, [&](std::size_t i) { return run_trial(cfg, i); });
  out.summary = aggregate(out.records);
  return out;
}

// --------------------------------------------------------------------------
// Threshold sweep

struct SweepRow {
  std::uint32_t d_prime = 0;
  double beta_host = 0.0;
  double ramanujan_beta = 0.0;  // 2 sqrt(d'-1)/d'
  double threshold = 0.0;       // d_C^2 (r-1) / (1 - beta_host)
  RegimeVerdict verdict = RegimeVerdict::no;
  double T_physical = 0.0;
  double beta_Q = 0.0;
};

inline std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<SweepRow> rows;
  for (std::uint32_t dp : cfg.d_prime_list) {
    ExperimentConfig one = cfg;
    one.mode = Mode::simulate;
    one.d_prime = dp;
    const auto sim = run_simulate(one);
    SweepRow row;
    row.d_prime = dp;
    row.beta_host = sim.summary.beta_host;
    row.ramanujan_beta = alon_boppana_reference(dp);
    const auto check = regime_check(dp, cfg.d_C, cfg.r, row.beta_host);
    row.threshold = check.loose_threshold;
    row.verdict = check.verdict;
    row.T_physical = sim.summary.T_physical;
    row.beta_Q = sim.summary.beta_Q;
    rows.push_back(row);
  }
  return rows;
}

// --------------------------------------------------------------------------
// Minimum-degree table

struct RegimeRow {
  std::uint32_t d_C = 0;
  std::uint32_t r = 0;
  std::uint32_t min_d = 0;        // tight form
  std::uint32_t d_prime = 0;      // min_d (r-1)
  double beta = 0.0;              // Ramanujan beta at d_prime
  std::uint32_t min_d_loose = 0;  // loose form
  std::uint32_t d_prime_loose = 0;
  std::uint64_t min_vertices_64 = 0;  // N_L d_C^2 at N_L = 64
};

inline std::vector<RegimeRow> run_regime(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<RegimeRow> rows;
  for (std::uint32_t d_C : cfg.d_C_list) {
    RegimeRow row;
    row.d_C = d_C;
    row.r = cfg.r;
    row.min_d = min_degree_for_regime(d_C, cfg.r, RegimeForm::tight);
    row.d_prime = row.min_d * (cfg.r - 1);
    row.beta = alon_boppana_reference(row.d_prime);
    row.min_d_loose = min_degree_for_regime(d_C, cfg.r, RegimeForm::loose);
    row.d_prime_loose = row.min_d_loose * (cfg.r - 1);
    row.min_vertices_64 = 64ull * d_C * d_C;
    rows.push_back(row);
  }
  return rows;
}

// --------------------------------------------------------------------------
// Fault-tolerance report

struct FtBudgetRow {
  std::uint32_t d_C = 0;
  FtBudget budget;
  std::optional<ComposedDepth> correlated;    // empty when K_max_exact = 0
  std::optional<ComposedDepth> uncorrelated;
};

struct FtReport {
  FtParams params;  // at the configured d_C
  std::vector<OperatingPoint> operating_points;
  std::vector<FtBudgetRow> budgets;
  std::vector<KmaxDiscrepancy> k_max_discrepancies;
  std::vector<std::string> notes;
};

inline FtReport run_ft_budget(const ExperimentConfig& cfg) {
  cfg.validate();
  FtReport rep;
  rep.params = cfg.ft_params(cfg.d_C);
  rep.operating_points = operating_point_table(cfg.p_phys_rows, cfg.ft_d_C_list, cfg.C_circ, cfg.p_th);
  std::vector<std::uint32_t> distances = cfg.ft_d_C_list;
  if (std::find(distances.begin(), distances.end(), cfg.d_C) == distances.end()) distances.push_back(cfg.d_C);
  std::sort(distances.begin(), distances.end());
  for (std::uint32_t d : distances) {
    FtBudgetRow row;
    row.d_C = d;
    const FtParams p = cfg.ft_params(d);
    row.budget = total_logical_error(p);
    if (row.budget.k_max_exact.value > 0) {
      row.correlated = compose_syndrome_budget(d, p.N_L, row.budget.k_max_exact.value, true);
      row.uncorrelated = compose_syndrome_budget(d, p.N_L, row.budget.k_max_exact.value, false);
    } else {
      rep.notes.push_back("d_C=" + std::to_string(d) + ": K_max_exact = 0, no admissible correction window");
    }
    rep.budgets.push_back(std::move(row));
  }
  rep.k_max_discrepancies = k_max_discrepancy_report();
  for (const auto& d : rep.k_max_discrepancies) {
    if (!d.reconciled) rep.notes.push_back(d.message);
  }
  for (const auto& op : rep.operating_points) {
    if (op.note) {
      char buf[48];
      std::snprintf(buf, sizeof buf, "operating point p_phys=%g: ", op.p_phys);
      rep.notes.push_back(buf + *op.note);
    }
  }
  return rep;
}

// --------------------------------------------------------------------------
// Hop decomposition trials

struct HopRecord {
  std::uint32_t d_C = 0;
  std::uint32_t N_L = 0;
  std::uint32_t d_prime = 0;
  std::uint64_t seed = 0;
  std::uint32_t block = 0;
  std::uint32_t C_phys = 0;
  std::uint32_t D_phys = 0;
  std::uint64_t rounds = 0;
  bool edge_colored = false;
  double rounds_per_d_C = 0.0;
};

/// Per trial: host, blocks and one sampled block hop, decomposed into rounds.
inline std::vector<HopRecord> run_decompose(const ExperimentConfig& cfg) {
  cfg.validate();
  return parallel_map(cfg.trials, cfg.parallelism, [&](std::size_t i) {
    const std::uint64_t seed = cfg.base_seed + i;
    try {
      const HostGraph host = generate_regular(cfg.n_vertices, cfg.d_prime, derive_seed(seed, 0));
      const BlockConfiguration blocks = place_blocks(host, cfg.N_L, cfg.d_C, cfg.guard, derive_seed(seed, 1));
      Rng hop_rng(derive_seed(seed, 4));
      const auto block = static_cast<BlockId>(hop_rng.below(cfg.N_L));
      const VertexSet target = propose_hop_target(host, blocks, block, derive_seed(seed, 5));
      const HopPlan hop = decompose_hop_into_matchings(plan_block_hop(host, blocks, block, target));
      detail::require_clean(audit_hop_plan(host, hop), "hop plan");
      HopRecord rec;
      rec.d_C = cfg.d_C;
      rec.N_L = cfg.N_L;
      rec.d_prime = cfg.d_prime;
      rec.seed = seed;
      rec.block = block;
      rec.C_phys = hop.congestion;
      rec.D_phys = hop.dilation;
      rec.rounds = hop.rounds();
      rec.edge_colored = hop.edge_colored;
      rec.rounds_per_d_C = static_cast<double>(hop.rounds()) / cfg.d_C;
      return rec;
    } catch (Error& e) {
      e.add_context(detail::trial_context(cfg, cfg.d_prime, seed));
      throw;
    }
  });
}

}  // namespace blockroute
