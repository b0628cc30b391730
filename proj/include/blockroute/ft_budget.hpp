#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blockroute/error.hpp"

namespace blockroute {

/// Error-model parameters for one fault-tolerance budget evaluation.
struct FtParams {
  double p_phys = 1e-4;      // per-gate physical error probability
  double C_circ = 10.0;      // circuit-level inflation, p_eff = C_circ * p_phys
  double p_th = 1e-2;        // surface-code threshold
  std::uint32_t d_C = 7;     // code distance
  std::uint64_t N_L = 100;   // number of logical blocks
  double p_target = 1e-9;    // admissible per-block failure probability
  // Carried for completeness; no formula consumes them.
  double p_loss = 0.0;
  double transport_fidelity = 1.0;

  double p_eff() const { return C_circ * p_phys; }
  std::uint32_t t() const { return (d_C - 1) / 2; }

  /// Parameters with a prescribed effective rate (C_circ stays at 10).
  static FtParams from_p_eff(double p_eff, std::uint32_t d_C, double p_target = 1e-9, std::uint64_t N_L = 100) {
    FtParams p;
    p.p_phys = p_eff / p.C_circ;
    p.d_C = d_C;
    p.p_target = p_target;
    p.N_L = N_L;
    return p;
  }

  void validate() const {
    auto prob = [](double x, const char* name, bool allow_one) {
      if (!(x > 0.0) || x > 1.0 || (!allow_one && x == 1.0)) {
        throw PreconditionError(std::string("FtParams: ") + name + " must lie in (0,1" + (allow_one ? "]" : ")"));
      }
    };
    prob(p_phys, "p_phys", false);
    prob(p_th, "p_th", false);
    prob(p_target, "p_target", true);
    if (C_circ < 5.0 || C_circ > 15.0) throw PreconditionError("FtParams: C_circ must lie in [5,15]");
    if (p_eff() >= 1.0) throw PreconditionError("FtParams: p_eff = C_circ * p_phys must be below 1");
    if (d_C < 1) throw PreconditionError("FtParams: d_C must be >= 1");
    if (N_L < 1) throw PreconditionError("FtParams: N_L must be >= 1");
  }
};

// --------------------------------------------------------------------------
// Syndrome interval K_max

/// Closed-form Chernoff interval floor((t - sqrt(2 t ln(1/p_target))) / (d_C^2 p_eff)),
/// clamped to 0 when the numerator is negative.
inline std::uint64_t k_max_chernoff(const FtParams& p) {
  p.validate();
  const double t = p.t();
  const double numerator = t - std::sqrt(2.0 * t * std::log(1.0 / p.p_target));
  if (numerator <= 0.0) return 0;
  const double d2 = static_cast<double>(p.d_C) * p.d_C;
  return static_cast<std::uint64_t>(std::floor(numerator / (d2 * p.p_eff())));
}

namespace detail {

inline double log_binomial_pmf(std::uint64_t n, std::uint64_t k, double log_p, double log_q) {
  const double nd = static_cast<double>(n), kd = static_cast<double>(k);
  return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) + kd * log_p + (nd - kd) * log_q;
}

// Neumaier-compensated accumulator.
struct CompensatedSum {
  double sum = 0.0, carry = 0.0;
  void add(double x) {
    const double s = sum + x;
    carry += std::fabs(sum) >= std::fabs(x) ? (sum - s) + x : (x - s) + sum;
    sum = s;
  }
  double value() const { return sum + carry; }
};

}  // namespace detail

/// P(X > t) for X ~ Binomial(n, p), summed term by term in log space.
///
/// Below the mean the tail is summed upward until terms vanish; otherwise it
/// is taken as the complement of the (short) lower sum.
inline double binomial_upper_tail(std::uint64_t n, double p, std::uint64_t t) {
  if (t >= n) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  const double log_p = std::log(p), log_q = std::log1p(-p);
  const double mean = static_cast<double>(n) * p;
  detail::CompensatedSum acc;
  if (static_cast<double>(t + 1) > mean) {
    for (std::uint64_t k = t + 1; k <= n; ++k) {
      const double term = std::exp(detail::log_binomial_pmf(n, k, log_p, log_q));
      acc.add(term);
      if (term < 1e-18 * acc.value() || (term == 0.0 && k > t + 1)) break;
    }
    return std::min(1.0, acc.value());
  }
  for (std::uint64_t k = 0; k <= t; ++k) acc.add(std::exp(detail::log_binomial_pmf(n, k, log_p, log_q)));
  return std::clamp(1.0 - acc.value(), 0.0, 1.0);
}

struct KmaxExact {
  std::uint64_t value = 0;
  bool capped = false;  // true when no finite K violates the target below the cap
};

/// Largest K >= 0 with P(Binomial(K d_C^2, p_eff) > t) <= p_target.
/// The tail is monotone in K, so a doubling search brackets the answer and
/// bisection finishes it.
inline KmaxExact k_max_exact(const FtParams& p, std::uint64_t k_cap = 1'000'000) {
  p.validate();
  if (p.p_target >= 1.0) return {k_cap, true};
  const std::uint64_t d2 = static_cast<std::uint64_t>(p.d_C) * p.d_C;
  const std::uint64_t t = p.t();
  auto admissible = [&](std::uint64_t K) { return binomial_upper_tail(K * d2, p.p_eff(), t) <= p.p_target; };

  std::uint64_t lo = 0;  // admissible
  std::uint64_t hi = 1;
  while (hi <= k_cap && admissible(hi)) {
    lo = hi;
    hi *= 2;
  }
  if (hi > k_cap) {
    if (admissible(k_cap)) return {k_cap, true};
    hi = k_cap;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (admissible(mid) ? lo : hi) = mid;
  }
  return {lo, false};
}

// --------------------------------------------------------------------------
// Logical error rates

/// Per-round logical error (p_eff / p_th)^((d_C+1)/2), leading constant 1, capped at 1.
inline double logical_error_rate(double p_eff, double p_th, std::uint32_t d_C) {
  if (!(p_eff > 0.0)) throw PreconditionError("logical_error_rate: p_eff must be positive");
  return std::min(1.0, std::pow(p_eff / p_th, (d_C + 1) / 2.0));
}

inline double logical_error_rate(const FtParams& p) { return logical_error_rate(p.p_eff(), p.p_th, p.d_C); }

/// T = d_C * ceil(log2 N_L).
inline std::uint64_t routing_rounds(std::uint32_t d_C, std::uint64_t N_L) {
  std::uint64_t bits = 0;
  while ((std::uint64_t{1} << bits) < N_L) ++bits;
  return static_cast<std::uint64_t>(d_C) * bits;
}

struct FtBudget {
  double p_eff = 0.0;
  std::uint32_t t = 0;
  std::uint64_t k_max_chernoff = 0;
  KmaxExact k_max_exact;
  double p_L = 0.0;
  std::uint64_t T_routing = 0;
  double P_L_total = 0.0;        // union bound min(1, N_L T p_L)
  double P_L_total_exact = 0.0;  // 1 - (1 - p_L)^(N_L T)
};

inline double union_bound_total(double p_L, std::uint64_t N_L, std::uint64_t T) {
  return std::min(1.0, static_cast<double>(N_L) * static_cast<double>(T) * p_L);
}

inline double exact_total(double p_L, std::uint64_t N_L, std::uint64_t T) {
  if (p_L >= 1.0) return 1.0;
  return -std::expm1(static_cast<double>(N_L) * static_cast<double>(T) * std::log1p(-p_L));
}

inline FtBudget total_logical_error(const FtParams& p) {
  p.validate();
  FtBudget b;
  b.p_eff = p.p_eff();
  b.t = p.t();
  b.k_max_chernoff = k_max_chernoff(p);
  b.k_max_exact = k_max_exact(p);
  b.p_L = logical_error_rate(p);
  b.T_routing = routing_rounds(p.d_C, p.N_L);
  b.P_L_total = union_bound_total(b.p_L, p.N_L, b.T_routing);
  b.P_L_total_exact = exact_total(b.p_L, p.N_L, b.T_routing);
  return b;
}

// --------------------------------------------------------------------------
// Operating points

/// Exponents of p_L quoted for a row, used to flag rows that the formula does not reproduce.
struct QuotedExponents {
  double p_phys;
  std::vector<std::pair<std::uint32_t, int>> log10_p_L;  // (d_C, exponent)
};

/// The per-round exponents printed in the published operating-point table.
inline const std::vector<QuotedExponents>& quoted_operating_points() {
  static const std::vector<QuotedExponents> rows{
      {1e-4, {{5, -3}, {7, -4}, {9, -5}}},
      {1e-5, {{5, -9}, {7, -12}}},
  };
  return rows;
}

struct OperatingPoint {
  double p_phys = 0.0;
  double p_eff = 0.0;
  double ratio = 0.0;  // p_eff / p_th
  std::vector<std::pair<std::uint32_t, double>> log10_p_L;
  std::string regime;
  std::optional<std::string> note;  // set when quoted exponents disagree with the formula
};

inline constexpr double kViableLogicalRate = 1e-3;
inline constexpr double kStrongSuppression = 1e-6;

/// Regime label from ratio and p_L:
///   ratio > 1 supercritical, ratio = 1 at threshold, p_L at the smallest
///   d_C <= 1e-6 strongly suppressed, otherwise FT-viable for the smallest
///   d_C whose p_L <= 1e-3.
inline std::string regime_label(double ratio, const std::vector<std::pair<std::uint32_t, double>>& log10_p_L) {
  constexpr double kRatioTol = 1e-9;
  if (ratio > 1.0 + kRatioTol) return "supercritical";
  if (std::fabs(ratio - 1.0) <= kRatioTol) return "at threshold";
  if (!log10_p_L.empty() && log10_p_L.front().second <= std::log10(kStrongSuppression) + 1e-9) {
    return "strongly suppressed";
  }
  for (auto [d, lg] : log10_p_L) {
    if (lg <= std::log10(kViableLogicalRate) + 1e-9) return "FT-viable for d_C >= " + std::to_string(d);
  }
  return "sub-threshold, not FT-viable";
}

/// One row per p_phys with p_eff = C_circ * p_phys; d_C_set is sorted ascending.
inline std::vector<OperatingPoint> operating_point_table(const std::vector<double>& p_phys_rows,
                                                         std::vector<std::uint32_t> d_C_set, double C_circ = 10.0,
                                                         double p_th = 1e-2) {
  std::sort(d_C_set.begin(), d_C_set.end());
  std::vector<OperatingPoint> table;
  for (double p_phys : p_phys_rows) {
    FtParams params;
    params.p_phys = p_phys;
    params.C_circ = C_circ;
    params.p_th = p_th;
    params.validate();
    OperatingPoint row;
    row.p_phys = p_phys;
    row.p_eff = params.p_eff();
    row.ratio = row.p_eff / p_th;
    for (std::uint32_t d : d_C_set) row.log10_p_L.emplace_back(d, std::log10(logical_error_rate(row.p_eff, p_th, d)));
    row.regime = regime_label(row.ratio, row.log10_p_L);

    for (const auto& quoted : quoted_operating_points()) {
      if (std::fabs(quoted.p_phys - p_phys) > 1e-12 * p_phys) continue;
      std::string mismatch;
      for (auto [d, exponent] : quoted.log10_p_L) {
        const double computed = std::log10(logical_error_rate(row.p_eff, p_th, d));
        if (std::fabs(computed - exponent) > 0.05) {
          char buf[96];
          std::snprintf(buf, sizeof buf, "%sd_C=%u quoted %d, computed %.2f", mismatch.empty() ? "" : "; ", d,
                        exponent, computed);
          mismatch += buf;
        }
      }
      if (!mismatch.empty()) {
        // Check whether the quoted values follow from p_phys/p_th instead.
        bool via_phys = true;
        for (auto [d, exponent] : quoted.log10_p_L) {
          via_phys = via_phys && std::fabs(std::log10(logical_error_rate(p_phys, p_th, d)) - exponent) <= 0.05;
        }
        row.note = "DISCREPANCY: " + mismatch +
                   (via_phys ? " (quoted exponents match p_phys/p_th, not p_eff/p_th)" : "");
      }
    }
    table.push_back(std::move(row));
  }
  return table;
}

// --------------------------------------------------------------------------
// Syndrome composition

struct ComposedDepth {
  std::uint64_t routing_rounds = 0;
  std::uint64_t k_max = 0;
  std::uint64_t windows = 0;
  std::uint64_t syndrome_rounds = 0;
  std::uint64_t total = 0;
  bool correlated = false;
};

/// Routing plus syndrome depth for an explicit interval K_max.
inline ComposedDepth compose_syndrome_budget(std::uint32_t d_C, std::uint64_t N_L, std::uint64_t k_max,
                                             bool correlated) {
  if (k_max == 0) {
    throw BudgetInfeasibleError("compose_syndrome_budget: K_max = 0, no admissible correction window");
  }
  ComposedDepth c;
  c.routing_rounds = routing_rounds(d_C, N_L);
  c.k_max = k_max;
  c.windows = (c.routing_rounds + k_max - 1) / k_max;
  c.syndrome_rounds = c.windows * (correlated ? 1 : d_C);
  c.total = c.routing_rounds + c.syndrome_rounds;
  c.correlated = correlated;
  return c;
}

/// Same, with K_max from the exact binomial scan.
inline ComposedDepth compose_syndrome_budget(const FtParams& p, bool correlated) {
  return compose_syndrome_budget(p.d_C, p.N_L, k_max_exact(p).value, correlated);
}

// --------------------------------------------------------------------------
// Discrepancy report

/// A published K_max value together with what the closed form and the exact
/// scan give at the same parameters.
struct KmaxDiscrepancy {
  std::uint32_t d_C;
  double p_eff;
  double p_target;
  std::uint64_t quoted;
  std::uint64_t chernoff;
  std::uint64_t exact;
  bool reconciled;
  std::string message;
};

inline std::vector<KmaxDiscrepancy> k_max_discrepancy_report() {
  struct Quoted {
    std::uint32_t d_C;
    double p_target;
    std::uint64_t value;
  };
  const Quoted quoted[] = {{5, 1e-9, 24}, {7, 1e-9, 23}, {7, 1e-3, 60}};
  std::vector<KmaxDiscrepancy> out;
  for (const auto& q : quoted) {
    const FtParams p = FtParams::from_p_eff(1e-3, q.d_C, q.p_target);
    KmaxDiscrepancy d{q.d_C, 1e-3, q.p_target, q.value, k_max_chernoff(p), k_max_exact(p).value, false, {}};
    d.reconciled = d.chernoff == d.quoted;
    const double t = p.t();
    const double numerator = t - std::sqrt(2.0 * t * std::log(1.0 / q.p_target));
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "quoted K_max ~ %llu at d_C=%u, p_eff=1e-3, p_target=%g is %s: closed form numerator %.3f gives "
                  "%llu, exact binomial scan gives %llu",
                  static_cast<unsigned long long>(q.value), q.d_C, q.p_target,
                  d.reconciled ? "reproduced" : "UNRECONCILED", numerator,
                  static_cast<unsigned long long>(d.chernoff), static_cast<unsigned long long>(d.exact));
    d.message = buf;
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace blockroute
