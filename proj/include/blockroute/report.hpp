#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "blockroute/experiment.hpp"

// CSV and JSON emitters. CSV output starts with a versioned comment line,
// uses a fixed header per record kind and prints reals with 6 significant
// digits. JSON carries the same records keyed by field name.

namespace blockroute {

namespace csv {

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

inline std::string num(std::uint64_t x) { return std::to_string(x); }
inline std::string num(std::uint32_t x) { return std::to_string(x); }

inline void row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
  os << '\n';
}

// Notes may contain commas; quote them.
inline std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace csv

// --------------------------------------------------------------------------
// simulate

inline void write_csv(std::ostream& os, const SimulateResult& res, bool timing = false) {
  os << "# blockroute trial-records v1\n";
  std::vector<std::string> header{"row", "d_C", "N_L", "d_prime", "seed", "beta_host", "beta_Q", "d_Q_avg",
                                  "diameter_Q", "C_Q", "D_Q", "T_sched", "T_physical", "hop_decomposition_rounds",
                                  "alpha"};
  if (timing) header.push_back("wall_time_ms");
  csv::row(os, header);
  for (std::size_t i = 0; i < res.records.size(); ++i) {
    const auto& r = res.records[i];
    std::vector<std::string> cells{std::to_string(i), csv::num(r.d_C), csv::num(r.N_L), csv::num(r.d_prime),
                                   csv::num(r.seed), csv::num(r.beta_host), csv::num(r.beta_Q),
                                   csv::num(r.d_Q_avg), csv::num(r.diameter_Q), csv::num(r.C_Q), csv::num(r.D_Q),
                                   csv::num(r.T_sched), csv::num(r.T_physical),
                                   csv::num(r.hop_decomposition_rounds), ""};
    if (timing) cells.push_back(csv::num(r.wall_time_ms));
    csv::row(os, cells);
  }
  const auto& a = res.summary;
  std::vector<std::string> cells{"mean", csv::num(a.d_C), csv::num(a.N_L), csv::num(a.d_prime), "",
                                 csv::num(a.beta_host), csv::num(a.beta_Q), csv::num(a.d_Q_avg),
                                 csv::num(a.diameter_Q), csv::num(a.C_Q), csv::num(a.D_Q), csv::num(a.T_sched),
                                 csv::num(a.T_physical), csv::num(a.hop_decomposition_rounds), csv::num(a.alpha)};
  if (timing) cells.push_back(csv::num(a.wall_time_ms));
  csv::row(os, cells);
}

inline nlohmann::json to_json(const TrialRecord& r, bool timing = false) {
  nlohmann::json j{{"d_C", r.d_C},
                   {"N_L", r.N_L},
                   {"d_prime", r.d_prime},
                   {"seed", r.seed},
                   {"beta_host", r.beta_host},
                   {"beta_Q", r.beta_Q},
                   {"d_Q_avg", r.d_Q_avg},
                   {"diameter_Q", r.diameter_Q},
                   {"C_Q", r.C_Q},
                   {"D_Q", r.D_Q},
                   {"T_sched", r.T_sched},
                   {"T_physical", r.T_physical},
                   {"hop_decomposition_rounds", r.hop_decomposition_rounds}};
  if (timing) j["wall_time_ms"] = r.wall_time_ms;
  return j;
}

inline nlohmann::json to_json(const SimulateResult& res, bool timing = false) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : res.records) records.push_back(to_json(r, timing));
  const auto& a = res.summary;
  nlohmann::json summary{{"d_C", a.d_C},
                         {"N_L", a.N_L},
                         {"d_prime", a.d_prime},
                         {"trials", a.trials},
                         {"beta_host", a.beta_host},
                         {"beta_Q", a.beta_Q},
                         {"max_beta_Q", a.max_beta_Q},
                         {"d_Q_avg", a.d_Q_avg},
                         {"diameter_Q", a.diameter_Q},
                         {"C_Q", a.C_Q},
                         {"D_Q", a.D_Q},
                         {"T_sched", a.T_sched},
                         {"T_physical", a.T_physical},
                         {"hop_decomposition_rounds", a.hop_decomposition_rounds},
                         {"alpha", a.alpha}};
  if (timing) summary["wall_time_ms"] = a.wall_time_ms;
  return {{"kind", "trial-records"}, {"version", 1}, {"records", records}, {"summary", summary}};
}

// --------------------------------------------------------------------------
// sweep

inline void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "# blockroute sweep v1\n";
  csv::row(os, {"d_prime", "beta_host", "ramanujan_beta", "threshold", "in_regime", "T_physical", "beta_Q"});
  for (const auto& r : rows) {
    csv::row(os, {csv::num(r.d_prime), csv::num(r.beta_host), csv::num(r.ramanujan_beta), csv::num(r.threshold),
                  to_string(r.verdict), csv::num(r.T_physical), csv::num(r.beta_Q)});
  }
}

inline nlohmann::json to_json(const std::vector<SweepRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"d_prime", r.d_prime},
                   {"beta_host", r.beta_host},
                   {"ramanujan_beta", r.ramanujan_beta},
                   {"threshold", r.threshold},
                   {"in_regime", to_string(r.verdict)},
                   {"T_physical", r.T_physical},
                   {"beta_Q", r.beta_Q}});
  }
  return {{"kind", "sweep"}, {"version", 1}, {"rows", out}};
}

// --------------------------------------------------------------------------
// regime

inline void write_csv(std::ostream& os, const std::vector<RegimeRow>& rows) {
  os << "# blockroute regime v1\n";
  csv::row(os, {"d_C", "r", "min_d", "d_prime", "beta", "min_d_loose", "d_prime_loose", "N_phys_at_64"});
  for (const auto& r : rows) {
    csv::row(os, {csv::num(r.d_C), csv::num(r.r), csv::num(r.min_d), csv::num(r.d_prime), csv::num(r.beta),
                  csv::num(r.min_d_loose), csv::num(r.d_prime_loose), csv::num(r.min_vertices_64)});
  }
}

inline nlohmann::json to_json(const std::vector<RegimeRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"d_C", r.d_C},
                   {"r", r.r},
                   {"min_d", r.min_d},
                   {"d_prime", r.d_prime},
                   {"beta", r.beta},
                   {"min_d_loose", r.min_d_loose},
                   {"d_prime_loose", r.d_prime_loose},
                   {"N_phys_at_64", r.min_vertices_64}});
  }
  return {{"kind", "regime"}, {"version", 1}, {"rows", out}};
}

// --------------------------------------------------------------------------
// ft-budget

inline std::string log10_list(const OperatingPoint& op) {
  std::string s;
  for (auto [d, lg] : op.log10_p_L) {
    if (!s.empty()) s += "/";
    s += csv::num(lg);
  }
  return s;
}

inline void write_csv(std::ostream& os, const FtReport& rep) {
  os << "# blockroute ft-budget v1\n";
  os << "# operating-points\n";
  std::string distances;
  if (!rep.operating_points.empty()) {
    for (auto [d, lg] : rep.operating_points.front().log10_p_L) {
      distances += (distances.empty() ? "" : "/") + std::to_string(d);
    }
  }
  csv::row(os, {"p_phys", "p_eff", "ratio", "log10_p_L(d_C=" + distances + ")", "regime", "note"});
  for (const auto& op : rep.operating_points) {
    csv::row(os, {csv::num(op.p_phys), csv::num(op.p_eff), csv::num(op.ratio), log10_list(op), op.regime,
                  op.note ? csv::quoted(*op.note) : ""});
  }
  os << "# budgets\n";
  csv::row(os, {"d_C", "N_L", "p_eff", "t", "k_max_chernoff", "k_max_exact", "k_max_exact_capped", "p_L",
                "T_routing", "P_L_total", "P_L_total_exact", "windows", "depth_correlated", "depth_uncorrelated"});
  for (const auto& b : rep.budgets) {
    const auto& x = b.budget;
    csv::row(os, {csv::num(b.d_C), csv::num(rep.params.N_L), csv::num(x.p_eff), csv::num(x.t),
                  csv::num(x.k_max_chernoff), csv::num(x.k_max_exact.value), x.k_max_exact.capped ? "1" : "0",
                  csv::num(x.p_L), csv::num(x.T_routing), csv::num(x.P_L_total), csv::num(x.P_L_total_exact),
                  b.correlated ? csv::num(b.correlated->windows) : "infeasible",
                  b.correlated ? csv::num(b.correlated->total) : "infeasible",
                  b.uncorrelated ? csv::num(b.uncorrelated->total) : "infeasible"});
  }
  os << "# notes\n";
  csv::row(os, {"note"});
  for (const auto& n : rep.notes) csv::row(os, {csv::quoted(n)});
}

inline nlohmann::json to_json(const FtReport& rep) {
  nlohmann::json ops = nlohmann::json::array();
  for (const auto& op : rep.operating_points) {
    nlohmann::json lg = nlohmann::json::object();
    for (auto [d, v] : op.log10_p_L) lg[std::to_string(d)] = v;
    nlohmann::json j{{"p_phys", op.p_phys}, {"p_eff", op.p_eff}, {"ratio", op.ratio},
                     {"log10_p_L", lg},     {"regime", op.regime}};
    j["note"] = op.note ? nlohmann::json(*op.note) : nlohmann::json(nullptr);
    ops.push_back(j);
  }
  auto depth = [](const std::optional<ComposedDepth>& c) -> nlohmann::json {
    if (!c) return nullptr;
    return {{"routing_rounds", c->routing_rounds}, {"k_max", c->k_max},       {"windows", c->windows},
            {"syndrome_rounds", c->syndrome_rounds}, {"total", c->total}, {"correlated", c->correlated}};
  };
  nlohmann::json budgets = nlohmann::json::array();
  for (const auto& b : rep.budgets) {
    const auto& x = b.budget;
    budgets.push_back({{"d_C", b.d_C},
                       {"N_L", rep.params.N_L},
                       {"p_eff", x.p_eff},
                       {"t", x.t},
                       {"k_max_chernoff", x.k_max_chernoff},
                       {"k_max_exact", x.k_max_exact.value},
                       {"k_max_exact_capped", x.k_max_exact.capped},
                       {"p_L", x.p_L},
                       {"T_routing", x.T_routing},
                       {"P_L_total", x.P_L_total},
                       {"P_L_total_exact", x.P_L_total_exact},
                       {"composed_correlated", depth(b.correlated)},
                       {"composed_uncorrelated", depth(b.uncorrelated)}});
  }
  nlohmann::json disc = nlohmann::json::array();
  for (const auto& d : rep.k_max_discrepancies) {
    disc.push_back({{"d_C", d.d_C},
                    {"p_eff", d.p_eff},
                    {"p_target", d.p_target},
                    {"quoted", d.quoted},
                    {"chernoff", d.chernoff},
                    {"exact", d.exact},
                    {"reconciled", d.reconciled},
                    {"message", d.message}});
  }
  return {{"kind", "ft-budget"},        {"version", 1},
          {"operating_points", ops},    {"budgets", budgets},
          {"k_max_discrepancies", disc}, {"notes", rep.notes}};
}

// --------------------------------------------------------------------------
// decompose

inline void write_csv(std::ostream& os, const std::vector<HopRecord>& rows) {
  os << "# blockroute hop-records v1\n";
  csv::row(os, {"row", "d_C", "N_L", "d_prime", "seed", "block", "C_phys", "D_phys", "rounds", "edge_colored",
                "rounds_per_d_C"});
  double rounds = 0.0, per = 0.0, c = 0.0, d = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    csv::row(os, {std::to_string(i), csv::num(r.d_C), csv::num(r.N_L), csv::num(r.d_prime), csv::num(r.seed),
                  csv::num(r.block), csv::num(r.C_phys), csv::num(r.D_phys), csv::num(r.rounds),
                  r.edge_colored ? "1" : "0", csv::num(r.rounds_per_d_C)});
    rounds += static_cast<double>(r.rounds);
    per += r.rounds_per_d_C;
    c += r.C_phys;
    d += r.D_phys;
  }
  if (!rows.empty()) {
    const double k = static_cast<double>(rows.size());
    const auto& f = rows.front();
    csv::row(os, {"mean", csv::num(f.d_C), csv::num(f.N_L), csv::num(f.d_prime), "", "", csv::num(c / k),
                  csv::num(d / k), csv::num(rounds / k), "", csv::num(per / k)});
  }
}

inline nlohmann::json to_json(const std::vector<HopRecord>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"d_C", r.d_C},
                   {"N_L", r.N_L},
                   {"d_prime", r.d_prime},
                   {"seed", r.seed},
                   {"block", r.block},
                   {"C_phys", r.C_phys},
                   {"D_phys", r.D_phys},
                   {"rounds", r.rounds},
                   {"edge_colored", r.edge_colored},
                   {"rounds_per_d_C", r.rounds_per_d_C}});
  }
  return {{"kind", "hop-records"}, {"version", 1}, {"records", out}};
}

}  // namespace blockroute
