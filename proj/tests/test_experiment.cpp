#include <gtest/gtest.h>

#include <sstream>
#include <stdexcept>

#include "blockroute/experiment.hpp"
#include "blockroute/report.hpp"

using namespace blockroute;

namespace {

ExperimentConfig small_simulation() {
  ExperimentConfig c = ExperimentConfig::defaults_for(Mode::simulate);
  c.n_vertices = 600;
  c.d_prime = 20;
  c.d_C = 3;
  c.N_L = 8;
  c.trials = 2;
  c.base_seed = 5;
  c.parallelism = 1;
  return c;
}

std::string csv_of(const SimulateResult& r, bool timing = false) {
  std::ostringstream os;
  write_csv(os, r, timing);
  return os.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Config, ModeDefaults) {
  const auto sweep = ExperimentConfig::defaults_for(Mode::sweep);
  EXPECT_EQ(sweep.d_C, 7u);
  EXPECT_EQ(sweep.N_L, 32u);
  EXPECT_EQ(sweep.d_prime, 200u);
  const auto ft = ExperimentConfig::defaults_for(Mode::ft_budget);
  EXPECT_EQ(ft.d_C, 7u);
  EXPECT_EQ(ft.N_L, 100u);
  const auto sim = ExperimentConfig::defaults_for(Mode::simulate);
  EXPECT_EQ(sim.n_vertices, kDefaultHostVertices);
  EXPECT_NO_THROW(sim.validate());
}

TEST(Config, RejectsInvalidSimulation) {
  auto c = small_simulation();
  c.N_L = 1;
  EXPECT_THROW(c.validate(), PreconditionError);
  c = small_simulation();
  c.N_L = 100;  // 900 > 600 vertices
  EXPECT_THROW(c.validate(), PreconditionError);
  c = small_simulation();
  c.n_vertices = 601;
  c.d_prime = 3;
  EXPECT_THROW(c.validate(), PreconditionError);
  c = small_simulation();
  c.trials = 0;
  EXPECT_THROW(c.validate(), PreconditionError);
}

TEST(Config, RejectsInvalidFtParameters) {
  auto c = ExperimentConfig::defaults_for(Mode::ft_budget);
  c.C_circ = 2.0;
  EXPECT_THROW(c.validate(), PreconditionError);
  c = ExperimentConfig::defaults_for(Mode::ft_budget);
  c.p_phys_rows = {0.5};
  EXPECT_THROW(c.validate(), PreconditionError);
}

TEST(Config, ModeAndFormatNames) {
  EXPECT_EQ(parse_mode("ft-budget"), Mode::ft_budget);
  EXPECT_EQ(parse_mode("simulate"), Mode::simulate);
  EXPECT_STREQ(to_string(Mode::decompose), "decompose");
  EXPECT_THROW(parse_mode("bogus"), PreconditionError);
  EXPECT_EQ(parse_format("json"), OutputFormat::json);
  EXPECT_THROW(parse_format("xml"), PreconditionError);
}

TEST(ParallelMap, KeepsIndexOrder) {
  const auto out = parallel_map(50, 4, [](std::size_t i) { return i * i; });
  ASSERT_EQ(out.size(), 50u);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], i * i);
}

TEST(ParallelMap, RethrowsLowestFailingIndex) {
  try {
    parallel_map(20, 3, [](std::size_t i) -> int {
      if (i == 7 || i == 13) throw std::runtime_error("fail " + std::to_string(i));
      return 0;
    });
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "fail 7");
  }
}

TEST(Simulate, DeterministicAcrossThreadCounts) {
  auto c = small_simulation();
  const auto a = csv_of(run_simulate(c));
  c.parallelism = 2;
  const auto b = csv_of(run_simulate(c));
  EXPECT_EQ(a, b);
}

TEST(Simulate, TrialsAreAuditedAndConsistent) {
  const auto c = small_simulation();
  for (std::size_t i = 0; i < c.trials; ++i) {
    const auto art = run_trial_artifacts(c, i);
    const auto& r = art.record;
    EXPECT_EQ(r.seed, c.base_seed + i);
    EXPECT_EQ(r.T_physical, static_cast<std::uint64_t>(c.d_C) * (r.C_Q + r.D_Q));
    EXPECT_GE(r.T_sched, std::max<std::uint64_t>(r.C_Q, r.D_Q));
    EXPECT_LT(r.beta_Q, 1.0);
    EXPECT_EQ(art.blocks.block_count(), c.N_L);
  }
}

TEST(Simulate, AggregateIsMeanOfRecords) {
  const auto res = run_simulate(small_simulation());
  double t = 0.0;
  for (const auto& r : res.records) t += static_cast<double>(r.T_physical);
  t /= static_cast<double>(res.records.size());
  EXPECT_DOUBLE_EQ(res.summary.T_physical, t);
  EXPECT_DOUBLE_EQ(res.summary.alpha, t / (3.0 * 3.0));
}

TEST(Simulate, PlacementFailureCarriesTrialContext) {
  auto c = small_simulation();
  c.n_vertices = 100;
  c.d_prime = 4;
  c.N_L = 11;
  c.guard = 4;
  c.trials = 1;
  try {
    run_simulate(c);
    FAIL() << "expected PlacementError";
  } catch (const PlacementError& e) {
    EXPECT_EQ(e.code(), ExitCode::generation_failure);
    EXPECT_NE(std::string(e.what()).find("seed=5"), std::string::npos);
  }
}

TEST(Report, SimulateCsvLayout) {
  const auto text = csv_of(run_simulate(small_simulation()));
  const auto ls = lines(text);
  ASSERT_EQ(ls.size(), 5u);  // version, header, 2 trials, mean
  EXPECT_EQ(ls[0], "# blockroute trial-records v1");
  EXPECT_EQ(ls[1],
            "row,d_C,N_L,d_prime,seed,beta_host,beta_Q,d_Q_avg,diameter_Q,C_Q,D_Q,T_sched,T_physical,"
            "hop_decomposition_rounds,alpha");
  EXPECT_EQ(ls[2].substr(0, 2), "0,");
  EXPECT_EQ(ls[4].substr(0, 5), "mean,");
  EXPECT_EQ(text.find("wall_time_ms"), std::string::npos);
  EXPECT_NE(csv_of(run_simulate(small_simulation()), true).find("wall_time_ms"), std::string::npos);
}

TEST(Report, SixSignificantDigits) {
  EXPECT_EQ(csv::num(0.123456789), "0.123457");
  EXPECT_EQ(csv::num(21.0), "21");
  EXPECT_EQ(csv::num(1e-12), "1e-12");
  EXPECT_EQ(csv::num(std::uint64_t{1234567890123}), "1234567890123");
}

TEST(Report, SimulateJsonKeys) {
  const auto j = to_json(run_simulate(small_simulation()));
  EXPECT_EQ(j["kind"], "trial-records");
  EXPECT_EQ(j["version"], 1);
  ASSERT_EQ(j["records"].size(), 2u);
  for (const char* key : {"d_C", "N_L", "d_prime", "seed", "beta_host", "beta_Q", "C_Q", "D_Q", "T_sched",
                          "T_physical", "hop_decomposition_rounds"}) {
    EXPECT_TRUE(j["records"][0].contains(key)) << key;
  }
  EXPECT_TRUE(j["summary"].contains("alpha"));
  EXPECT_FALSE(j["summary"].contains("wall_time_ms"));
}

TEST(Regime, PublishedTable) {
  const auto rows = run_regime(ExperimentConfig::defaults_for(Mode::regime));
  ASSERT_EQ(rows.size(), 4u);
  const std::uint32_t expected[4][3] = {{3, 7, 14}, {5, 10, 20}, {7, 12, 24}, {9, 15, 30}};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(rows[i].d_C, expected[i][0]);
    EXPECT_EQ(rows[i].min_d, expected[i][1]);
    EXPECT_EQ(rows[i].d_prime, expected[i][2]);
  }
  EXPECT_EQ(rows[1].min_d_loose, 34u);
}

TEST(FtBudgetMode, ReportCarriesNotes) {
  const auto rep = run_ft_budget(ExperimentConfig::defaults_for(Mode::ft_budget));
  EXPECT_EQ(rep.operating_points.size(), 4u);
  ASSERT_FALSE(rep.budgets.empty());
  bool has_kmax = false, has_operating = false;
  for (const auto& n : rep.notes) {
    has_kmax = has_kmax || n.find("UNRECONCILED") != std::string::npos;
    has_operating = has_operating || n.find("DISCREPANCY") != std::string::npos;
  }
  EXPECT_TRUE(has_kmax);
  EXPECT_TRUE(has_operating);
  for (const auto& row : rep.budgets) {
    if (row.d_C == 7) EXPECT_NEAR(row.budget.P_L_total, 0.49, 1e-9);
  }
}

TEST(Decompose, RecordsBoundedRounds) {
  auto c = small_simulation();
  c.mode = Mode::decompose;
  const auto rows = run_decompose(c);
  ASSERT_EQ(rows.size(), c.trials);
  for (const auto& r : rows) {
    EXPECT_GE(r.rounds, std::max(r.C_phys, r.D_phys));
    EXPECT_LE(r.rounds, 3u * c.d_C);
  }
}
