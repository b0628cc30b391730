// blockroute: experiment runner for block permutation routing on expander hosts.
//
//   blockroute simulate --d_C 5 --N_L 32 --trials 5 --seed 42
//   blockroute sweep --config sweep.cfg --format json --out sweep.json
//   blockroute regime
//   blockroute ft-budget --p_phys 1e-4 [--strict]
//   blockroute decompose --d_C 7 --N_L 16 --d_prime 200
//
// A config file is a flat key=value document whose keys are the long option
// names below (e.g. `d_C = 7`); command-line flags override it.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "blockroute/error.hpp"
#include "blockroute/experiment.hpp"
#include "blockroute/report.hpp"

namespace {

using namespace blockroute;

struct Overrides {
  std::optional<std::string> mode;
  std::optional<std::size_t> n_vertices;
  std::optional<std::uint32_t> d_prime, r, d_C, N_L, guard;
  std::optional<std::size_t> trials, parallelism;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out, format;
  std::optional<double> p_phys, C_circ, p_th, p_target;
  std::vector<std::uint32_t> d_prime_list, d_C_list, ft_d_C_list;
  std::vector<double> p_phys_rows;
  bool timing = false;
  bool strict = false;
};

template <class T>
void take(const std::optional<T>& from, T& to) {
  if (from) to = *from;
}

ExperimentConfig resolve(Mode mode, const Overrides& o) {
  ExperimentConfig c = ExperimentConfig::defaults_for(mode);
  take(o.n_vertices, c.n_vertices);
  take(o.d_prime, c.d_prime);
  take(o.r, c.r);
  take(o.d_C, c.d_C);
  take(o.N_L, c.N_L);
  take(o.guard, c.guard);
  take(o.trials, c.trials);
  take(o.parallelism, c.parallelism);
  take(o.seed, c.base_seed);
  take(o.out, c.output_path);
  if (o.format) c.output_format = parse_format(*o.format);
  take(o.p_phys, c.p_phys);
  take(o.C_circ, c.C_circ);
  take(o.p_th, c.p_th);
  take(o.p_target, c.p_target);
  if (!o.d_prime_list.empty()) c.d_prime_list = o.d_prime_list;
  if (!o.d_C_list.empty()) c.d_C_list = o.d_C_list;
  if (!o.ft_d_C_list.empty()) c.ft_d_C_list = o.ft_d_C_list;
  if (!o.p_phys_rows.empty()) c.p_phys_rows = o.p_phys_rows;
  c.timing = o.timing;
  return c;
}

void emit(const ExperimentConfig& cfg, const std::string& text) {
  if (cfg.output_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(cfg.output_path, std::ios::binary);
  if (!file) throw PreconditionError("cannot open output file '" + cfg.output_path + "'");
  file << text;
}

// With --strict, ft-budget fails when the configured d_C admits no correction window.
void check_strict(const ExperimentConfig& cfg) {
  const auto rep = run_ft_budget(cfg);
  for (const auto& row : rep.budgets) {
    if (row.d_C == cfg.d_C && !row.correlated) {
      throw BudgetInfeasibleError("K_max_exact = 0 at d_C=" + std::to_string(cfg.d_C) +
                                  ": no admissible correction window");
    }
  }
}

std::string run(const ExperimentConfig& cfg) {
  const bool json = cfg.output_format == OutputFormat::json;
  std::ostringstream os;
  auto put = [&](const auto& result, auto&&... extra) {
    if (json) {
      os << to_json(result, extra...).dump(2) << '\n';
    } else {
      write_csv(os, result, extra...);
    }
  };
  switch (cfg.mode) {
    case Mode::simulate: put(run_simulate(cfg), cfg.timing); break;
    case Mode::sweep: put(run_sweep(cfg)); break;
    case Mode::regime: put(run_regime(cfg)); break;
    case Mode::ft_budget: put(run_ft_budget(cfg)); break;
    case Mode::decompose: put(run_decompose(cfg)); break;
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block permutation routing simulator on random regular expander hosts"};
  app.set_config("--config", "", "Flat key=value config file; flags override it");
  app.require_subcommand(0, 1);

  Overrides o;
  app.add_option("--mode", o.mode, "Mode when no subcommand is given (simulate, sweep, regime, ft-budget, decompose)");
  app.add_option("--n_vertices,--n-vertices", o.n_vertices, "Host vertices (default 5000)");
  app.add_option("--d_prime,--d-prime", o.d_prime, "Host degree d'");
  app.add_option("--r", o.r, "Hyperedge size r (default 3)");
  app.add_option("--d_C,--d-C", o.d_C, "Code distance; blocks hold d_C^2 vertices");
  app.add_option("--N_L,--N-L", o.N_L, "Number of blocks");
  app.add_option("--guard", o.guard, "Guard distance between blocks (default 1)");
  app.add_option("--trials", o.trials, "Independent trials (default 3)");
  app.add_option("--seed,--base_seed", o.seed, "Base seed; trial i uses seed + i (default 1)");
  app.add_option("--out,--output_path", o.out, "Output file (default stdout)");
  app.add_option("--format,--output_format", o.format, "csv or json (default csv)");
  app.add_option("--parallelism", o.parallelism, "Worker threads (default: hardware cores)");
  app.add_flag("--strict", o.strict, "ft-budget: exit 5 when the configured d_C has K_max = 0");
  app.add_flag("--timing", o.timing, "Include wall_time_ms (output no longer byte-reproducible)");
  app.add_option("--d_prime_list", o.d_prime_list, "Sweep degrees (default 50,100,200,400)")->delimiter(',');
  app.add_option("--d_C_list", o.d_C_list, "Regime table code distances (default 3,5,7,9)")->delimiter(',');
  app.add_option("--p_phys", o.p_phys, "Per-gate physical error rate (default 1e-4)");
  app.add_option("--C_circ", o.C_circ, "Circuit-level inflation factor in [5,15] (default 10)");
  app.add_option("--p_th", o.p_th, "Threshold error rate (default 1e-2)");
  app.add_option("--p_target", o.p_target, "Per-block target failure probability (default 1e-9)");
  app.add_option("--p_phys_rows", o.p_phys_rows, "Operating-point rows (default 5e-3,1e-3,1e-4,1e-5)")->delimiter(',');
  app.add_option("--ft_d_C_list", o.ft_d_C_list, "Operating-point code distances (default 5,7,9)")->delimiter(',');

  for (Mode m : {Mode::simulate, Mode::sweep, Mode::regime, Mode::ft_budget, Mode::decompose}) {
    app.add_subcommand(to_string(m), std::string("Run the ") + to_string(m) + " experiment")->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ExitCode::config_error);
  }

  try {
    std::optional<Mode> mode;
    if (!app.get_subcommands().empty()) mode = parse_mode(app.get_subcommands().front()->get_name());
    if (o.mode) {
      const Mode from_config = parse_mode(*o.mode);
      if (mode && *mode != from_config) {
        throw PreconditionError(std::string("config mode '") + *o.mode + "' conflicts with subcommand '" +
                                to_string(*mode) + "'");
      }
      mode = from_config;
    }
    if (!mode) throw PreconditionError("no mode given (use a subcommand or mode = ... in the config)");
    const ExperimentConfig cfg = resolve(*mode, o);
    emit(cfg, run(cfg));
    if (o.strict && cfg.mode == Mode::ft_budget) check_strict(cfg);
    return 0;
  } catch (const Error& e) {
    std::cerr << "blockroute: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "blockroute: internal error: " << e.what() << '\n';
    return 1;
  }
}
