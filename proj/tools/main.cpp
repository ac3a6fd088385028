// sensestop CLI: solve stopping-threshold problems, run the Monte Carlo
// simulator, sweep channel gains, and compare operating modes.
//
// Exit codes: 0 success, 2 config error, 3 infeasible constraints,
// 4 solver non-convergence, 5 I/O error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sensestop/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNonConvergence = 4;
constexpr int kExitIo = 5;

struct CommonArgs {
  std::string config_path;
  std::string output_path;     // empty = stdout
  std::string format = "csv";  // csv | jsonl
  bool timing = false;
  std::optional<std::uint64_t> seed;
  std::optional<long long> slots;
  std::optional<double> gain;
  std::vector<std::string> modes;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config_path, "experiment config (JSON)")
      ->required();
  cmd->add_option("-o,--out", args.output_path, "output path (default: stdout)");
  cmd->add_option("--format", args.format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  cmd->add_flag("--timing", args.timing, "record per-row wall time (non-deterministic)");
  cmd->add_option("--seed", args.seed, "override simulation seed");
  cmd->add_option("--slots", args.slots, "override simulated slot count");
  cmd->add_option("--gain", args.gain, "replace the sweep with a single mean gain");
  cmd->add_option("--modes", args.modes, "override config modes")->delimiter(',');
}

int run_command(const CommonArgs& args, bool with_simulation, bool compare) {
  sensestop::ExperimentConfig cfg = sensestop::load_config(args.config_path);
  if (args.seed) cfg.seed = *args.seed;
  if (args.slots) cfg.slots = *args.slots;
  if (args.gain) cfg.mean_gains = {*args.gain};
  if (!args.modes.empty()) {
    cfg.modes.clear();
    for (const std::string& m : args.modes) cfg.modes.push_back(sensestop::parse_mode(m));
  }
  cfg.validate();
  if (compare && cfg.modes.size() != 2)
    throw sensestop::ConfigError("compare needs exactly two modes");

  sensestop::RunOptions options;
  options.with_simulation = with_simulation;
  options.timing = args.timing;
  options.compare_gap = compare;
  const std::vector<sensestop::ResultRow> rows = sensestop::run(cfg, options);

  std::ostringstream body;
  if (args.format == "csv")
    sensestop::emit_csv(rows, body);
  else
    sensestop::emit_jsonl(rows, body);

  if (args.output_path.empty()) {
    std::cout << body.str();
    return 0;
  }
  std::ofstream out(args.output_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open output file " << args.output_path << "\n";
    return kExitIo;
  }
  out << body.str();
  if (!out.flush()) {
    std::cerr << "error: short write to " << args.output_path << "\n";
    return kExitIo;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal stopping thresholds and power allocation for sequential "
               "spectrum access, with a Monte Carlo validator"};
  app.require_subcommand(1);

  CommonArgs solve_args, sim_args, sweep_args, compare_args;
  CLI::App* solve = app.add_subcommand("solve", "analytic solve only");
  add_common(solve, solve_args);
  CLI::App* simulate = app.add_subcommand("simulate", "solve and Monte Carlo validate");
  add_common(simulate, sim_args);
  CLI::App* sweep = app.add_subcommand("sweep",
                                       "sweep mean gains (simulates when slots > 0)");
  add_common(sweep, sweep_args);
  CLI::App* compare = app.add_subcommand(
      "compare", "run two modes and append relative throughput columns");
  add_common(compare, compare_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_command(solve_args, false, false);
    if (simulate->parsed()) return run_command(sim_args, true, false);
    if (sweep->parsed()) return run_command(sweep_args, true, false);
    return run_command(compare_args, true, true);
  } catch (const sensestop::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sensestop::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const sensestop::NonConvergenceError& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
}
