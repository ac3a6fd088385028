#ifndef SENSESTOP_EXPERIMENT_HPP
#define SENSESTOP_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sensestop/sim.hpp"
#include "sensestop/solver.hpp"

namespace sensestop {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class Mode {
  TwoLevelUnconstrained,
  TwoLevelConstrained,
  OptimalPower,
};

const char* mode_name(Mode mode);
Mode parse_mode(const std::string& name);

/// One experiment: an instance family swept over mean gains, solved in one or
/// more modes, optionally simulated.
struct ExperimentConfig {
  int schema_version = 1;
  std::vector<double> theta;  // per-channel free probabilities
  FadingKind fading_kind = FadingKind::Exponential;
  std::vector<double> mean_gains;  // sweep list, at least one entry
  double tau_over_T = 0.05;
  std::optional<double> p_avg;        // absolute average-power budget
  bool p_avg_from_two_level = false;  // budget = two-level constrained S_1 per gain
  std::optional<double> d_max;
  SolverControl solver;
  long long slots = 1'000'000;
  std::uint64_t seed = 1;
  long long packets = 100'000;
  std::vector<Mode> modes;

  void validate() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

struct ResultRow {
  double mean_gain = 0.0;
  Mode mode = Mode::TwoLevelConstrained;
  DelayStatus delay_status = DelayStatus::Inactive;
  PowerStatus power_status = PowerStatus::Absent;
  AnalyticMetrics analytic;
  bool simulated = false;
  SimEstimates sim;
  double lambda_p = 0.0;
  double lambda_d = 0.0;
  std::vector<double> thresholds;
  int outer_iterations = 0;
  int inner_iterations = 0;
  std::uint64_t seed = 0;
  std::optional<double> throughput_rel_diff;  // vs the first mode at this gain
  std::optional<double> wall_time_s;
};

struct RunOptions {
  bool with_simulation = false;
  bool timing = false;      // fill wall_time_s (breaks byte-identical reruns)
  bool compare_gap = false; // fill throughput_rel_diff against the first mode
};

/// Solves (and optionally simulates) every (mean_gain, mode) pair. Rows come
/// back sorted by (mean_gain, mode) regardless of execution order.
std::vector<ResultRow> run(const ExperimentConfig& config, const RunOptions& options);

/// CSV with a fixed header; numbers at 9 significant digits; thresholds as a
/// quoted semicolon-joined list; infinite delays as "inf"; absent values empty.
void emit_csv(const std::vector<ResultRow>& rows, std::ostream& out);

/// One JSON object per line; doubles round-trip exactly; infinities as "inf".
void emit_jsonl(const std::vector<ResultRow>& rows, std::ostream& out);

}  // namespace sensestop

#endif  // SENSESTOP_EXPERIMENT_HPP
