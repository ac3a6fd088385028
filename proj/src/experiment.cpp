#include "sensestop/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace sensestop {

using nlohmann::json;

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::TwoLevelUnconstrained: return "two_level_unconstrained";
    case Mode::TwoLevelConstrained: return "two_level_constrained";
    case Mode::OptimalPower: return "optimal_power";
  }
  return "?";
}

Mode parse_mode(const std::string& name) {
  if (name == "two_level_unconstrained") return Mode::TwoLevelUnconstrained;
  if (name == "two_level_constrained") return Mode::TwoLevelConstrained;
  if (name == "optimal_power") return Mode::OptimalPower;
  throw ConfigError("unknown mode \"" + name + "\"");
}

namespace {

const char* delay_status_name(DelayStatus s) {
  switch (s) {
    case DelayStatus::Active: return "delay_active";
    case DelayStatus::Inactive: return "delay_inactive";
    case DelayStatus::Unattainable: return "delay_unattainable";
  }
  return "?";
}

const char* power_status_name(PowerStatus s) {
  switch (s) {
    case PowerStatus::Active: return "power_active";
    case PowerStatus::Inactive: return "power_inactive";
    case PowerStatus::Absent: return "power_absent";
  }
  return "?";
}

}  // namespace

void ExperimentConfig::validate() const {
  if (schema_version != 1) throw ConfigError("unsupported schema_version");
  if (theta.empty()) throw ConfigError("channels: need at least one channel");
  for (double th : theta)
    if (!(th > 0.0 && th <= 1.0)) throw ConfigError("channels: theta must lie in (0, 1]");
  if (mean_gains.empty()) throw ConfigError("fading: mean_gain sweep list is empty");
  for (double g : mean_gains)
    if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError("fading: mean gains must be positive");
  if (!(tau_over_T > 0.0) || static_cast<double>(theta.size()) * tau_over_T >= 1.0)
    throw ConfigError("timing: need 0 < M * tau_over_T < 1");
  if (modes.empty()) throw ConfigError("modes: need at least one mode");
  if (slots < 0) throw ConfigError("simulation: slots must be >= 0");
  if (packets < 1) throw ConfigError("simulation: packets must be >= 1");
  for (Mode m : modes) {
    if (m == Mode::TwoLevelConstrained && !d_max)
      throw ConfigError("two_level_constrained requires constraints.d_max");
    if (m == Mode::OptimalPower) {
      if (!d_max) throw ConfigError("optimal_power requires constraints.d_max");
      if (!p_avg && !p_avg_from_two_level)
        throw ConfigError("optimal_power requires constraints.p_avg");
    }
  }
  if (p_avg_from_two_level && !d_max)
    throw ConfigError("p_avg = \"two_level\" needs constraints.d_max for the baseline");
  if (d_max && !(*d_max >= 1.0)) throw ConfigError("constraints: d_max must be >= 1");
  if (p_avg && !(*p_avg > 0.0)) throw ConfigError("constraints: p_avg must be positive");
  try {
    solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  try {
    ExperimentConfig cfg;
    cfg.schema_version = doc.value("schema_version", 1);

    const json& channels = doc.at("channels");
    const auto count = channels.at("count").get<std::size_t>();
    if (count < 1) throw ConfigError("channels.count must be >= 1");
    const json& theta = channels.at("theta");
    if (theta.is_array()) {
      cfg.theta = theta.get<std::vector<double>>();
      if (cfg.theta.size() != count)
        throw ConfigError("channels.theta vector length differs from channels.count");
    } else {
      cfg.theta.assign(count, theta.get<double>());
    }

    const json& fading = channels.at("fading");
    const std::string kind = fading.value("kind", "exponential");
    if (kind != "exponential") throw ConfigError("fading.kind: only \"exponential\" ships");
    cfg.fading_kind = FadingKind::Exponential;
    const json& gain = fading.at("mean_gain");
    if (gain.is_array())
      cfg.mean_gains = gain.get<std::vector<double>>();
    else
      cfg.mean_gains = {gain.get<double>()};

    cfg.tau_over_T = doc.at("timing").at("tau_over_T").get<double>();

    if (doc.contains("constraints")) {
      const json& cons = doc["constraints"];
      if (cons.contains("d_max")) cfg.d_max = cons["d_max"].get<double>();
      if (cons.contains("p_avg")) {
        if (cons["p_avg"].is_string()) {
          if (cons["p_avg"].get<std::string>() != "two_level")
            throw ConfigError("constraints.p_avg: number or \"two_level\"");
          cfg.p_avg_from_two_level = true;
        } else {
          cfg.p_avg = cons["p_avg"].get<double>();
        }
      }
    }

    if (doc.contains("solver")) {
      const json& s = doc["solver"];
      cfg.solver.tol = s.value("tol", cfg.solver.tol);
      cfg.solver.max_bisection_iters =
          s.value("max_bisection_iters", cfg.solver.max_bisection_iters);
      cfg.solver.bracket_growth = s.value("bracket_growth", cfg.solver.bracket_growth);
    }

    if (doc.contains("simulation")) {
      const json& s = doc["simulation"];
      cfg.slots = s.value("slots", cfg.slots);
      cfg.seed = s.value("seed", cfg.seed);
      cfg.packets = s.value("packets", cfg.packets);
    }

    if (doc.contains("modes")) {
      for (const auto& m : doc["modes"]) cfg.modes.push_back(parse_mode(m.get<std::string>()));
    } else if (doc.contains("mode")) {
      cfg.modes.push_back(parse_mode(doc["mode"].get<std::string>()));
    }

    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

ResultRow solve_row(const ExperimentConfig& cfg, double mean_gain, Mode mode,
                    const RunOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  const ChannelEnsemble ens{cfg.theta, FadingLaw{cfg.fading_kind, mean_gain}};
  const SlotTiming timing{cfg.tau_over_T};

  SolveReport report;
  switch (mode) {
    case Mode::TwoLevelUnconstrained:
      report = solve_two_level_unconstrained(ens, timing, cfg.solver);
      break;
    case Mode::TwoLevelConstrained:
      report = solve_two_level(ens, timing, *cfg.d_max, cfg.solver);
      break;
    case Mode::OptimalPower: {
      double budget;
      if (cfg.p_avg_from_two_level)
        budget = solve_two_level(ens, timing, *cfg.d_max, cfg.solver).metrics.avg_power;
      else
        budget = *cfg.p_avg;
      report = solve_optimal(ens, timing, Constraints{budget, *cfg.d_max}, cfg.solver);
      break;
    }
  }

  ResultRow row;
  row.mean_gain = mean_gain;
  row.mode = mode;
  row.delay_status = report.delay_status;
  row.power_status = report.power_status;
  row.analytic = report.metrics;
  row.lambda_p = report.duals.lambda_p;
  row.lambda_d = report.duals.lambda_d;
  row.thresholds = report.policy.thresholds;
  row.outer_iterations = report.outer_iterations;
  row.inner_iterations = report.inner_iterations;
  row.seed = cfg.seed;
  if (options.with_simulation && cfg.slots > 0) {
    row.simulated = true;
    row.sim = simulate(report.policy, ens, timing, cfg.slots, cfg.seed);
  }
  if (options.timing) {
    const auto elapsed = std::chrono::steady_clock::now() - started;
    row.wall_time_s = std::chrono::duration<double>(elapsed).count();
  }
  return row;
}

}  // namespace

std::vector<ResultRow> run(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();

  struct Job {
    double gain;
    Mode mode;
  };
  std::vector<Job> jobs;
  for (double gain : config.mean_gains)
    for (Mode mode : config.modes) jobs.push_back({gain, mode});

  std::vector<ResultRow> rows(jobs.size());
  std::vector<std::future<ResultRow>> futures;
  futures.reserve(jobs.size());
  for (const Job& job : jobs)
    futures.push_back(std::async(std::launch::async, solve_row, std::cref(config),
                                 job.gain, job.mode, std::cref(options)));
  for (std::size_t i = 0; i < jobs.size(); ++i) rows[i] = futures[i].get();

  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.mean_gain != b.mean_gain) return a.mean_gain < b.mean_gain;
    return static_cast<int>(a.mode) < static_cast<int>(b.mode);
  });

  if (options.compare_gap && config.modes.size() >= 2) {
    const Mode baseline = config.modes.front();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].mode == baseline) continue;
      for (std::size_t j = 0; j < rows.size(); ++j) {
        if (rows[j].mean_gain == rows[i].mean_gain && rows[j].mode == baseline) {
          rows[i].throughput_rel_diff =
              (rows[i].analytic.throughput - rows[j].analytic.throughput) /
              rows[j].analytic.throughput;
          break;
        }
      }
    }
  }
  return rows;
}

namespace {

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string thresholds_field(const std::vector<double>& thresholds) {
  std::string out;
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (i) out += ';';
    out += format_number(thresholds[i]);
  }
  return out;
}

}  // namespace

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << "mean_gain,mode,status,u_analytic,s_analytic,p_analytic,delay_analytic,"
         "u_sim,u_sim_se,s_sim,s_sim_se,p_sim,p_sim_se,delay_sim,delay_sim_se,"
         "lambda_p,lambda_d,thresholds,outer_iters,inner_iters,seed,"
         "u_rel_diff,wall_time_s\n";
  for (const ResultRow& r : rows) {
    out << format_number(r.mean_gain) << ',' << mode_name(r.mode) << ','
        << delay_status_name(r.delay_status) << '+' << power_status_name(r.power_status)
        << ',' << format_number(r.analytic.throughput) << ','
        << format_number(r.analytic.avg_power) << ','
        << format_number(r.analytic.success_prob) << ','
        << format_number(r.analytic.expected_delay) << ',';
    if (r.simulated) {
      out << format_number(r.sim.throughput_mean) << ',' << format_number(r.sim.throughput_se)
          << ',' << format_number(r.sim.power_mean) << ',' << format_number(r.sim.power_se)
          << ',' << format_number(r.sim.success_rate) << ',' << format_number(r.sim.success_se)
          << ',' << format_number(r.sim.delay_mean) << ',' << format_number(r.sim.delay_se);
    } else {
      out << ",,,,,,,";
    }
    out << ',' << format_number(r.lambda_p) << ',' << format_number(r.lambda_d) << ",\""
        << thresholds_field(r.thresholds) << "\"," << r.outer_iterations << ','
        << r.inner_iterations << ',' << r.seed << ',';
    if (r.throughput_rel_diff) out << format_number(*r.throughput_rel_diff);
    out << ',';
    if (r.wall_time_s) out << format_number(*r.wall_time_s);
    out << '\n';
  }
}

void emit_jsonl(const std::vector<ResultRow>& rows, std::ostream& out) {
  for (const ResultRow& r : rows) {
    json obj;
    obj["mean_gain"] = r.mean_gain;
    obj["mode"] = mode_name(r.mode);
    obj["delay_status"] = delay_status_name(r.delay_status);
    obj["power_status"] = power_status_name(r.power_status);
    obj["u_analytic"] = r.analytic.throughput;
    obj["s_analytic"] = r.analytic.avg_power;
    obj["p_analytic"] = r.analytic.success_prob;
    if (std::isinf(r.analytic.expected_delay))
      obj["delay_analytic"] = "inf";
    else
      obj["delay_analytic"] = r.analytic.expected_delay;
    if (r.simulated) {
      obj["u_sim"] = r.sim.throughput_mean;
      obj["u_sim_se"] = r.sim.throughput_se;
      obj["s_sim"] = r.sim.power_mean;
      obj["s_sim_se"] = r.sim.power_se;
      obj["p_sim"] = r.sim.success_rate;
      obj["p_sim_se"] = r.sim.success_se;
      if (std::isinf(r.sim.delay_mean))
        obj["delay_sim"] = "inf";
      else
        obj["delay_sim"] = r.sim.delay_mean;
      obj["delay_sim_se"] = r.sim.delay_se;
      obj["sim_slots"] = r.sim.slots;
      obj["sim_packets"] = r.sim.packets;
    }
    obj["lambda_p"] = r.lambda_p;
    obj["lambda_d"] = r.lambda_d;
    json thresholds = json::array();
    for (double g : r.thresholds) {
      if (std::isinf(g))
        thresholds.push_back("inf");
      else
        thresholds.push_back(g);
    }
    obj["thresholds"] = std::move(thresholds);
    obj["outer_iters"] = r.outer_iterations;
    obj["inner_iters"] = r.inner_iterations;
    obj["seed"] = r.seed;
    if (r.throughput_rel_diff) obj["u_rel_diff"] = *r.throughput_rel_diff;
    if (r.wall_time_s) obj["wall_time_s"] = *r.wall_time_s;
    out << obj.dump() << '\n';
  }
}

}  // namespace sensestop
