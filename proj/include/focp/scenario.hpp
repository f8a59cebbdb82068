#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "focp/csv.hpp"
#include "focp/errors.hpp"
#include "focp/malaria.hpp"
#include "focp/sweep.hpp"

namespace focp::scenario {

struct NamedStrategy {
  std::string name;
  malaria::StrategyMask mask;
};

/// The seven single and combined intervention strategies, in reporting order.
/// The all-off baseline is not listed; the runner always adds it per order.
inline std::vector<NamedStrategy> default_strategies() {
  return {
      {"bednets", {true, false, false}},
      {"treatment", {false, true, false}},
      {"spray", {false, false, true}},
      {"bednets_treatment", {true, true, false}},
      {"bednets_spray", {true, false, true}},
      {"treatment_spray", {false, true, true}},
      {"all_controls", {true, true, true}},
  };
}

inline std::optional<malaria::StrategyMask> strategy_by_name(const std::string& name) {
  if (name == "baseline") return malaria::StrategyMask{false, false, false};
  for (const auto& s : default_strategies())
    if (s.name == name) return s.mask;
  return std::nullopt;
}

/// Full description of a scenario batch: model parameterization, grid,
/// sweep settings, and the strategy-by-order matrix to execute.
struct ScenarioConfig {
  malaria::ModelParams params = malaria::default_params();
  malaria::StateVec initial_state = malaria::default_initial_state();
  double horizon = 100.0;
  int n_steps = 1000;
  SweepConfig sweep;
  std::vector<double> alphas = {1.0, 0.99, 0.95, 0.90};
  std::vector<NamedStrategy> strategies = default_strategies();
  malaria::CostateVariant costate_variant = malaria::CostateVariant::transcribed;
  std::filesystem::path output_dir = "out";
  int workers = 1;
};

/// Outcome of one (strategy, order) cell.
struct RunRecord {
  std::string strategy;
  double alpha = 1.0;
  bool converged = false;
  int iterations = 0;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double final_I_H = std::numeric_limits<double>::quiet_NaN();
  double final_I_V = std::numeric_limits<double>::quiet_NaN();
  std::filesystem::path csv_path;  // empty when the cell failed before producing a trajectory
  std::string error;               // empty on success
};

// ---------------------------------------------------------------------------
// configuration file parsing

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_number(const std::string& text, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw config_error(where + ": not a number: `" + text + "`");
  }
}

inline int parse_int(const std::string& text, const std::string& where) {
  const double v = parse_number(text, where);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw config_error(where + ": expected an integer, got `" + text + "`");
  return static_cast<int>(v);
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace detail

/// Parses the INI-style scenario schema. Unset keys keep their defaults;
/// unknown sections or keys are hard errors carrying file and line.
///
/// Sections and keys:
///   [params]        lambda_h lambda_v mu_h mu_v a b c delta nu gamma r rho
///                   eta A d1 d2 d3
///   [initial_state] S_H I_H R_H S_V I_V
///   [grid]          horizon n_steps
///   [sweep]         tolerance max_iterations relaxation costate_variant
///   [matrix]        alphas strategies   (comma-separated lists)
///   [output]        dir workers
inline ScenarioConfig parse_config_text(std::string_view text, const std::string& filename) {
  ScenarioConfig cfg;
  std::string section;
  std::size_t lineno = 0;

  std::map<std::string, double*> params_keys = {
      {"lambda_h", &cfg.params.lambda_h}, {"lambda_v", &cfg.params.lambda_v},
      {"mu_h", &cfg.params.mu_h},         {"mu_v", &cfg.params.mu_v},
      {"a", &cfg.params.a},               {"b", &cfg.params.b_prob},
      {"c", &cfg.params.c_prob},          {"delta", &cfg.params.delta},
      {"nu", &cfg.params.nu},             {"gamma", &cfg.params.gamma},
      {"r", &cfg.params.r},               {"rho", &cfg.params.rho},
      {"eta", &cfg.params.eta},           {"A", &cfg.params.A},
      {"d1", &cfg.params.d1},             {"d2", &cfg.params.d2},
      {"d3", &cfg.params.d3}};
  std::map<std::string, double*> state_keys = {{"S_H", &cfg.initial_state.S_H},
                                               {"I_H", &cfg.initial_state.I_H},
                                               {"R_H", &cfg.initial_state.R_H},
                                               {"S_V", &cfg.initial_state.S_V},
                                               {"I_V", &cfg.initial_state.I_V}};

  std::stringstream stream{std::string(text)};
  for (std::string raw; std::getline(stream, raw);) {
    ++lineno;
    const std::string where = filename + ":" + std::to_string(lineno);
    std::string line = raw;
    if (auto pos = line.find_first_of("#;"); pos != std::string::npos) line.erase(pos);
    line = detail::trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw config_error(where + ": unterminated section header");
      section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
      if (section != "params" && section != "initial_state" && section != "grid" &&
          section != "sweep" && section != "matrix" && section != "output")
        throw config_error(where + ": unknown section [" + section + "]");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw config_error(where + ": expected `key = value`");
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
    if (key.empty() || value.empty()) throw config_error(where + ": empty key or value");
    if (section.empty()) throw config_error(where + ": key `" + key + "` outside any section");

    if (section == "params") {
      auto it = params_keys.find(key);
      if (it == params_keys.end())
        throw config_error(where + ": unknown key `" + key + "` in [params]");
      *it->second = detail::parse_number(value, where);
    } else if (section == "initial_state") {
      auto it = state_keys.find(key);
      if (it == state_keys.end())
        throw config_error(where + ": unknown key `" + key + "` in [initial_state]");
      *it->second = detail::parse_number(value, where);
    } else if (section == "grid") {
      if (key == "horizon") {
        cfg.horizon = detail::parse_number(value, where);
        if (!(cfg.horizon > 0)) throw config_error(where + ": horizon must be positive");
      } else if (key == "n_steps") {
        cfg.n_steps = detail::parse_int(value, where);
        if (cfg.n_steps < 1) throw config_error(where + ": n_steps must be positive");
      } else {
        throw config_error(where + ": unknown key `" + key + "` in [grid]");
      }
    } else if (section == "sweep") {
      if (key == "tolerance") {
        cfg.sweep.tolerance = detail::parse_number(value, where);
        if (!(cfg.sweep.tolerance > 0)) throw config_error(where + ": tolerance must be positive");
      } else if (key == "max_iterations") {
        cfg.sweep.max_iterations = detail::parse_int(value, where);
        if (cfg.sweep.max_iterations < 1)
          throw config_error(where + ": max_iterations must be positive");
      } else if (key == "relaxation") {
        cfg.sweep.relaxation = detail::parse_number(value, where);
        if (!(cfg.sweep.relaxation > 0) || cfg.sweep.relaxation > 1)
          throw config_error(where + ": relaxation must lie in (0, 1]");
      } else if (key == "costate_variant") {
        if (value == "transcribed")
          cfg.costate_variant = malaria::CostateVariant::transcribed;
        else if (value == "mechanical")
          cfg.costate_variant = malaria::CostateVariant::mechanical;
        else
          throw config_error(where + ": costate_variant must be `transcribed` or `mechanical`");
      } else {
        throw config_error(where + ": unknown key `" + key + "` in [sweep]");
      }
    } else if (section == "matrix") {
      if (key == "alphas") {
        cfg.alphas.clear();
        for (const auto& item : detail::split_list(value)) {
          const double a = detail::parse_number(item, where);
          try {
            FracOrder check(a);
          } catch (const std::domain_error& e) {
            throw config_error(where + ": " + e.what());
          }
          cfg.alphas.push_back(a);
        }
        if (cfg.alphas.empty()) throw config_error(where + ": alphas list is empty");
      } else if (key == "strategies") {
        cfg.strategies.clear();
        for (const auto& item : detail::split_list(value)) {
          auto mask = strategy_by_name(item);
          if (!mask) throw config_error(where + ": unknown strategy `" + item + "`");
          cfg.strategies.push_back({item, *mask});
        }
        if (cfg.strategies.empty()) throw config_error(where + ": strategies list is empty");
      } else {
        throw config_error(where + ": unknown key `" + key + "` in [matrix]");
      }
    } else {  // output
      if (key == "dir") {
        cfg.output_dir = value;
      } else if (key == "workers") {
        cfg.workers = detail::parse_int(value, where);
        if (cfg.workers < 1) throw config_error(where + ": workers must be positive");
      } else {
        throw config_error(where + ": unknown key `" + key + "` in [output]");
      }
    }
  }

  try {
    malaria::validate(cfg.params);
  } catch (const std::invalid_argument& e) {
    throw config_error(filename + ": " + e.what());
  }
  return cfg;
}

inline ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.filename().string());
}

// ---------------------------------------------------------------------------
// execution

inline const char* trajectory_csv_header() {
  return "t,S_H,I_H,R_H,S_V,I_V,u1,u2,u3,lambda1,lambda2,lambda3,lambda4,lambda5";
}

inline std::string render_trajectory_csv(const TimeGrid& grid, const Trajectory& states,
                                         const Trajectory& costates,
                                         const Trajectory& controls) {
  std::string out = trajectory_csv_header();
  out += '\n';
  for (int k = 0; k <= grid.n_steps(); ++k) {
    out += format_double(grid.node(k));
    for (int i = 0; i < 5; ++i) out += "," + format_double(states(k, i));
    for (int c = 0; c < 3; ++c) out += "," + format_double(controls(k, c));
    for (int i = 0; i < 5; ++i) out += "," + format_double(costates(k, i));
    out += '\n';
  }
  return out;
}

inline std::string format_alpha(double alpha) { return format_double(alpha); }

/// Executes the strategy-by-order matrix: for every order in `alphas`, the
/// zero-control baseline plus every configured strategy. Cells are
/// independent; failures (non-convergence, blowup) are captured in the
/// corresponding record without disturbing the rest of the batch. With
/// workers > 1 the cells run on a small thread pool; files are written
/// atomically and the summary is assembled in deterministic matrix order
/// after all cells finish.
inline std::vector<RunRecord> run_matrix(const ScenarioConfig& cfg) {
  struct Cell {
    std::string name;
    malaria::StrategyMask mask;
    double alpha;
  };
  const malaria::StrategyMask off{};
  std::vector<Cell> cells;
  for (double alpha : cfg.alphas) {
    cells.push_back({"baseline", off, alpha});
    for (const auto& s : cfg.strategies)
      if (s.mask.any()) cells.push_back({s.name, s.mask, alpha});
  }

  std::filesystem::create_directories(cfg.output_dir);
  std::vector<RunRecord> records(cells.size());

  auto run_cell = [&](std::size_t idx) {
    const Cell& cell = cells[idx];
    RunRecord rec;
    rec.strategy = cell.name;
    rec.alpha = cell.alpha;
    try {
      malaria::ModelParams params = cfg.params;
      params.alpha = FracOrder(cell.alpha);
      const TimeGrid grid(0.0, cfg.horizon, cfg.n_steps);
      const FocpProblem problem =
          malaria::make_problem(params, cfg.initial_state, grid, cell.mask, cfg.costate_variant);

      SweepSolution sol;
      try {
        sol = sweep(problem, cfg.sweep);
      } catch (const sweep_not_converged& e) {
        sol = e.partial();
        rec.error = e.what();
      }
      rec.converged = sol.converged;
      rec.iterations = sol.iterations;
      rec.objective = sol.objective;
      rec.final_I_H = sol.states(grid.n_steps(), 1);
      rec.final_I_V = sol.states(grid.n_steps(), 4);
      rec.csv_path =
          cfg.output_dir / (cell.name + "_alpha" + format_alpha(cell.alpha) + ".csv");
      write_file_atomic(rec.csv_path,
                        render_trajectory_csv(grid, sol.states, sol.costates, sol.controls));
    } catch (const std::exception& e) {
      rec.error = e.what();
      rec.converged = false;
    }
    records[idx] = std::move(rec);
  };

  const int workers = std::min<int>(cfg.workers, static_cast<int>(cells.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1))
          run_cell(i);
      });
    for (auto& th : pool) th.join();
  }

  std::string summary = "strategy,alpha,converged,iterations,J,final_I_H,final_I_V\n";
  for (const auto& rec : records) {
    summary += rec.strategy + "," + format_alpha(rec.alpha) + "," +
               (rec.converged ? "true" : "false") + "," + std::to_string(rec.iterations) + "," +
               format_double(rec.objective) + "," + format_double(rec.final_I_H) + "," +
               format_double(rec.final_I_V) + "\n";
  }
  write_file_atomic(cfg.output_dir / "summary.csv", summary);
  return records;
}

}  // namespace focp::scenario
