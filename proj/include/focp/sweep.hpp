#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "focp/gen_euler.hpp"
#include "focp/grid.hpp"

namespace focp {

/// A fractional optimal control problem in first-order necessary-condition
/// form, ready for the forward-backward sweep:
///
///   D^alpha x      = state_rhs(t, x, u),          x(t0) = x0
///   backward D^alpha lambda = costate_rhs(t, x, lambda, u),  lambda(tf) = 0
///   u = control_char(t, x, lambda)                (already projected onto
///                                                  the admissible box)
///
/// costate_rhs is the right-hand side of the terminal-value (right-sided)
/// system; the sweep performs the time reversal itself. integrand is the
/// running cost W(t, x, u) whose integral the controls minimize.
struct FocpProblem {
  int state_dim = 0;
  int control_dim = 0;

  std::function<void(double t, std::span<const double> x, std::span<const double> u,
                     std::span<double> dx)>
      state_rhs;
  std::function<void(double t, std::span<const double> x, std::span<const double> lam,
                     std::span<const double> u, std::span<double> dlam)>
      costate_rhs;
  std::function<void(double t, std::span<const double> x, std::span<const double> lam,
                     std::span<double> u)>
      control_char;
  std::function<double(double t, std::span<const double> x, std::span<const double> u)> integrand;

  std::vector<double> x0;
  TimeGrid grid{0.0, 1.0, 1};
  FracOrder alpha{1.0};
};

/// Sweep iteration settings. initial_control_levels (one value per channel)
/// seeds a constant control trajectory; a full initial trajectory takes
/// precedence when provided.
struct SweepConfig {
  double tolerance = 1e-3;    // relative L1 stopping threshold, per channel
  int max_iterations = 500;
  double relaxation = 0.3;    // weight on the fresh candidate in the control update
  std::vector<double> initial_control_levels;        // empty means all zero
  std::optional<Trajectory> initial_control_traj;
};

struct SweepSolution {
  TimeGrid grid{0.0, 1.0, 1};
  Trajectory states;
  Trajectory costates;
  Trajectory controls;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  // Worst per-channel margin tol*sum|u| - sum|du| of each iteration;
  // convergence means the last entry is >= 0.
  std::vector<double> convergence_history;
};

/// Raised when the sweep exhausts max_iterations. Carries the last iterate so
/// callers can inspect or report the partial result.
class sweep_not_converged : public std::runtime_error {
 public:
  sweep_not_converged(std::string what, SweepSolution partial)
      : std::runtime_error(std::move(what)), partial_(std::move(partial)) {}

  const SweepSolution& partial() const { return partial_; }

 private:
  SweepSolution partial_;
};

/// Composite trapezoidal value of the running cost along a solution.
/// Exact for integrands that are linear in t on each interval.
inline double objective_value(
    const std::function<double(double, std::span<const double>, std::span<const double>)>& w,
    const TimeGrid& grid, const Trajectory& states, const Trajectory& controls) {
  const int n = grid.n_steps();
  double acc = 0.5 * (w(grid.node(0), states.row(0), controls.row(0)) +
                      w(grid.node(n), states.row(n), controls.row(n)));
  for (int k = 1; k < n; ++k) acc += w(grid.node(k), states.row(k), controls.row(k));
  return acc * grid.h();
}

namespace detail {

inline void validate_problem(const FocpProblem& p) {
  if (p.state_dim < 1 || p.control_dim < 0)
    throw std::invalid_argument("sweep: bad problem dimensions");
  if (static_cast<int>(p.x0.size()) != p.state_dim)
    throw std::invalid_argument("sweep: x0 size does not match state_dim");
  if (!p.state_rhs || !p.costate_rhs || !p.control_char || !p.integrand)
    throw std::invalid_argument("sweep: problem callbacks must all be set");
}

inline Trajectory initial_controls(const FocpProblem& p, const SweepConfig& cfg) {
  const int n_nodes = p.grid.n_steps() + 1;
  if (cfg.initial_control_traj) {
    const Trajectory& t = *cfg.initial_control_traj;
    if (t.dim != p.control_dim || t.n_nodes() != n_nodes)
      throw std::invalid_argument("sweep: initial control trajectory shape mismatch");
    return t;
  }
  Trajectory u(n_nodes, p.control_dim);
  if (!cfg.initial_control_levels.empty()) {
    if (static_cast<int>(cfg.initial_control_levels.size()) != p.control_dim)
      throw std::invalid_argument("sweep: initial control level count mismatch");
    for (int k = 0; k < n_nodes; ++k)
      for (int c = 0; c < p.control_dim; ++c) u(k, c) = cfg.initial_control_levels[c];
  }
  return u;
}

}  // namespace detail

/// Forward-backward sweep. Each iteration solves the state system forward
/// with the current controls, the costate system backward along the fresh
/// states, forms pointwise control candidates, and mixes them into the
/// current controls with the configured relaxation weight. Stops when every
/// channel satisfies the relative criterion
///
///   tolerance * sum_k |u_new_k|  -  sum_k |u_new_k - u_k|  >= 0,
///
/// and then returns the iterate u the criterion certified: re-running one
/// further iteration from the returned controls reproduces the accepting
/// computation, so the solution carries its own fixed-point certificate.
/// The returned trajectories are mutually consistent (states and costates
/// solved under the returned controls). Costates end at zero exactly (free
/// endpoint), states start at x0 exactly.
inline SweepSolution sweep(const FocpProblem& problem, const SweepConfig& config) {
  detail::validate_problem(problem);
  if (!(config.tolerance > 0.0))
    throw std::invalid_argument("sweep: tolerance must be positive");
  if (!(config.relaxation > 0.0) || config.relaxation > 1.0)
    throw std::invalid_argument("sweep: relaxation must lie in (0, 1]");
  if (config.max_iterations < 1)
    throw std::invalid_argument("sweep: max_iterations must be positive");

  const TimeGrid& grid = problem.grid;
  const int n = grid.n_steps();
  const std::vector<double> terminal(problem.state_dim, 0.0);

  Trajectory u = detail::initial_controls(problem, config);
  Trajectory states, costates;

  auto solve_states = [&](const Trajectory& ctrl) {
    return detail::march(
        [&](int k, double t, std::span<const double> x, std::span<double> dx) {
          problem.state_rhs(t, x, ctrl.row(k), dx);
        },
        problem.x0, grid, problem.alpha);
  };
  // Solve the terminal-value costate system by marching the reversed
  // problem; the reversal of the right-sided derivative keeps the field
  // sign, hence no negation here (see gen_euler_backward, which absorbs
  // one sign flip itself).
  auto solve_costates = [&](const Trajectory& st, const Trajectory& ctrl) {
    Trajectory reversed = detail::march(
        [&](int j, double /*s*/, std::span<const double> lam, std::span<double> dlam) {
          const int node = n - j;
          problem.costate_rhs(grid.node(node), st.row(node), lam, ctrl.row(node), dlam);
        },
        terminal, TimeGrid(0.0, grid.tf() - grid.t0(), n), problem.alpha);
    Trajectory out(n + 1, problem.state_dim);
    for (int k = 0; k <= n; ++k) {
      auto src = reversed.row(n - k);
      auto dst = out.row(k);
      for (int i = 0; i < problem.state_dim; ++i) dst[i] = src[i];
    }
    return out;
  };

  SweepSolution sol;
  sol.grid = grid;

  bool converged = false;
  int it = 0;
  std::vector<double> candidate(problem.control_dim);
  while (it < config.max_iterations) {
    ++it;
    states = solve_states(u);
    costates = solve_costates(states, u);

    Trajectory u_new(n + 1, problem.control_dim);
    for (int k = 0; k <= n; ++k) {
      problem.control_char(grid.node(k), states.row(k), costates.row(k),
                           std::span<double>(candidate));
      for (int c = 0; c < problem.control_dim; ++c)
        u_new(k, c) = config.relaxation * candidate[c] + (1.0 - config.relaxation) * u(k, c);
    }

    double worst_margin = std::numeric_limits<double>::infinity();
    for (int c = 0; c < problem.control_dim; ++c) {
      double sum_abs = 0.0, sum_diff = 0.0;
      for (int k = 0; k <= n; ++k) {
        sum_abs += std::abs(u_new(k, c));
        sum_diff += std::abs(u_new(k, c) - u(k, c));
      }
      worst_margin = std::min(worst_margin, config.tolerance * sum_abs - sum_diff);
    }
    sol.convergence_history.push_back(worst_margin);
    if (worst_margin >= 0.0) {
      // u is the certified iterate; states and costates above already
      // belong to it, so everything returned is mutually consistent.
      converged = true;
      break;
    }
    u = std::move(u_new);
  }

  if (!converged) {
    // Report the furthest iterate, with trajectories re-solved to match.
    states = solve_states(u);
    costates = solve_costates(states, u);
  }

  sol.states = std::move(states);
  sol.costates = std::move(costates);
  sol.controls = std::move(u);
  sol.iterations = it;
  sol.converged = converged;
  sol.objective = objective_value(problem.integrand, grid, sol.states, sol.controls);

  if (!converged) {
    std::string what = "sweep: controls did not settle within " +
                       std::to_string(config.max_iterations) + " iterations (last margin " +
                       std::to_string(sol.convergence_history.back()) + ")";
    throw sweep_not_converged(std::move(what), std::move(sol));
  }
  return sol;
}

}  // namespace focp
