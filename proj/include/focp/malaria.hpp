#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "focp/errors.hpp"
#include "focp/grid.hpp"
#include "focp/sweep.hpp"

namespace focp::malaria {

/// Compartment sizes: susceptible, infected and partially immune humans,
/// susceptible and infected mosquitoes.
struct StateVec {
  double S_H = 0.0;
  double I_H = 0.0;
  double R_H = 0.0;
  double S_V = 0.0;
  double I_V = 0.0;

  static StateVec read(std::span<const double> x) { return {x[0], x[1], x[2], x[3], x[4]}; }
  void write(std::span<double> out) const {
    out[0] = S_H;
    out[1] = I_H;
    out[2] = R_H;
    out[3] = S_V;
    out[4] = I_V;
  }
};

/// Adjoint multipliers, one per compartment.
struct CostateVec {
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;
  double l4 = 0.0;
  double l5 = 0.0;

  static CostateVec read(std::span<const double> l) { return {l[0], l[1], l[2], l[3], l[4]}; }
  void write(std::span<double> out) const {
    out[0] = l1;
    out[1] = l2;
    out[2] = l3;
    out[3] = l4;
    out[4] = l5;
  }
};

/// Intervention intensities, each a coverage fraction in [0, 1]:
/// u1 treated bednets, u2 treatment of infected humans, u3 insecticide spray.
struct ControlVec {
  double u1 = 0.0;
  double u2 = 0.0;
  double u3 = 0.0;

  static ControlVec read(std::span<const double> u) { return {u[0], u[1], u[2]}; }
  void write(std::span<double> out) const {
    out[0] = u1;
    out[1] = u2;
    out[2] = u3;
  }
};

/// Which intervention channels participate in a run. Masked-off channels are
/// held at zero for the whole horizon.
struct StrategyMask {
  bool use_u1 = false;
  bool use_u2 = false;
  bool use_u3 = false;

  bool any() const { return use_u1 || use_u2 || use_u3; }
  bool operator==(const StrategyMask&) const = default;
};

/// Model rates (per day), transmission probabilities, cost weights and the
/// fractional order. In the order-alpha dynamics every rate enters raised to
/// the power alpha, keeping its dimension of time^-alpha consistent.
struct ModelParams {
  double lambda_h = 0.0;  // human birth rate
  double lambda_v = 0.0;  // mosquito birth rate
  double mu_h = 0.0;      // human natural death rate
  double mu_v = 0.0;      // mosquito natural death rate
  double a = 0.0;         // daily bites per mosquito on humans
  double b_prob = 0.0;    // infection probability per bite, mosquito to human
  double c_prob = 0.0;    // infection probability per bite, human to mosquito
  double delta = 0.0;     // disease-induced death rate
  double nu = 0.0;        // recovery rate without immunity
  double gamma = 0.0;     // immunity loss rate
  double r = 0.0;         // immunity acquisition rate
  double rho = 0.0;       // treatment rate constant
  double eta = 0.0;       // insecticide rate constant
  double A = 0.0;         // weight on the infected-human burden
  double d1 = 0.0;        // quadratic weight on u1
  double d2 = 0.0;        // quadratic weight on u2
  double d3 = 0.0;        // quadratic weight on u3
  FracOrder alpha{1.0};
};

/// Rates pre-raised to the power alpha. Computing these once per run keeps
/// std::pow out of the stepper's inner loop.
struct PoweredRates {
  double lambda_h, lambda_v, mu_h, mu_v, a, delta, nu, gamma, r, rho, eta;
  double b_prob, c_prob, A, d1, d2, d3;
};

inline void validate(const ModelParams& p) {
  const double rates[] = {p.lambda_h, p.lambda_v, p.mu_h, p.mu_v, p.a,  p.b_prob, p.c_prob,
                          p.delta,    p.nu,       p.gamma, p.r,   p.rho, p.eta,    p.A};
  for (double v : rates)
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("malaria: rates and weights must be finite and nonnegative");
  if (!(p.d1 > 0.0) || !(p.d2 > 0.0) || !(p.d3 > 0.0))
    throw std::invalid_argument("malaria: control weights d1, d2, d3 must be positive");
}

inline PoweredRates powered(const ModelParams& p) {
  const double al = p.alpha.alpha();
  auto pw = [al](double v) { return std::pow(v, al); };
  return {pw(p.lambda_h), pw(p.lambda_v), pw(p.mu_h), pw(p.mu_v), pw(p.a),  pw(p.delta),
          pw(p.nu),       pw(p.gamma),    pw(p.r),    pw(p.rho),  pw(p.eta), p.b_prob,
          p.c_prob,       p.A,            p.d1,       p.d2,       p.d3};
}

inline std::pair<double, double> total_populations(const StateVec& x) {
  return {x.S_H + x.I_H + x.R_H, x.S_V + x.I_V};
}

/// Dynamics of the five compartments under the three controls. Bednets scale
/// both cross-infection terms by (1 - u1), treatment moves infected humans to
/// the immune class at rate rho^alpha * u2, spray suppresses mosquito
/// recruitment and adds mortality eta^alpha * u3.
inline StateVec state_rhs(double /*t*/, const StateVec& x, const ControlVec& u,
                          const PoweredRates& q) {
  const auto [n_h, n_v] = total_populations(x);
  if (!(n_h > 0.0))
    throw std::domain_error("malaria state_rhs: total human population must stay positive");

  const double infect_h = (1.0 - u.u1) * q.a * q.b_prob * x.S_H * x.I_V / n_h;
  const double infect_v = (1.0 - u.u1) * q.a * q.c_prob * x.S_V * x.I_H / n_h;
  const double recover = (q.r + q.rho * u.u2) * x.I_H;

  StateVec dx;
  dx.S_H = q.lambda_h * n_h - infect_h + q.nu * x.I_H + q.gamma * x.R_H - q.mu_h * x.S_H;
  dx.I_H = infect_h - q.nu * x.I_H - recover - q.delta * x.I_H - q.mu_h * x.I_H;
  dx.R_H = recover - (q.gamma + q.mu_h) * x.R_H;
  dx.S_V = (1.0 - u.u3) * q.lambda_v * n_v - infect_v - q.mu_v * x.S_V - q.eta * u.u3 * x.S_V;
  dx.I_V = infect_v - q.mu_v * x.I_V - q.eta * u.u3 * x.I_V;
  return dx;
}

inline StateVec state_rhs(double t, const StateVec& x, const ControlVec& u,
                          const ModelParams& p) {
  return state_rhs(t, x, u, powered(p));
}

/// Which formulation of the adjoint system to integrate.
///
/// `transcribed` is the closed-form costate system in the model's customary
/// statement. `mechanical` assembles the adjoint directly from the state
/// equations, dW/dX + lambda^T dM/dX. The two disagree in the first and
/// fourth channels (one factor and one sign); both are kept so the
/// discrepancy is observable rather than silently resolved, and the test
/// suite emits a report of where they differ.
enum class CostateVariant { transcribed, mechanical };

/// Right-hand side of the terminal-value adjoint system. The only running
/// cost dependence on the state is the A * I_H burden term, which is why A
/// appears in the second channel alone.
inline CostateVec costate_rhs(double /*t*/, const StateVec& x, const CostateVec& l,
                              const ControlVec& u, const PoweredRates& q,
                              CostateVariant variant = CostateVariant::transcribed) {
  const auto [n_h, n_v] = total_populations(x);
  if (!(n_h > 0.0))
    throw std::domain_error("malaria costate_rhs: total human population must stay positive");

  const double beta_b = (1.0 - u.u1) * q.a * q.b_prob;  // bednet-scaled human-side contact
  const double beta_c = (1.0 - u.u1) * q.a * q.c_prob;  // bednet-scaled mosquito-side contact
  const double nh2 = n_h * n_h;
  const double treat = q.r + q.rho * u.u2;

  CostateVec dl;
  if (variant == CostateVariant::transcribed) {
    dl.l1 = l.l1 * (q.lambda_h - beta_b * (x.I_H + x.R_H) * x.I_V / nh2 - q.mu_h) +
            l.l2 * (beta_b * (x.I_H + x.R_H) * x.I_V / nh2) -
            (l.l5 - l.l4) * (beta_c * x.S_H * x.I_H / nh2);
    dl.l4 = l.l4 * ((1.0 - u.u3) * q.lambda_v + beta_c * x.I_H / n_h - q.mu_v - q.eta * u.u3) +
            l.l5 * (beta_c * x.I_H / n_h);
  } else {
    dl.l1 = l.l1 * (q.lambda_h - beta_b * (x.I_H + x.R_H) * x.I_V / nh2 - q.mu_h) +
            l.l2 * (beta_b * (x.I_H + x.R_H) * x.I_V / nh2) +
            (l.l4 - l.l5) * (beta_c * x.S_V * x.I_H / nh2);
    dl.l4 = l.l4 * ((1.0 - u.u3) * q.lambda_v - beta_c * x.I_H / n_h - q.mu_v - q.eta * u.u3) +
            l.l5 * (beta_c * x.I_H / n_h);
  }
  dl.l2 = q.A + l.l1 * (q.lambda_h + beta_b * x.S_H * x.I_V / nh2 + q.nu) -
          (l.l4 - l.l5) * ((x.S_H + x.R_H) * beta_c * x.S_V / nh2) -
          l.l2 * (beta_b * x.S_H * x.I_V / nh2 + q.nu + treat + q.delta + q.mu_h) +
          l.l3 * treat;
  dl.l3 = l.l1 * (q.lambda_h + beta_b * x.S_H * x.I_V / nh2 + q.gamma) -
          l.l2 * (beta_b * x.S_H * x.I_V / nh2) - l.l3 * (q.gamma + q.mu_h) -
          (l.l5 - l.l4) * (beta_c * x.S_V * x.I_H / nh2);
  dl.l5 = (l.l2 - l.l1) * (beta_b * x.S_H / n_h) + l.l4 * ((1.0 - u.u3) * q.lambda_v) -
          l.l5 * (q.mu_v + q.eta * u.u3);
  return dl;
}

inline CostateVec costate_rhs(double t, const StateVec& x, const CostateVec& l,
                              const ControlVec& u, const ModelParams& p,
                              CostateVariant variant = CostateVariant::transcribed) {
  return costate_rhs(t, x, l, u, powered(p), variant);
}

/// Pointwise stationary controls, clamped to [0, 1] and masked. Each channel
/// divides by its quadratic cost weight, so d1, d2, d3 must be positive.
inline ControlVec control_characterization(const StateVec& x, const CostateVec& l,
                                           const PoweredRates& q, const StrategyMask& mask) {
  const auto [n_h, n_v] = total_populations(x);
  auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };

  ControlVec u;
  if (mask.use_u1) {
    const double raw = ((l.l2 - l.l1) * (q.a * q.b_prob * x.S_H * x.I_V / n_h) +
                        (l.l5 - l.l4) * (q.a * q.c_prob * x.S_V * x.I_H / n_h)) /
                       q.d1;
    u.u1 = clamp01(raw);
  }
  if (mask.use_u2) u.u2 = clamp01((l.l2 - l.l3) * q.rho * x.I_H / q.d2);
  if (mask.use_u3)
    u.u3 = clamp01((l.l4 * (q.lambda_v * n_v + q.eta * x.S_V) + l.l5 * q.eta * x.I_V) / q.d3);
  return u;
}

inline ControlVec control_characterization(const StateVec& x, const CostateVec& l,
                                           const ModelParams& p, const StrategyMask& mask) {
  return control_characterization(x, l, powered(p), mask);
}

/// Running cost: infected-human burden plus quadratic control effort.
inline double running_cost(const StateVec& x, const ControlVec& u, const PoweredRates& q) {
  return q.A * x.I_H +
         0.5 * (q.d1 * u.u1 * u.u1 + q.d2 * u.u2 * u.u2 + q.d3 * u.u3 * u.u3);
}

inline double running_cost(const StateVec& x, const ControlVec& u, const ModelParams& p) {
  return p.A * x.I_H +
         0.5 * (p.d1 * u.u1 * u.u1 + p.d2 * u.u2 * u.u2 + p.d3 * u.u3 * u.u3);
}

/// Baseline parameterization used throughout the scenario matrix.
inline ModelParams default_params() {
  ModelParams p;
  p.lambda_h = 0.0015875;
  p.lambda_v = 0.071;
  p.mu_h = 0.00004;
  p.mu_v = 0.1429;
  p.a = 0.29;
  p.b_prob = 0.75;
  p.c_prob = 0.75;
  p.delta = 0.02;
  p.nu = 0.0022;
  p.gamma = 0.000017;
  p.r = 0.05;
  p.rho = 0.7;
  p.eta = 0.25;
  p.A = 100.0;
  p.d1 = 70.0;
  p.d2 = 130.0;
  p.d3 = 40.0;
  p.alpha = FracOrder(1.0);
  return p;
}

inline StateVec default_initial_state() { return {800.0, 200.0, 20.0, 1000.0, 500.0}; }

/// Assembles the sweep-ready problem for one (strategy, order) cell.
///
/// The state field is wrapped with a sanity guard: compartments are not
/// clamped, so an excursion below zero beyond roundoff scale aborts with a
/// hint to refine the grid instead of silently producing negative
/// populations.
inline FocpProblem make_problem(const ModelParams& params, const StateVec& x0,
                                const TimeGrid& grid, const StrategyMask& mask,
                                CostateVariant variant = CostateVariant::transcribed) {
  validate(params);
  const PoweredRates q = powered(params);
  const auto [n_h0, n_v0] = total_populations(x0);
  if (!(n_h0 > 0.0))
    throw std::invalid_argument("malaria: initial human population must be positive");
  const double neg_floor = -1e-9 * (n_h0 + n_v0);

  FocpProblem p;
  p.state_dim = 5;
  p.control_dim = 3;
  p.x0.resize(5);
  x0.write(p.x0);
  p.grid = grid;
  p.alpha = params.alpha;

  p.state_rhs = [q, neg_floor](double t, std::span<const double> xs, std::span<const double> us,
                               std::span<double> out) {
    for (double v : xs)
      if (v < neg_floor)
        throw numerical_blowup(
            "malaria: compartment fell below zero at t = " + std::to_string(t) +
            "; refine the time grid (increase n_steps)");
    state_rhs(t, StateVec::read(xs), ControlVec::read(us), q).write(out);
  };
  p.costate_rhs = [q, variant](double t, std::span<const double> xs, std::span<const double> ls,
                               std::span<const double> us, std::span<double> out) {
    costate_rhs(t, StateVec::read(xs), CostateVec::read(ls), ControlVec::read(us), q, variant)
        .write(out);
  };
  p.control_char = [q, mask](double /*t*/, std::span<const double> xs,
                             std::span<const double> ls, std::span<double> out) {
    control_characterization(StateVec::read(xs), CostateVec::read(ls), q, mask).write(out);
  };
  p.integrand = [q](double /*t*/, std::span<const double> xs, std::span<const double> us) {
    return running_cost(StateVec::read(xs), ControlVec::read(us), q);
  };
  return p;
}

}  // namespace focp::malaria
