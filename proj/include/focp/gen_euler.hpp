#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "focp/errors.hpp"
#include "focp/grid.hpp"
#include "focp/special_functions.hpp"

namespace focp {

/// Dense trajectory storage: n_nodes rows of dim doubles, row k holding the
/// value at grid node k.
struct Trajectory {
  int dim = 0;
  std::vector<double> values;  // row-major, n_nodes x dim

  Trajectory() = default;
  Trajectory(int n_nodes, int d)
      : dim(d), values(static_cast<std::size_t>(n_nodes) * static_cast<std::size_t>(d), 0.0) {}

  int n_nodes() const { return dim == 0 ? 0 : static_cast<int>(values.size()) / dim; }

  std::span<double> row(int k) {
    return {values.data() + static_cast<std::size_t>(k) * dim, static_cast<std::size_t>(dim)};
  }
  std::span<const double> row(int k) const {
    return {values.data() + static_cast<std::size_t>(k) * dim, static_cast<std::size_t>(dim)};
  }

  double operator()(int k, int i) const { return values[static_cast<std::size_t>(k) * dim + i]; }
  double& operator()(int k, int i) { return values[static_cast<std::size_t>(k) * dim + i]; }
};

namespace detail {

inline void check_finite(std::span<const double> v, double t, const char* what) {
  for (double x : v)
    if (!std::isfinite(x))
      throw numerical_blowup(std::string(what) + " became non-finite at t = " + std::to_string(t));
}

// Convolution weights of the product-rectangle fractional Euler scheme:
// w[m] = (m+1)^alpha - m^alpha. All ones when alpha == 1.
inline std::vector<double> rectangle_weights(int n, double alpha) {
  std::vector<double> w(n);
  double prev = 0.0;  // 0^alpha
  for (int m = 0; m < n; ++m) {
    const double next = std::pow(static_cast<double>(m + 1), alpha);
    w[m] = next - prev;
    prev = next;
  }
  return w;
}

// Shared marching core. `rhs(k, t_k, x_k, out)` is invoked once per step in
// index order k = 0..n-1. The update is the explicit rectangle rule for the
// Volterra form of the order-alpha initial value problem:
//
//   x_{k+1} = x_0 + h^alpha/Gamma(alpha+1) * sum_{j<=k} w[k-j] f(t_j, x_j)
//
// which collapses to one memory-free Euler step for k = 0 and to classical
// explicit Euler for alpha = 1.
template <class IndexedRhs>
Trajectory march(IndexedRhs&& rhs, std::span<const double> x0, const TimeGrid& grid,
                 FracOrder alpha) {
  const int n = grid.n_steps();
  const int dim = static_cast<int>(x0.size());
  const double a = alpha.alpha();
  const double scale = std::pow(grid.h(), a) / gamma(a + 1.0);
  const std::vector<double> w = rectangle_weights(n, a);

  Trajectory traj(n + 1, dim);
  std::vector<double> f(static_cast<std::size_t>(n) * dim);
  for (int i = 0; i < dim; ++i) traj(0, i) = x0[i];

  for (int k = 0; k < n; ++k) {
    std::span<double> fk{f.data() + static_cast<std::size_t>(k) * dim,
                         static_cast<std::size_t>(dim)};
    rhs(k, grid.node(k), traj.row(k), fk);
    check_finite(fk, grid.node(k), "vector field");

    for (int i = 0; i < dim; ++i) {
      double acc = 0.0;
      const double* fi = f.data() + i;
      for (int j = 0; j <= k; ++j) acc += w[k - j] * fi[static_cast<std::size_t>(j) * dim];
      traj(k + 1, i) = x0[i] + scale * acc;
    }
    check_finite(traj.row(k + 1), grid.node(k + 1), "state");
  }
  return traj;
}

}  // namespace detail

/// Integrates the order-alpha initial value problem D^alpha x = f(t, x),
/// x(t0) = x0, forward across the grid. Returns the n_steps+1 node values
/// with row 0 equal to x0 exactly.
///
/// `rhs(t, x, dx)` is evaluated once per step, in time order. For alpha = 1
/// the scheme is classical explicit Euler; for alpha < 1 each step carries
/// the full power-law memory of the past field evaluations (cost grows
/// quadratically in n_steps).
///
/// Throws numerical_blowup as soon as any component stops being finite.
template <class Rhs>
Trajectory gen_euler_forward(Rhs&& rhs, std::span<const double> x0, const TimeGrid& grid,
                             FracOrder alpha) {
  return detail::march(
      [&](int /*k*/, double t, std::span<const double> x, std::span<double> dx) { rhs(t, x, dx); },
      x0, grid, alpha);
}

/// Integrates a terminal value problem from t = tf down to t = t0 by the
/// substitution s = tf - t, which turns the backward (right-sided) fractional
/// derivative into a forward one, then marches the same rectangle scheme in s.
///
/// `g(t, x, y, dy)` is the field in forward-time orientation, so a single
/// step at alpha = 1 reads y_k = y_{k+1} - h * g(t_{k+1}, x_{k+1}, y_{k+1}).
/// It is evaluated once per step, at nodes n, n-1, ..., 1 in that order, and
/// receives the matching row of `states` (a trajectory on the same grid).
/// Row n_steps of the result equals `terminal` exactly.
template <class Rhs>
Trajectory gen_euler_backward(Rhs&& g, std::span<const double> terminal, const TimeGrid& grid,
                              FracOrder alpha, const Trajectory& states) {
  const int n = grid.n_steps();
  if (states.n_nodes() != n + 1)
    throw std::invalid_argument("gen_euler_backward: state trajectory does not match the grid");

  Trajectory reversed = detail::march(
      [&](int j, double /*s*/, std::span<const double> y, std::span<double> dy) {
        const int node = n - j;
        g(grid.node(node), states.row(node), y, dy);
        for (double& v : dy) v = -v;  // time reversal flips the field
      },
      terminal, TimeGrid(0.0, grid.tf() - grid.t0(), n), alpha);

  Trajectory out(n + 1, reversed.dim);
  for (int k = 0; k <= n; ++k) {
    auto src = reversed.row(n - k);
    auto dst = out.row(k);
    for (int i = 0; i < reversed.dim; ++i) dst[i] = src[i];
  }
  return out;
}

}  // namespace focp
