#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace focp {

/// Uniform time grid on [t0, tf] with n_steps intervals, nodes
/// t_k = t0 + k*h for k = 0..n_steps.
class TimeGrid {
 public:
  TimeGrid(double t0, double tf, int n_steps)
      : t0_(t0), tf_(tf), n_steps_(n_steps), h_((tf - t0) / n_steps) {
    if (!std::isfinite(t0) || !std::isfinite(tf))
      throw std::invalid_argument("TimeGrid: endpoints must be finite");
    if (n_steps < 1)
      throw std::invalid_argument("TimeGrid: n_steps must be a positive integer, got " +
                                  std::to_string(n_steps));
    if (!(tf > t0))
      throw std::invalid_argument("TimeGrid: tf must exceed t0");
  }

  double t0() const { return t0_; }
  double tf() const { return tf_; }
  int n_steps() const { return n_steps_; }
  double h() const { return h_; }
  int n_nodes() const { return n_steps_ + 1; }

  double node(int k) const { return t0_ + k * h_; }

 private:
  double t0_;
  double tf_;
  int n_steps_;
  double h_;
};

/// Order of the fractional derivative. Only (0, 1] is supported; 1 recovers
/// the classical first derivative.
class FracOrder {
 public:
  explicit FracOrder(double alpha) : alpha_(alpha) {
    if (!std::isfinite(alpha) || !(alpha > 0.0) || alpha > 1.0)
      throw std::domain_error("FracOrder: order must lie in (0, 1], got " +
                              std::to_string(alpha));
  }

  double alpha() const { return alpha_; }

 private:
  double alpha_;
};

}  // namespace focp
