#pragma once

#include <stdexcept>
#include <string>

namespace focp {

/// Thrown when a trajectory leaves the representable or physically
/// meaningful range (non-finite values, runaway growth, negative
/// populations beyond roundoff).
class numerical_blowup : public std::runtime_error {
 public:
  explicit numerical_blowup(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when an iterative evaluation exhausts its budget without the
/// partial results stabilizing.
class no_convergence : public std::runtime_error {
 public:
  explicit no_convergence(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration file problems: syntax, unknown keys, out-of-range values.
/// The message carries file name and line where applicable.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace focp
