#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>

namespace proxgrad {

/// Raised for invalid solver parameters; the message names the violated bound.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class Gamma0Rule { constant, bb_safeguarded };

/// How the initial trial value gamma_k^0 of each outer iteration is chosen.
struct Gamma0Strategy {
  Gamma0Rule rule = Gamma0Rule::bb_safeguarded;
  double value = 1.0;  // used by Gamma0Rule::constant only

  static Gamma0Strategy constant(double v) { return {Gamma0Rule::constant, v}; }
  static Gamma0Strategy bb_safeguarded() { return {Gamma0Rule::bb_safeguarded, 1.0}; }

  friend bool operator==(const Gamma0Strategy&, const Gamma0Strategy&) = default;
};

inline const char* to_string(Gamma0Rule r) {
  return r == Gamma0Rule::constant ? "constant" : "bb_safeguarded";
}

/// Parameters of the (non)monotone proximal gradient method. Setting m = 0
/// gives the monotone method.
struct SolverConfig {
  double tau = 2.0;         // backtracking factor, > 1
  double gamma_min = 1e-8;  // bounds for gamma_k^0
  double gamma_max = 1e8;
  double delta = 1e-4;      // sufficient decrease, in (0, 1)
  std::size_t m = 5;        // nonmonotonicity window
  Gamma0Strategy gamma0;
  double tau_abs = 1e-6;    // outer (and early inner) residual tolerance
  double eps_step = 1e-10;  // step-norm fallback tolerance
  std::size_t max_outer = 10000;
  std::size_t max_inner = 100;

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

namespace detail {
template <class T>
[[noreturn]] void config_violation(const char* field, T value, const char* bound) {
  std::ostringstream os;
  os.precision(17);
  os << field << " = " << value << " violates " << bound;
  throw ConfigError(os.str());
}
}  // namespace detail

inline void validate(const SolverConfig& c) {
  if (!(c.tau > 1.0) || !std::isfinite(c.tau)) detail::config_violation("tau", c.tau, "tau > 1");
  if (!(c.gamma_min > 0.0) || !std::isfinite(c.gamma_min)) {
    detail::config_violation("gamma_min", c.gamma_min, "0 < gamma_min");
  }
  if (!(c.gamma_max >= c.gamma_min) || !std::isfinite(c.gamma_max)) {
    detail::config_violation("gamma_max", c.gamma_max, "gamma_min <= gamma_max < inf");
  }
  if (!(c.delta > 0.0 && c.delta < 1.0)) {
    detail::config_violation("delta", c.delta, "delta in (0,1)");
  }
  if (c.gamma0.rule == Gamma0Rule::constant && !(c.gamma0.value > 0.0 && std::isfinite(c.gamma0.value))) {
    detail::config_violation("gamma0_value", c.gamma0.value, "gamma0_value > 0");
  }
  if (!(c.tau_abs > 0.0)) detail::config_violation("tau_abs", c.tau_abs, "tau_abs > 0");
  if (!(c.eps_step >= 0.0)) detail::config_violation("eps_step", c.eps_step, "eps_step >= 0");
  if (c.max_outer == 0) detail::config_violation("max_outer", c.max_outer, "max_outer >= 1");
  if (c.max_inner == 0) detail::config_violation("max_inner", c.max_inner, "max_inner >= 1");
}

}  // namespace proxgrad
