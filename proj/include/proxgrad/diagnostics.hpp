#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "proxgrad/trace.hpp"

// Post-hoc checks of completed runs. Every checker recomputes what it needs
// (window maxima, envelopes) from the raw trace columns; none of them looks
// at solver-side bookkeeping such as the accepted_ref column.

namespace proxgrad {

inline constexpr double kCheckTolerance = 1e-10;

struct Violation {
  std::size_t row = 0;
  double excess = 0.0;  // amount by which the inequality is violated
  std::string message;
};

/// Throws TraceFormatError unless rows are 0..K-1, every row but the last
/// carries an accepted step, the last row carries none, and psi is finite.
inline void require_well_formed(const Trace& trace) {
  const auto& rs = trace.records;
  if (rs.empty()) throw TraceFormatError("trace has no rows");
  for (std::size_t k = 0; k < rs.size(); ++k) {
    const auto& r = rs[k];
    if (r.k != k) throw TraceFormatError("row " + std::to_string(k) + " has index " + std::to_string(r.k));
    if (!std::isfinite(r.psi)) throw TraceFormatError("row " + std::to_string(k) + ": psi not finite");
    const bool last = k + 1 == rs.size();
    if (!last && !r.has_step()) {
      throw TraceFormatError("row " + std::to_string(k) + ": non-terminal row without an accepted step");
    }
    if (last && (r.gamma || r.step_norm)) {
      throw TraceFormatError("row " + std::to_string(k) + ": terminal row carries a step");
    }
  }
}

/// Rolling maximum of psi over the last min(k, m) + 1 rows, for every k.
inline std::vector<double> window_maxima(const Trace& trace, std::size_t m) {
  const auto& rs = trace.records;
  std::vector<double> out(rs.size());
  for (std::size_t k = 0; k < rs.size(); ++k) {
    const std::size_t first = k - std::min(k, m);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = first; j <= k; ++j) mx = std::max(mx, rs[j].psi);
    out[k] = mx;
  }
  return out;
}

/// psi[k+1] <= max_{j=0..m_k} psi[k-j] - delta (gamma_k/2) step_k^2 for every
/// step row, within `tol`.
inline std::vector<Violation> check_acceptance(const Trace& trace, std::size_t m, double delta,
                                               double tol = kCheckTolerance) {
  require_well_formed(trace);
  const auto& rs = trace.records;
  const auto ref = window_maxima(trace, m);
  std::vector<Violation> out;
  for (std::size_t k = 0; k + 1 < rs.size(); ++k) {
    const double gamma = *rs[k].gamma;
    const double step = *rs[k].step_norm;
    const double bound = ref[k] - delta * (0.5 * gamma) * step * step;
    const double excess = rs[k + 1].psi - bound;
    if (excess > tol) {
      std::ostringstream os;
      os.precision(17);
      os << "psi[" << k + 1 << "] = " << rs[k + 1].psi << " exceeds window bound " << bound;
      out.push_back({k, excess, os.str()});
    }
  }
  return out;
}

inline std::vector<Violation> check_acceptance(const Trace& trace) {
  return check_acceptance(trace, trace.config_echo.m, trace.config_echo.delta);
}

/// The window envelope max_{j=0..m_k} psi[k-j] is nonincreasing.
inline bool check_envelope(const Trace& trace, std::size_t m, double tol = kCheckTolerance) {
  const auto env = window_maxima(trace, m);
  for (std::size_t k = 0; k + 1 < env.size(); ++k) {
    if (env[k + 1] > env[k] + tol) return false;
  }
  return true;
}

/// Every iterate stays in the sublevel set {psi <= psi[0]}.
inline bool check_level_set(const Trace& trace, double tol = kCheckTolerance) {
  if (trace.records.empty()) return true;
  const double psi0 = trace.records.front().psi;
  return std::all_of(trace.records.begin(), trace.records.end(),
                     [&](const IterateRecord& r) { return r.psi <= psi0 + tol; });
}

namespace detail {

// Rows with an accepted step, restricted to the final `fraction` of them
// (at least one row).
inline std::vector<const IterateRecord*> tail_steps(const Trace& trace, double fraction) {
  std::vector<const IterateRecord*> steps;
  for (const auto& r : trace.records) {
    if (r.has_step()) steps.push_back(&r);
  }
  if (steps.empty()) return steps;
  const auto want = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(steps.size())));
  const std::size_t n = std::clamp<std::size_t>(want, 1, steps.size());
  return {steps.end() - static_cast<std::ptrdiff_t>(n), steps.end()};
}

}  // namespace detail

/// min of step_norm over the final 10% of steps is <= tol. Traces with fewer
/// than ten rows are judged on their last step.
inline bool check_vanishing_steps(const Trace& trace, double tol) {
  const auto tail = detail::tail_steps(trace, 0.1);
  if (tail.empty()) return false;
  double mn = std::numeric_limits<double>::infinity();
  for (const auto* r : tail) mn = std::min(mn, *r->step_norm);
  return mn <= tol;
}

/// min of gamma * step_norm over the final 10% of steps is <= tol.
inline bool check_gamma_step_product(const Trace& trace, double tol) {
  const auto tail = detail::tail_steps(trace, 0.1);
  if (tail.empty()) return false;
  double mn = std::numeric_limits<double>::infinity();
  for (const auto* r : tail) mn = std::min(mn, *r->gamma * *r->step_norm);
  return mn <= tol;
}

/// Boundedness of the accepted gammas is a subsequence statement, so it is
/// reported rather than judged: the maximum, and whether the whole final
/// quarter of accepted values sits above tau * gamma_max.
struct GammaBoundReport {
  double max_gamma = 0.0;
  bool growth_trend = false;
};

inline GammaBoundReport gamma_bound_report(const Trace& trace, double tau, double gamma_max) {
  GammaBoundReport rep;
  std::vector<double> gammas;
  for (const auto& r : trace.records) {
    if (r.gamma) gammas.push_back(*r.gamma);
  }
  if (gammas.empty()) return rep;
  rep.max_gamma = *std::max_element(gammas.begin(), gammas.end());
  const auto want = static_cast<std::size_t>(std::ceil(0.25 * static_cast<double>(gammas.size())));
  const std::size_t n = std::clamp<std::size_t>(want, 1, gammas.size());
  rep.growth_trend = std::all_of(gammas.end() - static_cast<std::ptrdiff_t>(n), gammas.end(),
                                 [&](double g) { return g > tau * gamma_max; });
  return rep;
}

/// Per-row consistency: psi = f + phi, and gamma = tau^inner_iters * gamma0.
inline std::vector<Violation> check_records(const Trace& trace, double tau, double rel_tol = 1e-12) {
  std::vector<Violation> out;
  for (const auto& r : trace.records) {
    const double sum = r.f + r.phi;
    const double err = std::abs(r.psi - sum);
    if (err > rel_tol * std::max(1.0, std::abs(r.psi))) {
      out.push_back({r.k, err, "psi != f + phi"});
    }
    if (r.gamma && r.gamma0 && r.inner_iters) {
      const double expect = *r.gamma0 * std::pow(tau, static_cast<double>(*r.inner_iters));
      const double gerr = std::abs(*r.gamma - expect);
      if (gerr > rel_tol * std::abs(expect)) {
        out.push_back({r.k, gerr, "gamma != tau^inner_iters * gamma0"});
      }
    }
  }
  return out;
}

/// Thresholds used when running the whole battery.
struct CheckSettings {
  std::size_t m = 0;
  double delta = 1e-4;
  double tau = 2.0;
  double gamma_max = 1e8;
  double step_tol = 1e-6;
  double product_tol = 1e-5;
  double gamma_bound = 1e6;
};

inline CheckSettings settings_from(const Trace& trace) {
  CheckSettings s;
  s.m = trace.config_echo.m;
  s.delta = trace.config_echo.delta;
  s.tau = trace.config_echo.tau;
  s.gamma_max = trace.config_echo.gamma_max;
  return s;
}

struct CheckResult {
  std::string name;
  bool passed = false;
  bool informational = false;  // reported, never counted as a failure
  std::string detail;
  std::vector<Violation> violations;
};

inline std::vector<CheckResult> run_all_checks(const Trace& trace, const CheckSettings& s) {
  require_well_formed(trace);
  std::vector<CheckResult> out;
  auto num = [](double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
  };

  {
    CheckResult c{"records", true, false, {}, check_records(trace, s.tau)};
    c.passed = c.violations.empty();
    c.detail = std::to_string(c.violations.size()) + " inconsistent rows";
    out.push_back(std::move(c));
  }
  {
    CheckResult c{"acceptance", true, false, {}, check_acceptance(trace, s.m, s.delta)};
    c.passed = c.violations.empty();
    c.detail = std::to_string(c.violations.size()) + " violations";
    if (!c.violations.empty()) {
      c.detail += " at rows";
      for (const auto& v : c.violations) c.detail += " " + std::to_string(v.row);
    }
    out.push_back(std::move(c));
  }
  out.push_back({"envelope", check_envelope(trace, s.m), false, "m=" + std::to_string(s.m), {}});
  out.push_back({"level_set", check_level_set(trace), false, "psi0=" + num(trace.records.front().psi), {}});
  out.push_back({"vanishing_steps", check_vanishing_steps(trace, s.step_tol), false, "tol=" + num(s.step_tol), {}});
  out.push_back({"gamma_step_product", check_gamma_step_product(trace, s.product_tol), false,
                 "tol=" + num(s.product_tol), {}});
  {
    const auto rep = gamma_bound_report(trace, s.tau, s.gamma_max);
    out.push_back({"gamma_bound", rep.max_gamma <= s.gamma_bound && !rep.growth_trend, true,
                   "max_gamma=" + num(rep.max_gamma) + " trend=" + (rep.growth_trend ? "true" : "false"),
                   {}});
  }
  return out;
}

}  // namespace proxgrad
