#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "proxgrad/core.hpp"
#include "proxgrad/problem.hpp"
#include "proxgrad/solver_config.hpp"
#include "proxgrad/trace.hpp"

namespace proxgrad {

/// The last m_k + 1 accepted objective values, m_k = min(k, m).
class WindowState {
public:
  explicit WindowState(std::size_t m) : m_(m) {}

  void push(double psi) {
    values_.push_back(psi);
    if (values_.size() > m_ + 1) values_.pop_front();
  }

  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
  [[nodiscard]] std::size_t window() const noexcept { return m_; }
  [[nodiscard]] const std::deque<double>& values() const noexcept { return values_; }

private:
  std::size_t m_;
  std::deque<double> values_;
};

/// max_{j=0..m_k} psi(x^{k-j}); equals psi(x^k) when m = 0.
inline double acceptance_reference(const WindowState& window) {
  if (window.empty()) throw std::logic_error("acceptance_reference: empty window");
  return *std::max_element(window.values().begin(), window.values().end());
}

/// Global minimizer of the linearized subproblem
///   <grad_k, x - x_k> + (gamma/2) ||x - x_k||^2 + phi(x),
/// i.e. prox(gamma, x_k - grad_k / gamma).
inline Vector subproblem_solve(const CompositeProblem& problem, const Vector& x_k,
                               const Vector& grad_k, double gamma) {
  detail::require_same_dim(x_k, grad_k, "subproblem_solve");
  const Vector v = map_coords(x_k, [&](double xi, std::size_t i) { return xi - grad_k[i] / gamma; });
  return problem.nonsmooth().prox(gamma, v);
}

/// Stationarity residual ||gamma_prev (x_prev - x_cur) + grad_cur - grad_prev||.
/// Used for the outer termination test and, with (x_k, x^{k,i}), for the
/// early inner exit.
inline double outer_residual(const Vector& x_prev, const Vector& x_cur, double gamma_prev,
                             const Vector& grad_prev, const Vector& grad_cur) {
  detail::require_same_dim(x_prev, x_cur, "outer_residual");
  detail::require_same_dim(grad_prev, grad_cur, "outer_residual");
  detail::require_same_dim(x_prev, grad_cur, "outer_residual");
  double s = 0.0;
  for (std::size_t i = 0; i < x_prev.size(); ++i) {
    const double r = gamma_prev * (x_prev[i] - x_cur[i]) + grad_cur[i] - grad_prev[i];
    s += r * r;
  }
  return std::sqrt(s);
}

/// s = x^k - x^{k-1}, y = grad f(x^k) - grad f(x^{k-1}).
struct StepPair {
  Vector s;
  Vector y;
};

/// Chooses gamma_k^0 in [gamma_min, gamma_max].
///
/// bb_safeguarded uses the curvature estimate <s,y>/<s,s>. Without a previous
/// step it returns 1; when <s,y> <= 0 or s = 0 it reuses the previous accepted
/// gamma (or 1 if there is none). Every branch is clamped.
inline double gamma0_select(const Gamma0Strategy& strategy, const std::optional<StepPair>& prev_step,
                            std::optional<double> prev_gamma, const SolverConfig& config) {
  auto clamp = [&](double g) { return std::clamp(g, config.gamma_min, config.gamma_max); };
  if (strategy.rule == Gamma0Rule::constant) return clamp(strategy.value);
  const double fallback = clamp(prev_gamma.value_or(1.0));
  if (!prev_step) return clamp(1.0);
  const double ss = dot(prev_step->s, prev_step->s);
  const double sy = dot(prev_step->s, prev_step->y);
  if (!(ss > 0.0) || !(sy > 0.0)) return fallback;
  const double g = sy / ss;
  if (!std::isfinite(g)) return fallback;
  return clamp(g);
}

struct AcceptedStep {
  Vector x_next;
  PointValues values;
  double gamma = 0.0;
  std::size_t inner_iters = 0;
};

/// The inner residual of a rejected trial point fell below tau_abs.
struct EarlyInnerExit {
  Vector x_candidate;
  double gamma = 0.0;
  std::size_t inner_iters = 0;
  double residual = 0.0;
};

struct InnerCapExceeded {
  std::size_t inner_iters = 0;
};

using BacktrackOutcome = std::variant<AcceptedStep, EarlyInnerExit, InnerCapExceeded>;

/// Inner loop: gamma_{k,i} = tau^i gamma0 for i = 0, 1, ... until
///   psi(x^{k,i}) <= psi_ref - delta (gamma_{k,i}/2) ||x^{k,i} - x^k||^2.
/// A trial point that fails the test but has inner residual <= tau_abs ends
/// the loop with EarlyInnerExit. Trial points with non-finite coordinates
/// (overflow on huge steps) are rejected.
inline BacktrackOutcome backtrack(const CompositeProblem& problem, const Vector& x_k,
                                  const Vector& grad_k, double gamma0, double psi_ref,
                                  const SolverConfig& config) {
  double gamma = gamma0;
  for (std::size_t i = 0; i < config.max_inner; ++i) {
    if (i > 0) gamma *= config.tau;
    Vector x = subproblem_solve(problem, x_k, grad_k, gamma);
    if (!x.all_finite()) continue;
    PointValues pv = evaluate(problem, x);
    if (pv.psi.is_infinite()) continue;
    const double d2 = squared_norm(x - x_k);
    if (pv.psi.value() <= psi_ref - config.delta * (0.5 * gamma) * d2) {
      return AcceptedStep{std::move(x), pv, gamma, i};
    }
    const Vector gx = problem.smooth().grad(x);
    const double r = outer_residual(x_k, x, gamma, grad_k, gx);
    if (r <= config.tau_abs) return EarlyInnerExit{std::move(x), gamma, i, r};
  }
  return InnerCapExceeded{config.max_inner};
}

enum class SolveStatus { converged_residual, converged_step, max_outer_reached, inner_loop_cap };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged_residual: return "converged_residual";
    case SolveStatus::converged_step: return "converged_step";
    case SolveStatus::max_outer_reached: return "max_outer_reached";
    case SolveStatus::inner_loop_cap: return "inner_loop_cap";
  }
  return "unknown";
}

struct SolveReport {
  Vector x_final;
  SolveStatus status = SolveStatus::max_outer_reached;
  /// Outer iteration at which the inner loop hit max_inner (inner_loop_cap only).
  std::optional<std::size_t> cap_iteration;
  /// Last evaluated stationarity residual; +inf if none was evaluated.
  double final_residual = std::numeric_limits<double>::infinity();
  /// Set when the run ended through the inner-residual exit. x_final is then
  /// the inner trial point, which is not a row of the trace.
  bool early_inner_exit = false;
  std::vector<std::string> warnings;
  Trace trace;

  [[nodiscard]] std::size_t outer_iterations() const noexcept {
    return trace.records.empty() ? 0 : trace.records.size() - 1;
  }
};

/// Warnings for declared problem properties under which the convergence
/// theory does not cover the requested run.
inline std::vector<std::string> assumption_warnings(const CompositeProblem& problem,
                                                    const SolverConfig& config) {
  std::vector<std::string> out;
  const auto& meta = problem.metadata();
  if (config.m > 0 && !meta.phi_continuous_on_domain) {
    out.emplace_back("nonmonotone run (m = " + std::to_string(config.m) + ") with phi = '" +
                     problem.nonsmooth().name +
                     "' not continuous on its domain: the nonmonotone convergence guarantee "
                     "does not apply");
  }
  if (!meta.psi_bounded_below) out.emplace_back("psi is not declared bounded below");
  if (!meta.phi_affine_minorant) out.emplace_back("phi is not declared to have an affine minorant");
  if (!meta.grad_f_locally_lipschitz && !meta.phi_continuous_on_domain) {
    out.emplace_back("neither grad f locally Lipschitz nor phi continuous on dom phi: no "
                     "stationarity guarantee for accumulation points");
  }
  return out;
}

/// Nonmonotone proximal gradient method with window m (m = 0: monotone).
///
/// Terminates on the first of: residual <= tau_abs (k >= 1), a step with
/// norm <= eps_step and gamma <= tau * gamma_max, max_outer accepted steps,
/// or an inner loop that reaches max_inner.
inline SolveReport solve(const CompositeProblem& problem, const SolverConfig& config,
                         const Vector& x0) {
  validate(config);
  problem.require_dimension(x0);
  PointValues pv = evaluate(problem, x0);
  if (pv.psi.is_infinite()) throw std::invalid_argument("x0 not in dom phi (psi(x0) = +inf)");

  SolveReport report;
  report.warnings = assumption_warnings(problem, config);
  report.trace.config_echo = config;
  report.trace.problem_name = problem.name();
  report.trace.x0_hash = point_hash(x0);

  Vector x = x0;
  Vector g = problem.smooth().grad(x);
  std::optional<Vector> x_prev;
  std::optional<Vector> g_prev;
  std::optional<double> gamma_prev;
  WindowState window(config.m);
  window.push(pv.psi.value());
  bool small_step = false;

  for (std::size_t k = 0;; ++k) {
    IterateRecord rec;
    rec.k = k;
    rec.f = pv.f;
    rec.phi = pv.phi.value();
    rec.psi = pv.psi.value();

    if (k > 0) {
      const double r = outer_residual(*x_prev, x, *gamma_prev, *g_prev, g);
      rec.residual = r;
      report.final_residual = r;
      if (r <= config.tau_abs) {
        report.status = SolveStatus::converged_residual;
        report.trace.records.push_back(rec);
        break;
      }
    }
    if (small_step) {
      report.status = SolveStatus::converged_step;
      report.trace.records.push_back(rec);
      break;
    }
    if (k == config.max_outer) {
      report.status = SolveStatus::max_outer_reached;
      report.trace.records.push_back(rec);
      break;
    }

    std::optional<StepPair> pair;
    if (x_prev) pair = StepPair{x - *x_prev, g - *g_prev};
    const double gamma0 = gamma0_select(config.gamma0, pair, gamma_prev, config);
    const double ref = acceptance_reference(window);
    rec.gamma0 = gamma0;
    rec.accepted_ref = ref;

    BacktrackOutcome outcome = backtrack(problem, x, g, gamma0, ref, config);

    if (auto* cap = std::get_if<InnerCapExceeded>(&outcome)) {
      rec.inner_iters = cap->inner_iters;
      report.status = SolveStatus::inner_loop_cap;
      report.cap_iteration = k;
      report.trace.records.push_back(rec);
      break;
    }
    if (auto* early = std::get_if<EarlyInnerExit>(&outcome)) {
      rec.inner_iters = early->inner_iters;
      report.status = SolveStatus::converged_residual;
      report.early_inner_exit = true;
      report.final_residual = early->residual;
      report.trace.records.push_back(rec);
      report.x_final = std::move(early->x_candidate);
      return report;
    }

    auto& step = std::get<AcceptedStep>(outcome);
    const double step_norm = norm(step.x_next - x);
    rec.gamma = step.gamma;
    rec.inner_iters = step.inner_iters;
    rec.step_norm = step_norm;
    report.trace.records.push_back(rec);

    small_step = step_norm <= config.eps_step && step.gamma <= config.gamma_max * config.tau;
    x_prev = std::move(x);
    g_prev = std::move(g);
    gamma_prev = step.gamma;
    x = std::move(step.x_next);
    pv = step.values;
    g = problem.smooth().grad(x);
    window.push(pv.psi.value());
  }

  report.x_final = std::move(x);
  return report;
}

/// Monotone proximal gradient method: the m = 0 case of `solve`.
inline SolveReport solve_monotone(const CompositeProblem& problem, SolverConfig config,
                                  const Vector& x0) {
  config.m = 0;
  return solve(problem, config, x0);
}

}  // namespace proxgrad
