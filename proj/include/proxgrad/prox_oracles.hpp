#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "proxgrad/core.hpp"

namespace proxgrad {

/// Lower semicontinuous phi: X -> R ∪ {+inf} together with an exact proximal
/// map. `prox(gamma, v)` returns a global minimizer of
///
///     x -> (gamma/2) ||x - v||^2 + phi(x).
///
/// Where that minimizer is not unique the oracle documents a deterministic
/// selection. `dimension == 0` means any dimension is accepted.
struct ProxOracle {
  std::string name;
  std::size_t dimension = 0;
  std::function<ExtReal(const Vector&)> eval;
  std::function<Vector(double gamma, const Vector& v)> prox;
  bool continuous_on_domain = true;
  bool affine_minorant = true;
  bool convex = true;
};

namespace detail {

inline void require_positive_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("prox: gamma must be a positive finite number");
  }
}

inline void require_nonnegative_lambda(double lambda, const char* who) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument(std::string(who) + ": lambda must be finite and >= 0");
  }
}

}  // namespace detail

/// One-dimensional kernels. The vector prox maps of the separable penalties
/// apply these coordinatewise.
namespace scalar {

inline double soft_threshold(double lambda, double gamma, double v) {
  const double t = lambda / gamma;
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

/// Keeps v iff (gamma/2) v^2 > lambda; the tie goes to 0.
inline double hard_threshold(double lambda, double gamma, double v) {
  return 0.5 * gamma * v * v > lambda ? v : 0.0;
}

/// Global minimizer of (gamma/2)(x - v)^2 + lambda |x|^{1/2}.
///
/// On x > 0 (after reflecting v to |v|) the derivative
///     d(x) = gamma (x - a) + lambda / (2 sqrt(x)),   a = |v|,
/// is convex, with its minimum at x* = (lambda / (4 gamma))^{2/3}. A local
/// minimizer exists iff x* < a and d(x*) < 0; it is then the unique root of d
/// on (x*, a), where d is increasing. That root is compared with x = 0 and
/// the tie goes to 0.
inline double lp_half_prox(double lambda, double gamma, double v) {
  const double a = std::abs(v);
  if (lambda == 0.0 || a == 0.0) return v;

  auto deriv = [&](double x) { return gamma * (x - a) + lambda / (2.0 * std::sqrt(x)); };
  auto deriv2 = [&](double x) { return gamma - lambda / (4.0 * x * std::sqrt(x)); };

  const double x_star = std::cbrt((lambda / (4.0 * gamma)) * (lambda / (4.0 * gamma)));
  if (x_star >= a || deriv(x_star) >= 0.0) return 0.0;

  // Newton from the right end of the bracket, falling back to bisection when
  // the step leaves [lo, hi].
  double lo = x_star;
  double hi = a;
  double x = a;
  for (int it = 0; it < 200; ++it) {
    const double d = deriv(x);
    if (std::abs(d) <= 1e-12 * std::max(1.0, gamma * a)) break;
    if (d > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    double next = x - d / deriv2(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x || hi - lo <= std::numeric_limits<double>::epsilon() * a) break;
    x = next;
  }

  const double at_root = 0.5 * gamma * (x - a) * (x - a) + lambda * std::sqrt(x);
  const double at_zero = 0.5 * gamma * a * a;
  if (!(at_root < at_zero)) return 0.0;
  return v > 0.0 ? x : -x;
}

}  // namespace scalar

inline Vector prox_zero(double gamma, const Vector& v) {
  detail::require_positive_gamma(gamma);
  return v;
}

inline Vector prox_l1(double lambda, double gamma, const Vector& v) {
  detail::require_positive_gamma(gamma);
  detail::require_nonnegative_lambda(lambda, "l1");
  return map_coords(v, [&](double c, std::size_t) { return scalar::soft_threshold(lambda, gamma, c); });
}

inline Vector prox_l0(double lambda, double gamma, const Vector& v) {
  detail::require_positive_gamma(gamma);
  detail::require_nonnegative_lambda(lambda, "l0");
  return map_coords(v, [&](double c, std::size_t) { return scalar::hard_threshold(lambda, gamma, c); });
}

inline Vector prox_lp_half(double lambda, double gamma, const Vector& v) {
  detail::require_positive_gamma(gamma);
  detail::require_nonnegative_lambda(lambda, "lp_half");
  return map_coords(v, [&](double c, std::size_t) { return scalar::lp_half_prox(lambda, gamma, c); });
}

/// Euclidean projection onto [lo, hi]; independent of gamma.
inline Vector prox_box_indicator(const Vector& lo, const Vector& hi, double gamma, const Vector& v) {
  detail::require_positive_gamma(gamma);
  detail::require_same_dim(lo, v, "box");
  detail::require_same_dim(hi, v, "box");
  return map_coords(v, [&](double c, std::size_t i) { return std::clamp(c, lo[i], hi[i]); });
}

/// Radial projection onto {x : ||x|| = r}. At v = 0 every sphere point is a
/// minimizer; r * e_1 is returned.
inline Vector prox_sphere_indicator(double radius, double gamma, const Vector& v) {
  detail::require_positive_gamma(gamma);
  const double nv = norm(v);
  if (nv == 0.0) {
    Vector e(v.size(), 0.0);
    e[0] = radius;
    return e;
  }
  return (radius / nv) * v;
}

/// Grid minimizer of (gamma/2)(x - v)^2 + phi(x) over {lo, lo + step, ..., hi}.
/// phi may return +inf. Ties go to the smallest |x|, then the smallest x.
inline double brute_force_prox(const std::function<double(double)>& phi, double gamma, double v,
                               double lo = -10.0, double hi = 10.0, double step = 1e-4) {
  if (!(lo < hi) || !(step > 0.0)) {
    throw std::invalid_argument("brute_force_prox: empty grid (need lo < hi and step > 0)");
  }
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  bool found = false;
  double best_x = 0.0;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    double x = lo + static_cast<double>(i) * step;
    // Grid accumulation can miss the origin by a rounding error.
    if (std::abs(x) < 1e-6 * step) x = 0.0;
    const double val = 0.5 * gamma * (x - v) * (x - v) + phi(x);
    if (!std::isfinite(val)) continue;
    const bool better =
        !found || val < best_val ||
        (val == best_val && (std::abs(x) < std::abs(best_x) ||
                             (std::abs(x) == std::abs(best_x) && x < best_x)));
    if (better) {
      found = true;
      best_x = x;
      best_val = val;
    }
  }
  if (!found) {
    throw std::invalid_argument("brute_force_prox: phi is +inf on every grid point");
  }
  return best_x;
}

// ---------------------------------------------------------------------------
// Oracle constructors

inline ProxOracle make_zero_prox() {
  ProxOracle o;
  o.name = "zero";
  o.eval = [](const Vector&) { return ExtReal(0.0); };
  o.prox = [](double gamma, const Vector& v) { return prox_zero(gamma, v); };
  return o;
}

inline ProxOracle make_l1_prox(double lambda) {
  detail::require_nonnegative_lambda(lambda, "l1");
  ProxOracle o;
  o.name = "l1";
  o.eval = [lambda](const Vector& x) {
    double s = 0.0;
    for (double c : x) s += std::abs(c);
    return ExtReal(lambda * s);
  };
  o.prox = [lambda](double gamma, const Vector& v) { return prox_l1(lambda, gamma, v); };
  return o;
}

/// lambda * (number of nonzero entries). Discontinuous on its domain.
inline ProxOracle make_l0_prox(double lambda) {
  detail::require_nonnegative_lambda(lambda, "l0");
  ProxOracle o;
  o.name = "l0";
  o.eval = [lambda](const Vector& x) {
    double nnz = 0.0;
    for (double c : x) nnz += (c != 0.0) ? 1.0 : 0.0;
    return ExtReal(lambda * nnz);
  };
  o.prox = [lambda](double gamma, const Vector& v) { return prox_l0(lambda, gamma, v); };
  o.continuous_on_domain = false;
  o.convex = false;
  return o;
}

/// lambda * sum |x_i|^{1/2}.
inline ProxOracle make_lp_half_prox(double lambda) {
  detail::require_nonnegative_lambda(lambda, "lp_half");
  ProxOracle o;
  o.name = "lp_half";
  o.eval = [lambda](const Vector& x) {
    double s = 0.0;
    for (double c : x) s += std::sqrt(std::abs(c));
    return ExtReal(lambda * s);
  };
  o.prox = [lambda](double gamma, const Vector& v) { return prox_lp_half(lambda, gamma, v); };
  o.convex = false;
  return o;
}

/// Indicator of the box [lo, hi].
inline ProxOracle make_box_prox(Vector lo, Vector hi) {
  detail::require_same_dim(lo, hi, "box");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (lo[i] > hi[i]) {
      throw std::invalid_argument("box: lo > hi in coordinate " + std::to_string(i));
    }
  }
  auto bounds = std::make_shared<const std::pair<Vector, Vector>>(std::move(lo), std::move(hi));
  ProxOracle o;
  o.name = "box";
  o.dimension = bounds->first.size();
  o.eval = [bounds](const Vector& x) {
    detail::require_same_dim(bounds->first, x, "box");
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] < bounds->first[i] || x[i] > bounds->second[i]) return ExtReal::infinity();
    }
    return ExtReal(0.0);
  };
  o.prox = [bounds](double gamma, const Vector& v) {
    return prox_box_indicator(bounds->first, bounds->second, gamma, v);
  };
  return o;
}

/// Indicator of the sphere {x : ||x|| = radius}, a closed nonconvex set.
/// Membership is tested with relative tolerance 1e-12 so that radial
/// projections count as feasible.
inline ProxOracle make_sphere_prox(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("sphere: radius must be positive");
  }
  ProxOracle o;
  o.name = "sphere";
  o.eval = [radius](const Vector& x) {
    if (std::abs(norm(x) - radius) <= 1e-12 * std::max(1.0, radius)) return ExtReal(0.0);
    return ExtReal::infinity();
  };
  o.prox = [radius](double gamma, const Vector& v) { return prox_sphere_indicator(radius, gamma, v); };
  o.convex = false;
  return o;
}

}  // namespace proxgrad
