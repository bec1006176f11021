#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "proxgrad/core.hpp"

namespace proxgrad {

/// Continuously differentiable f with its exact gradient.
///
/// `dimension == 0` means the oracle accepts any dimension. Oracles are
/// immutable after construction; `eval` and `grad` may be called
/// concurrently.
struct SmoothOracle {
  std::string name;
  std::size_t dimension = 0;
  std::function<double(const Vector&)> eval;
  std::function<Vector(const Vector&)> grad;
  bool grad_locally_lipschitz = true;
};

/// Row-major dense matrix stored as a list of rows.
using Matrix = std::vector<Vector>;

namespace detail {

inline std::size_t column_count(const Matrix& rows, const char* who) {
  if (rows.empty()) throw std::invalid_argument(std::string(who) + ": matrix has no rows");
  const std::size_t n = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != n) throw std::invalid_argument(std::string(who) + ": ragged matrix rows");
  }
  return n;
}

inline void require_dim(const Vector& x, std::size_t n, const char* who) {
  if (n != 0 && x.size() != n) {
    throw std::invalid_argument(std::string(who) + ": expected dimension " + std::to_string(n) +
                                ", got " + std::to_string(x.size()));
  }
}

// log(1 + exp(-t)) without overflow for large |t|.
inline double log1p_exp_neg(double t) {
  if (t > 0.0) return std::log1p(std::exp(-t));
  return -t + std::log1p(std::exp(t));
}

// 1 / (1 + exp(t)), i.e. sigmoid(-t).
inline double sigmoid_neg(double t) {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

}  // namespace detail

/// f(x) = 1/2 ||Ax - b||^2,  grad f(x) = A^T (Ax - b).
inline SmoothOracle make_quadratic(Matrix a_rows, Vector b) {
  const std::size_t n = detail::column_count(a_rows, "quadratic");
  if (b.size() != a_rows.size()) {
    throw std::invalid_argument("quadratic: b has " + std::to_string(b.size()) +
                                " entries but A has " + std::to_string(a_rows.size()) + " rows");
  }
  struct Data {
    Matrix a;
    Vector b;
    Vector residual(const Vector& x) const {
      std::vector<double> r(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) r[i] = dot(a[i], x) - b[i];
      return detail::unchecked_vector(std::move(r));
    }
  };
  auto data = std::make_shared<const Data>(Data{std::move(a_rows), std::move(b)});

  SmoothOracle o;
  o.name = "quadratic";
  o.dimension = n;
  o.eval = [data, n](const Vector& x) {
    detail::require_dim(x, n, "quadratic");
    return 0.5 * squared_norm(data->residual(x));
  };
  o.grad = [data, n](const Vector& x) {
    detail::require_dim(x, n, "quadratic");
    const Vector r = data->residual(x);
    std::vector<double> g(n, 0.0);
    for (std::size_t i = 0; i < data->a.size(); ++i) {
      for (std::size_t j = 0; j < n; ++j) g[j] += data->a[i][j] * r[i];
    }
    return detail::unchecked_vector(std::move(g));
  };
  o.grad_locally_lipschitz = true;
  return o;
}

/// f(x) = 1/4 sum x_i^4. Its gradient is locally but not globally Lipschitz.
inline SmoothOracle make_quartic(std::size_t dimension) {
  if (dimension == 0) throw std::invalid_argument("quartic: dimension must be >= 1");
  SmoothOracle o;
  o.name = "quartic";
  o.dimension = dimension;
  o.eval = [dimension](const Vector& x) {
    detail::require_dim(x, dimension, "quartic");
    double s = 0.0;
    for (double c : x) s += c * c * c * c;
    return 0.25 * s;
  };
  o.grad = [dimension](const Vector& x) {
    detail::require_dim(x, dimension, "quartic");
    return map_coords(x, [](double c, std::size_t) { return c * c * c; });
  };
  o.grad_locally_lipschitz = true;
  return o;
}

/// f(x) = sum_i log(1 + exp(-y_i <a_i, x>)) with labels y_i in {-1, +1}.
inline SmoothOracle make_logistic(Matrix a_rows, std::vector<double> labels) {
  const std::size_t n = detail::column_count(a_rows, "logistic");
  if (labels.size() != a_rows.size()) {
    throw std::invalid_argument("logistic: label count does not match row count");
  }
  for (double y : labels) {
    if (y != 1.0 && y != -1.0) {
      throw std::invalid_argument("logistic: label " + std::to_string(y) + " not in {-1,+1}");
    }
  }
  struct Data {
    Matrix a;
    std::vector<double> y;
  };
  auto data = std::make_shared<const Data>(Data{std::move(a_rows), std::move(labels)});

  SmoothOracle o;
  o.name = "logistic";
  o.dimension = n;
  o.eval = [data, n](const Vector& x) {
    detail::require_dim(x, n, "logistic");
    double s = 0.0;
    for (std::size_t i = 0; i < data->a.size(); ++i) {
      s += detail::log1p_exp_neg(data->y[i] * dot(data->a[i], x));
    }
    return s;
  };
  o.grad = [data, n](const Vector& x) {
    detail::require_dim(x, n, "logistic");
    std::vector<double> g(n, 0.0);
    for (std::size_t i = 0; i < data->a.size(); ++i) {
      const double t = data->y[i] * dot(data->a[i], x);
      const double w = -data->y[i] * detail::sigmoid_neg(t);
      for (std::size_t j = 0; j < n; ++j) g[j] += w * data->a[i][j];
    }
    return detail::unchecked_vector(std::move(g));
  };
  o.grad_locally_lipschitz = true;
  return o;
}

/// Largest coordinatewise central-difference error, each normalized by
/// max(1, |grad_i|).
inline double fd_gradient_check(const SmoothOracle& oracle, const Vector& x, double h = 1e-5) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_gradient_check: h must be positive");
  const Vector g = oracle.grad(x);
  double worst = 0.0;
  Vector probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = oracle.eval(probe);
    probe[i] = x[i] - h;
    const double down = oracle.eval(probe);
    probe[i] = x[i];
    const double slope = (up - down) / (2.0 * h);
    worst = std::max(worst, std::abs(slope - g[i]) / std::max(1.0, std::abs(g[i])));
  }
  return worst;
}

}  // namespace proxgrad
