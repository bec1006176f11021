#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace proxgrad {

class Vector;

namespace detail {
Vector unchecked_vector(std::vector<double> coords);
}

/// Dense point of R^n. Coordinates supplied from outside are checked for
/// finiteness; arithmetic results are not (callers that may overflow, such as
/// the backtracking loop, test `all_finite()` themselves).
class Vector {
public:
  Vector() = default;

  explicit Vector(std::size_t n, double fill = 0.0) : coords_(n, fill) {
    if (n == 0) throw std::invalid_argument("Vector: dimension must be >= 1");
    if (!std::isfinite(fill)) throw std::invalid_argument("Vector: non-finite coordinate");
  }

  Vector(std::initializer_list<double> coords) : Vector(std::vector<double>(coords)) {}

  explicit Vector(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw std::invalid_argument("Vector: dimension must be >= 1");
    if (!all_finite()) throw std::invalid_argument("Vector: non-finite coordinate");
  }

  [[nodiscard]] std::size_t size() const noexcept { return coords_.size(); }
  [[nodiscard]] bool empty() const noexcept { return coords_.empty(); }

  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }

  [[nodiscard]] std::span<const double> span() const noexcept { return coords_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return coords_; }

  auto begin() const noexcept { return coords_.begin(); }
  auto end() const noexcept { return coords_.end(); }

  [[nodiscard]] bool all_finite() const noexcept {
    return std::all_of(coords_.begin(), coords_.end(), [](double c) { return std::isfinite(c); });
  }

  friend bool operator==(const Vector&, const Vector&) = default;

private:
  struct Unchecked {};
  Vector(Unchecked, std::vector<double> coords) : coords_(std::move(coords)) {}

  friend Vector detail::unchecked_vector(std::vector<double> coords);

  std::vector<double> coords_;
};

namespace detail {
inline Vector unchecked_vector(std::vector<double> coords) {
  return Vector(Vector::Unchecked{}, std::move(coords));
}

inline void require_same_dim(const Vector& x, const Vector& y, const char* op) {
  if (x.size() != y.size()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
  }
}
}  // namespace detail

inline double dot(const Vector& x, const Vector& y) {
  detail::require_same_dim(x, y, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double squared_norm(const Vector& x) {
  double s = 0.0;
  for (double c : x) s += c * c;
  return s;
}

inline double norm(const Vector& x) { return std::sqrt(squared_norm(x)); }

/// a*x + y
inline Vector axpy(double a, const Vector& x, const Vector& y) {
  detail::require_same_dim(x, y, "axpy");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + y[i];
  return detail::unchecked_vector(std::move(out));
}

inline Vector operator-(const Vector& x, const Vector& y) {
  detail::require_same_dim(x, y, "subtract");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
  return detail::unchecked_vector(std::move(out));
}

inline Vector operator+(const Vector& x, const Vector& y) {
  detail::require_same_dim(x, y, "add");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
  return detail::unchecked_vector(std::move(out));
}

inline Vector operator*(double a, const Vector& x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i];
  return detail::unchecked_vector(std::move(out));
}

/// Applies a scalar map coordinatewise.
template <class F>
Vector map_coords(const Vector& x, F&& f) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i], i);
  return detail::unchecked_vector(std::move(out));
}

/// Element of R ∪ {+inf}. -inf and NaN are rejected at construction.
class ExtReal {
public:
  constexpr ExtReal() = default;

  ExtReal(double v) : value_(v) {  // NOLINT(google-explicit-constructor)
    if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) {
      throw std::invalid_argument("ExtReal: value must be finite or +inf");
    }
  }

  static ExtReal infinity() noexcept {
    ExtReal r;
    r.value_ = std::numeric_limits<double>::infinity();
    return r;
  }

  [[nodiscard]] bool is_finite() const noexcept { return std::isfinite(value_); }
  [[nodiscard]] bool is_infinite() const noexcept { return !is_finite(); }

  /// The finite value, or +inf as a double.
  [[nodiscard]] double value() const noexcept { return value_; }

  friend ExtReal operator+(ExtReal a, ExtReal b) {
    if (a.is_infinite() || b.is_infinite()) return infinity();
    return ExtReal(a.value_ + b.value_);
  }

  friend bool operator==(ExtReal a, ExtReal b) noexcept { return a.value_ == b.value_; }
  friend auto operator<=>(ExtReal a, ExtReal b) noexcept { return a.value_ <=> b.value_; }

private:
  double value_ = 0.0;
};

}  // namespace proxgrad
