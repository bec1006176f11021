#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include "proxgrad/core.hpp"
#include "proxgrad/prox_oracles.hpp"
#include "proxgrad/smooth_oracles.hpp"

namespace proxgrad {

/// Properties the problem author declares about psi = f + phi. They are
/// reported, never silently assumed by the solver.
struct ProblemMetadata {
  bool phi_continuous_on_domain = true;
  bool grad_f_locally_lipschitz = true;
  bool psi_bounded_below = true;
  bool phi_affine_minorant = true;
};

/// f, phi and psi at one point.
struct PointValues {
  double f = 0.0;
  ExtReal phi;
  ExtReal psi;
};

/// psi(x) = f(x) + phi(x) on R^dimension.
class CompositeProblem {
public:
  CompositeProblem(SmoothOracle smooth, ProxOracle nonsmooth, std::size_t dimension,
                   ProblemMetadata metadata, std::string name = {})
      : smooth_(std::move(smooth)),
        nonsmooth_(std::move(nonsmooth)),
        dimension_(dimension),
        metadata_(metadata),
        name_(std::move(name)) {
    if (dimension_ == 0) throw std::invalid_argument("problem: dimension must be >= 1");
    if (smooth_.dimension != 0 && smooth_.dimension != dimension_) {
      throw std::invalid_argument("problem: smooth oracle '" + smooth_.name + "' has dimension " +
                                  std::to_string(smooth_.dimension) + ", problem has " +
                                  std::to_string(dimension_));
    }
    if (nonsmooth_.dimension != 0 && nonsmooth_.dimension != dimension_) {
      throw std::invalid_argument("problem: prox oracle '" + nonsmooth_.name + "' has dimension " +
                                  std::to_string(nonsmooth_.dimension) + ", problem has " +
                                  std::to_string(dimension_));
    }
    if (!smooth_.eval || !smooth_.grad || !nonsmooth_.eval || !nonsmooth_.prox) {
      throw std::invalid_argument("problem: oracle with missing callable");
    }
    if (name_.empty()) name_ = smooth_.name + "+" + nonsmooth_.name;
  }

  /// Metadata derived from the oracles' own flags.
  static CompositeProblem from_oracles(SmoothOracle smooth, ProxOracle nonsmooth,
                                       std::size_t dimension, bool psi_bounded_below = true,
                                       std::string name = {}) {
    ProblemMetadata meta;
    meta.phi_continuous_on_domain = nonsmooth.continuous_on_domain;
    meta.grad_f_locally_lipschitz = smooth.grad_locally_lipschitz;
    meta.psi_bounded_below = psi_bounded_below;
    meta.phi_affine_minorant = nonsmooth.affine_minorant;
    return {std::move(smooth), std::move(nonsmooth), dimension, meta, std::move(name)};
  }

  [[nodiscard]] const SmoothOracle& smooth() const noexcept { return smooth_; }
  [[nodiscard]] const ProxOracle& nonsmooth() const noexcept { return nonsmooth_; }
  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] const ProblemMetadata& metadata() const noexcept { return metadata_; }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }

  void require_dimension(const Vector& x) const {
    if (x.size() != dimension_) {
      throw std::invalid_argument("problem '" + name_ + "': point has dimension " +
                                  std::to_string(x.size()) + ", expected " +
                                  std::to_string(dimension_));
    }
  }

private:
  SmoothOracle smooth_;
  ProxOracle nonsmooth_;
  std::size_t dimension_;
  ProblemMetadata metadata_;
  std::string name_;
};

inline PointValues evaluate(const CompositeProblem& problem, const Vector& x) {
  problem.require_dimension(x);
  if (!x.all_finite()) throw std::invalid_argument("psi: point has non-finite coordinates");
  PointValues pv;
  pv.phi = problem.nonsmooth().eval(x);
  pv.f = problem.smooth().eval(x);
  pv.psi = pv.phi.is_finite() ? ExtReal(pv.f) + pv.phi : ExtReal::infinity();
  return pv;
}

inline ExtReal psi_eval(const CompositeProblem& problem, const Vector& x) {
  return evaluate(problem, x).psi;
}

}  // namespace proxgrad
