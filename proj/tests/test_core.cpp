#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "proxgrad/problem.hpp"

using namespace proxgrad;

TEST(Vector, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(Vector(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(Vector(0), std::invalid_argument);
  EXPECT_THROW((Vector{1.0, std::nan("")}), std::invalid_argument);
  EXPECT_THROW((Vector{std::numeric_limits<double>::infinity()}), std::invalid_argument);
}

TEST(Vector, NormDotAxpy) {
  EXPECT_DOUBLE_EQ(norm(Vector{3.0, 4.0}), 5.0);
  EXPECT_DOUBLE_EQ(dot(Vector{1.0, 2.0}, Vector{2.0, -1.0}), 0.0);
  EXPECT_EQ(axpy(2.0, Vector{1.0, 1.0}, Vector{0.0, -1.0}), (Vector{2.0, 1.0}));
}

TEST(Vector, DimensionMismatchIsAnArgumentError) {
  const Vector a{1.0, 2.0};
  const Vector b{1.0, 2.0, 3.0};
  EXPECT_THROW(dot(a, b), std::invalid_argument);
  EXPECT_THROW(axpy(1.0, a, b), std::invalid_argument);
  EXPECT_THROW(a - b, std::invalid_argument);
}

TEST(Vector, TriangleInequalityOnRandomVectors) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::uniform_int_distribution<int> dim(1, 12);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = dim(rng);
    Vector x(static_cast<std::size_t>(n));
    Vector y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      x[i] = u(rng);
      y[i] = u(rng);
    }
    const double a = u(rng);
    const double lhs = norm(axpy(a, x, y));
    const double rhs = std::abs(a) * norm(x) + norm(y);
    EXPECT_LE(lhs, rhs * (1.0 + 1e-12));
  }
}

TEST(ExtReal, InfinityArithmeticAndOrdering) {
  const ExtReal inf = ExtReal::infinity();
  EXPECT_TRUE(inf.is_infinite());
  EXPECT_GT(inf, ExtReal(1e300));
  EXPECT_TRUE((ExtReal(2.0) + inf).is_infinite());
  EXPECT_DOUBLE_EQ((ExtReal(2.0) + ExtReal(0.5)).value(), 2.5);
  EXPECT_THROW(ExtReal(-std::numeric_limits<double>::infinity()), std::invalid_argument);
  EXPECT_THROW(ExtReal(std::nan("")), std::invalid_argument);
}

namespace {

CompositeProblem half_norm_sq(ProxOracle phi) {
  return CompositeProblem::from_oracles(make_quadratic({Vector{1.0, 0.0}, Vector{0.0, 1.0}}, Vector{0.0, 0.0}),
                                        std::move(phi), 2);
}

}  // namespace

TEST(PsiEval, ZeroAtOrigin) {
  EXPECT_EQ(psi_eval(half_norm_sq(make_zero_prox()), Vector{0.0, 0.0}), ExtReal(0.0));
}

TEST(PsiEval, OutsideDomainIsInfinite) {
  const auto p = half_norm_sq(make_box_prox(Vector{0.0, 0.0}, Vector{1.0, 1.0}));
  EXPECT_TRUE(psi_eval(p, Vector{2.0, 0.0}).is_infinite());
  EXPECT_TRUE(psi_eval(p, Vector{0.5, 0.5}).is_finite());
}

TEST(PsiEval, LassoValue) {
  const auto p = CompositeProblem::from_oracles(
      make_quadratic({Vector{1.0, 0.0}, Vector{0.0, 1.0}}, Vector{1.0, 0.1}), make_l1_prox(0.5), 2);
  const Vector x{0.5, 0.0};
  // 1/2 (0.25 + 0.01) + 0.5 * 0.5, and the two oracles evaluated separately.
  EXPECT_NEAR(psi_eval(p, x).value(), 0.380, 1e-15);
  EXPECT_NEAR(psi_eval(p, x).value(), p.smooth().eval(x) + p.nonsmooth().eval(x).value(), 1e-15);
}

TEST(PsiEval, DimensionMismatch) {
  EXPECT_THROW(psi_eval(half_norm_sq(make_zero_prox()), Vector{1.0}), std::invalid_argument);
}

TEST(CompositeProblem, RejectsOracleDimensionMismatch) {
  EXPECT_THROW(CompositeProblem::from_oracles(make_quartic(3), make_zero_prox(), 2), std::invalid_argument);
  EXPECT_THROW(CompositeProblem::from_oracles(make_quartic(2), make_box_prox(Vector{0.0}, Vector{1.0}), 2),
               std::invalid_argument);
}

TEST(CompositeProblem, MetadataFollowsOracleFlags) {
  const auto p = CompositeProblem::from_oracles(make_quartic(2), make_l0_prox(0.1), 2);
  EXPECT_FALSE(p.metadata().phi_continuous_on_domain);
  EXPECT_TRUE(p.metadata().grad_f_locally_lipschitz);
  EXPECT_TRUE(p.metadata().phi_affine_minorant);
  EXPECT_EQ(p.name(), "quartic+l0");
}
