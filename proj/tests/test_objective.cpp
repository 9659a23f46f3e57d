#include <random>

#include <gtest/gtest.h>

#include "abconv/objective.hpp"

using namespace abconv;

namespace {

Vector V(std::initializer_list<double> xs) {
  Vector v(xs.size());
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Objective quad1(double a, double u, double c) {
  return Objective(GeneralizedQuadratic::isotropic(a, V({u}), c));
}

// Midpoint inequality with modulus rho on random triples.
void expect_midpoint(const std::function<double(const Vector&)>& h, double rho, int dim, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-5, 5), T(0, 1);
  for (int s = 0; s < 1000; ++s) {
    Vector x1(dim), x2(dim);
    for (int i = 0; i < dim; ++i) {
      x1(i) = U(rng);
      x2(i) = U(rng);
    }
    const double l = T(rng);
    const double lhs = h(l * x1 + (1 - l) * x2);
    const double rhs = l * h(x1) + (1 - l) * h(x2) + rho * l * (1 - l) * (x1 - x2).squaredNorm();
    EXPECT_LE(lhs, rhs + 1e-9 * (1 + std::abs(rhs)));
  }
}

}  // namespace

TEST(EvalExtended, QuadraticBody) { EXPECT_EQ(eval_extended(quad1(1, 2, 1), V({-1})), 0.0); }

TEST(EvalExtended, OutsideDomainIsInfinite) {
  Objective f(GeneralizedQuadratic::zero(1), Box(V({0}), V({1})));
  EXPECT_EQ(f(V({2})), kInf);
  EXPECT_EQ(f(V({0.5})), 0.0);
}

TEST(EvalExtended, BlackBoxBody) {
  Objective g(1, [](const Vector& x) { return 2 * x(0) + 1; });
  EXPECT_EQ(g(V({3})), 7.0);
}

TEST(EvalExtended, DimensionMismatch) { EXPECT_THROW(quad1(1, 0, 0)(V({1, 2})), DimensionError); }

TEST(Objective, RejectsImproperBlackBox) {
  EXPECT_THROW(Objective(1, [](const Vector&) { return kInf; }), std::invalid_argument);
}

TEST(Objective, MinusInfinityIsRejectedOnEvaluation) {
  Objective g(1, [](const Vector& x) { return x(0) > 5 ? -kInf : 0.0; });
  EXPECT_THROW(g(V({6})), std::domain_error);
}

TEST(Objective, ProbeFindsSmallDomain) {
  // Finite only on [3, 3.01]: the center of the probe box misses it, sampling does not.
  Objective g(1, [](const Vector& x) { return (x(0) >= 3 && x(0) <= 3.01) ? 0.0 : kInf; }, std::nullopt,
              Box(V({0}), V({4})));
  EXPECT_EQ(g(V({3.005})), 0.0);
}

TEST(WeakConvexity, ConvexQuadratic) {
  auto r = weak_convexity_modulus(quad1(1, 2, 1));
  EXPECT_EQ(r.modulus, 0.0);
  EXPECT_TRUE(r.certified);
  EXPECT_EQ(r.method, WeakConvexityReport::Method::Analytic);
}

TEST(WeakConvexity, ConcaveParabola) {
  // -(x-1)^2
  auto r = weak_convexity_modulus(quad1(-1, 2, -1));
  EXPECT_NEAR(r.modulus, 1.0, 1e-12);
  EXPECT_TRUE(r.certified);
  EXPECT_NEAR(weak_convexity_modulus(quad1(-3, 0, 0)).modulus, 3.0, 1e-12);
}

TEST(WeakConvexity, SampledIsUncertified) {
  Objective g(1, [](const Vector& x) { return -x(0) * x(0); });
  auto r = weak_convexity_modulus(g, Box(V({-2}), V({2})));
  EXPECT_FALSE(r.certified);
  EXPECT_EQ(r.method, WeakConvexityReport::Method::Sampled);
  EXPECT_NEAR(r.modulus, 1.0, 1e-6);
}

TEST(ShiftedModulus, Examples) {
  EXPECT_NEAR(shifted_modulus(quad1(-1, 0, 0), 0.0, LinearMap::identity(1)), 1.0, 1e-12);
  Matrix L(1, 2);
  L << 1, -1;
  Objective zero2(GeneralizedQuadratic::zero(2));
  EXPECT_NEAR(shifted_modulus(zero2, 1.0, LinearMap(L)), 2.0, 1e-12);
  EXPECT_NEAR(shifted_modulus(quad1(-2, 0, 0), 3.0, LinearMap::identity(1)), 5.0, 1e-12);
}

TEST(ShiftedModulus, Errors) {
  EXPECT_THROW(shifted_modulus(quad1(1, 0, 0), -1.0, LinearMap::identity(1)), std::invalid_argument);
  Objective g(1, [](const Vector& x) { return x(0) * x(0); });
  EXPECT_THROW(shifted_modulus(g, 1.0, LinearMap::identity(1)), std::invalid_argument);
}

TEST(WeakConvexity, MidpointInequalityForQuadratics) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-3, 3);
  for (int t = 0; t < 5; ++t) {
    Matrix B(2, 2);
    B << U(rng), U(rng), U(rng), U(rng);
    GeneralizedQuadratic q(B + B.transpose(), V({U(rng), U(rng)}), U(rng));
    Objective f(q);
    const double rho = weak_convexity_modulus(f).modulus;
    expect_midpoint([&](const Vector& x) { return f(x); }, rho, 2, 100 + t);
  }
}

TEST(WeakConvexity, ShiftedModulusMidpoint) {
  // h(x) = f(x) - b||Lx||^2 is weakly convex with modulus a + b||L||^2.
  Matrix Lm(2, 2);
  Lm << 1, 2, -1, 0.5;
  LinearMap L(Lm);
  Matrix A(2, 2);
  A << -0.5, 0.2, 0.2, 1.0;
  Objective f(GeneralizedQuadratic(A, V({1, 0}), 0.0));
  const double b = 0.7;
  const double rho = shifted_modulus(f, b, L);
  expect_midpoint([&](const Vector& x) { return f(x) - b * L(x).squaredNorm(); }, rho, 2, 77);
}

TEST(Compose, SumWithQuadraticStaysQuadratic) {
  Objective f = quad1(1, 2, 1);
  Objective g = quad1(4, 0, 0);
  auto s = compose_sum(f, g, LinearMap::identity(1));
  ASSERT_NE(s.quadratic(), nullptr);
  EXPECT_NEAR(s(V({-0.2})), 0.8, 1e-12);
}

TEST(Compose, BlackBoxSum) {
  Objective f(GeneralizedQuadratic::zero(1), Box(V({-1}), V({1})));
  Objective g(1, [](const Vector& x) { return std::abs(x(0)); });
  auto s = compose_sum(f, g, LinearMap::identity(1));
  EXPECT_EQ(s(V({0.5})), 0.5);
  EXPECT_EQ(s(V({3})), kInf);
}

TEST(BoxTest, Basics) {
  Box b(V({0, -1}), V({1, 1}));
  EXPECT_TRUE(b.contains(V({0.5, 0})));
  EXPECT_FALSE(b.contains(V({1.5, 0})));
  EXPECT_THROW(Box(V({1}), V({0})), std::invalid_argument);
  EXPECT_FALSE(b.intersect(Box(V({2, 2}), V({3, 3}))).has_value());
}
