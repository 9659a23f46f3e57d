#include <random>

#include <gtest/gtest.h>

#include "abconv/conjugate.hpp"

using namespace abconv;

namespace {

Vector V(std::initializer_list<double> xs) {
  Vector v(xs.size());
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

GeneralizedQuadratic iso1(double a, double u, double c = 0.0) {
  return GeneralizedQuadratic::isotropic(a, V({u}), c);
}

const GeneralizedQuadratic kShiftedSquare = iso1(1, 2, 1);  // (x+1)^2
const GeneralizedQuadratic kFourSquare = iso1(4, 0, 0);     // 4x^2
const GeneralizedQuadratic kConcave = iso1(-1, 2, -1);      // -(x-1)^2

}  // namespace

TEST(ClosedForm, ShiftedSquareAgainstNegativeCurvature) {
  for (double a : {0.0, 0.5, 2.0})
    for (double b : {-3.0, 0.0, 2.0, 5.0}) {
      auto r = conjugate_closed_form(kShiftedSquare, iso1(-a, b));
      EXPECT_NEAR(r.value, (b - 2) * (b - 2) / (4 * (a + 1)) - 1, 1e-12);
      ASSERT_TRUE(r.maximizer);
      EXPECT_NEAR(iso1(-a, b)(*r.maximizer) - kShiftedSquare(*r.maximizer), r.value, 1e-8 * (1 + std::abs(r.value)));
    }
}

TEST(ClosedForm, FourSquareAffine) {
  for (double c : {-3.0, 0.0, 1.6})
    EXPECT_NEAR(conjugate_closed_form(kFourSquare, iso1(0, c)).value, c * c / 16, 1e-12);
}

TEST(ClosedForm, ConcaveParabolaThreeBranches) {
  EXPECT_EQ(conjugate_closed_form(kConcave, iso1(-0.5, 1)).value, kInf);
  EXPECT_EQ(conjugate_closed_form(kConcave, iso1(0, 2)).value, kInf);
  EXPECT_NEAR(conjugate_closed_form(kConcave, iso1(-1, 2)).value, 1.0, 1e-12);
  EXPECT_EQ(conjugate_closed_form(kConcave, iso1(-1, 2.5)).value, kInf);
  for (double c : {1.5, 3.0})
    for (double d : {-1.0, 2.0, 4.0})
      EXPECT_NEAR(conjugate_closed_form(kConcave, iso1(-c, d)).value, (d - 2) * (d - 2) / (4 * (c - 1)) + 1, 1e-12);
}

TEST(ClosedForm, ZeroAgainstZero) {
  EXPECT_EQ(conjugate_closed_form(GeneralizedQuadratic::zero(2), GeneralizedQuadratic::zero(2)).value, 0.0);
}

TEST(ClosedForm, ConstantShiftInvariance) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-3, 3);
  for (int i = 0; i < 50; ++i) {
    auto f = iso1(std::abs(U(rng)) + 0.1, U(rng), U(rng));
    auto phi = iso1(-std::abs(U(rng)), U(rng), U(rng));
    const double k = U(rng);
    auto fk = f + GeneralizedQuadratic::constant(1, k);
    auto pk = phi + GeneralizedQuadratic::constant(1, k);
    EXPECT_NEAR(conjugate_closed_form(fk, pk).value, conjugate_closed_form(f, phi).value, 1e-12);
  }
}

TEST(Grid, MatchesClosedFormOnShiftedSquare) {
  Objective f(kShiftedSquare);
  auto r = conjugate_grid(f, iso1(0, 2), default_window(1));
  EXPECT_NEAR(r.value, -1.0, 1e-9);
  EXPECT_TRUE(r.grid_truncated);
}

TEST(Grid, ZeroOnBox) {
  Objective f(GeneralizedQuadratic::zero(1), Box(V({-1}), V({1})));
  EXPECT_EQ(conjugate(f, GeneralizedQuadratic::zero(1), default_window(1)).value, 0.0);
}

TEST(Grid, AffineAgainstSameSlope) {
  Objective g(1, [](const Vector& x) { return 2 * x(0) + 1; });
  for (double b : {-2.0, 0.0, 1.0})
    EXPECT_NEAR(conjugate_grid(g, iso1(0, 2, b), default_window(1)).value, b - 1, 1e-12);
}

TEST(Grid, ImproperWindow) {
  Objective f(GeneralizedQuadratic::zero(1), Box(V({50}), V({60})));
  auto r = conjugate(f, GeneralizedQuadratic::zero(1), default_window(1));
  EXPECT_EQ(r.value, -kInf);
  EXPECT_TRUE(r.improper_window);
}

TEST(Biconjugate, ConvexQuadraticWithAffineFamily) {
  Objective f(kShiftedSquare);
  auto r = biconjugate_at(f, Family::affine(1), V({0}));
  EXPECT_NEAR(r.value, 1.0, 1e-6);
  EXPECT_TRUE(r.grid_truncated);
  EXPECT_NEAR(biconjugate_closed_form(kShiftedSquare, Family::affine(1), V({0})).value, 1.0, 1e-12);
}

TEST(Biconjugate, ZeroFunction) {
  Objective f(GeneralizedQuadratic::zero(1));
  EXPECT_EQ(biconjugate_at(f, Family::affine(1), V({3.3})).value, 0.0);
}

TEST(Biconjugate, ConcaveParabolaAffineFamilyIsMinusInfinity) {
  Objective g(kConcave);
  auto r = biconjugate_at(g, Family::affine(1), V({0}));
  EXPECT_EQ(r.value, -kInf);
  EXPECT_TRUE(r.grid_truncated);
  EXPECT_EQ(biconjugate_closed_form(kConcave, Family::affine(1), V({0})).value, -kInf);
}

TEST(PhiConvexAt, Cases) {
  EXPECT_TRUE(is_phi_convex_at(Objective(kShiftedSquare), Family::affine(1), V({0.7}), 1e-9));
  EXPECT_FALSE(is_phi_convex_at(Objective(kConcave), Family::affine(1), V({1}), 1e-6));
  EXPECT_TRUE(is_phi_convex_at(Objective(kConcave), Family::nonpositive_quadratic(1), V({1}), 1e-9));
  EXPECT_TRUE(is_phi_convex_at_grid(Objective(kConcave), Family::nonpositive_quadratic(1), V({1}), 1e-9));
  EXPECT_FALSE(is_phi_convex_at_grid(Objective(kConcave), Family::affine(1), V({1}), 1e-6));
}

TEST(EpsSubdiff, FourSquareAffineBall) {
  Objective g(kFourSquare);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-2, 2);
  for (int i = 0; i < 200; ++i) {
    const double x0 = U(rng), c = 4 * U(rng), eps = std::abs(U(rng)) * 0.5;
    const double lhs = std::pow(2 * x0 - c / 4, 2);
    if (std::abs(lhs - eps) < 1e-7) continue;
    EXPECT_EQ(eps_subdiff_contains(g, iso1(0, c), V({x0}), eps), lhs <= eps);
  }
}

TEST(EpsSubdiff, ShiftedSquareQuadraticBall) {
  Objective f(kShiftedSquare);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(-2, 2);
  for (int i = 0; i < 200; ++i) {
    const double a = std::abs(U(rng)), b = 2 * U(rng), x0 = U(rng), eps = std::abs(U(rng));
    const double lhs = (a + 1) * std::pow(x0 - (b - 2) / (2 * (a + 1)), 2);
    if (std::abs(lhs - eps) < 1e-7) continue;
    EXPECT_EQ(eps_subdiff_contains(f, iso1(-a, b), V({x0}), eps), lhs <= eps);
  }
}

TEST(EpsSubdiff, ExactTangentAtZeroEpsilon) {
  Objective f(kShiftedSquare);
  const double x = 0.3;
  EXPECT_TRUE(eps_subdiff_contains(f, iso1(0, 2 * x + 2), V({x}), 0.0));
}

TEST(EpsSubdiff, Errors) {
  Objective f(GeneralizedQuadratic::zero(1), Box(V({0}), V({1})));
  EXPECT_THROW(eps_subdiff_contains(f, iso1(0, 0), V({2}), 0.1), std::invalid_argument);
  EXPECT_THROW(eps_subdiff_contains(f, iso1(0, 0), V({0.5}), -0.1), std::invalid_argument);
}

TEST(EpsSubdiff, GridEngineOnBlackBox) {
  Objective f(1, [](const Vector& x) { return std::abs(x(0)); }, Box(V({-10}), V({10})));
  EXPECT_TRUE(eps_subdiff_contains(f, iso1(0, 0.5), V({0}), 1e-9));
  EXPECT_FALSE(eps_subdiff_contains(f, iso1(0, 0.5), V({1}), 0.1));
}

TEST(DomProbe, ConvexQuadraticKeepsAllSlopes) {
  Objective f(kShiftedSquare);
  std::vector<GeneralizedQuadratic> cands;
  std::vector<Vector> samples;
  for (double b = -2; b <= 2; b += 1) {
    cands.push_back(iso1(0, b));
    samples.push_back(V({(b - 2) / 2}));
  }
  auto kept = dom_conjugate_probe(f, Family::affine(1), {1.0, 0.1, 1e-3, 1e-6}, samples, cands);
  EXPECT_EQ(kept.size(), cands.size());
}

TEST(DomProbe, LinearGrowthDropsSteepSlopes) {
  Objective f(1, [](const Vector& x) { return std::abs(x(0)); }, Box(V({-10}), V({10})));
  std::vector<GeneralizedQuadratic> cands;
  for (double b = -2; b <= 2; b += 1) cands.push_back(iso1(0, b));
  std::vector<Vector> samples;
  for (double x = -2; x <= 2; x += 0.5) samples.push_back(V({x}));
  auto loose = dom_conjugate_probe(f, Family::affine(1), {1000.0}, samples, cands);
  auto tight = dom_conjugate_probe(f, Family::affine(1), {1000.0, 1.0, 1e-3}, samples, cands);
  EXPECT_EQ(loose.size(), 5u);
  ASSERT_EQ(tight.size(), 3u);
  for (const auto& q : tight) EXPECT_LE(std::abs(q.u()(0)), 1.0);
}

TEST(DomProbe, ZeroFunctionKeepsOnlyZeroSlope) {
  Objective f(GeneralizedQuadratic::zero(1));
  std::vector<GeneralizedQuadratic> cands = {iso1(0, 0), iso1(0, 0, 3.0), iso1(0, 0.5), iso1(0, -1)};
  std::vector<Vector> samples = {V({-1}), V({0}), V({1})};
  auto kept = dom_conjugate_probe(f, Family::affine(1), {1.0, 1e-6}, samples, cands);
  ASSERT_EQ(kept.size(), 2u);
  for (const auto& q : kept) EXPECT_EQ(q.u()(0), 0.0);
}

TEST(DomProbe, RejectsBadLadder) {
  Objective f(GeneralizedQuadratic::zero(1));
  EXPECT_THROW(dom_conjugate_probe(f, Family::affine(1), {}, {}, {}), std::invalid_argument);
  EXPECT_THROW(dom_conjugate_probe(f, Family::affine(1), {0.1, 1.0}, {}, {}), std::invalid_argument);
}
