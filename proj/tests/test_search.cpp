#include <gtest/gtest.h>

#include "abconv/search.hpp"

using namespace abconv;

namespace {
Vector V(std::initializer_list<double> xs) {
  Vector v(xs.size());
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}
}  // namespace

TEST(GridSpecTest, Validation) {
  EXPECT_THROW(GridSpec(Box::cube(1, -1, 1), 2, 0), std::invalid_argument);
  EXPECT_THROW(GridSpec(Box::cube(1, 1, 1), 5, 0), std::invalid_argument);
  EXPECT_THROW(GridSpec(Box::cube(1, -kInf, 1), 5, 0), std::invalid_argument);
  EXPECT_THROW(GridSpec(Box::cube(1, -1, 1), 5, -1), std::invalid_argument);
}

TEST(GridMaximize, RefinementFindsOffGridPeak) {
  auto fn = [](const Vector& x) { return -(x(0) - 0.123456) * (x(0) - 0.123456); };
  auto r = grid_maximize(fn, GridSpec(Box::cube(1, -10, 10), 201, 4));
  EXPECT_NEAR(r.argmax(0), 0.123456, 1e-5);
  EXPECT_FALSE(r.on_boundary);
}

TEST(GridMaximize, BoundaryFlag) {
  auto r = grid_maximize([](const Vector& x) { return x(0); }, GridSpec(Box::cube(1, -1, 2), 11, 2));
  EXPECT_EQ(r.value, 2.0);
  EXPECT_TRUE(r.on_boundary);
}

TEST(GridMaximize, FirstIndexWinsTies) {
  auto r = grid_maximize([](const Vector&) { return 1.0; }, GridSpec(Box::cube(2, -1, 1), 5, 1));
  EXPECT_EQ(r.argmax(0), -1.0);
  EXPECT_EQ(r.argmax(1), -1.0);
}

TEST(GridMaximize, SeedsWinTies) {
  auto r = grid_maximize([](const Vector&) { return 1.0; }, GridSpec(Box::cube(1, -1, 1), 5, 1), {},
                         {V({0.3})});
  EXPECT_EQ(r.argmax(0), 0.3);
}

TEST(GridMaximize, AllExcludedIsMinusInfinity) {
  auto r = grid_maximize([](const Vector&) { return -kInf; }, GridSpec(Box::cube(1, -1, 1), 5, 1));
  EXPECT_EQ(r.value, -kInf);
  EXPECT_EQ(r.argmax.size(), 0);
}

TEST(GridMaximize, DeterministicAcrossRuns) {
  auto fn = [](const Vector& x) { return std::sin(3 * x(0)) * std::cos(2 * x(1)) + 0.01 * x(0); };
  GridSpec g(Box::cube(2, -3, 3), 151, 2);
  auto a = grid_maximize(fn, g);
  auto b = grid_maximize(fn, g);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.argmax, b.argmax);
}

TEST(GridMinimize, Parabola) {
  auto r = grid_minimize([](const Vector& x) { return x(0) * x(0) - x(0) - 9; },
                         GridSpec(Box::cube(1, -10, 10), 201, 2));
  EXPECT_NEAR(r.value, -9.25, 1e-12);
}

TEST(FamilyMaximize, ZeroEvaluatedFirst) {
  Family F = Family::affine(1);
  int calls = 0;
  bool first_was_zero = false;
  auto r = family_maximize(F, ParameterSearch{}, [&](const GeneralizedQuadratic& q) {
    if (calls++ == 0) first_was_zero = q.is_zero(0.0);
    return 0.0;
  });
  EXPECT_TRUE(first_was_zero);
  EXPECT_TRUE(r.member->is_zero(0.0));
}

TEST(FamilyMaximize, FindsSlopeAndCurvature) {
  Family F = Family::nonpositive_quadratic(1);
  auto r = family_maximize(F, ParameterSearch{}, [](const GeneralizedQuadratic& q) {
    return -std::pow(q.A()(0, 0) + 1.37, 2) - std::pow(q.u()(0) - 2.5, 2);
  });
  EXPECT_NEAR(r.member->A()(0, 0), -1.37, 1e-4);
  EXPECT_NEAR(r.member->u()(0), 2.5, 1e-4);
  EXPECT_FALSE(r.on_boundary);
}

TEST(FamilyMaximize, NaturalCurvatureEdgeIsNotTruncation) {
  Family F = Family::nonpositive_quadratic(1);
  auto r = family_maximize(F, ParameterSearch{}, [](const GeneralizedQuadratic& q) {
    return q.A()(0, 0) - std::pow(q.u()(0) - 1, 2);
  });
  EXPECT_EQ(r.member->A()(0, 0), 0.0);
  EXPECT_FALSE(r.on_boundary);
}
