#include <gtest/gtest.h>

#include "property_cases.hpp"

using namespace abconv;

namespace {

template <class Check>
void run_cases(std::uint64_t seed, int count, Check check) {
  cases::Rng rng(seed);
  for (int k = 0; k < count; ++k) {
    const std::string err = check(rng, k);
    ASSERT_TRUE(err.empty()) << "case " << k << ": " << err;
  }
}

}  // namespace

TEST(Properties, FenchelYoung) { run_cases(1, 500, cases::fenchel_young); }

TEST(Properties, BiconjugateMinorizes) { run_cases(2, 200, cases::biconjugate_minorizes); }

TEST(Properties, EpsSubdifferentialNests) {
  int members = 0;
  run_cases(3, 300, [&](cases::Rng& rng, int k) { return cases::eps_nesting(rng, k, &members); });
  EXPECT_GT(members, 0);
  EXPECT_LT(members, 300);
}

TEST(Properties, LagrangianConcaveInPsi) {
  int finite = 0;
  run_cases(4, 100, [&](cases::Rng& rng, int k) { return cases::lagrangian_concave(rng, k, &finite); });
  EXPECT_GE(finite, 20);
}

TEST(Properties, WeakDualityOnRandomInstances) {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const std::string err = cases::weak_duality(seed);
    EXPECT_TRUE(err.empty()) << "seed " << seed << ": " << err;
  }
}

TEST(Properties, ClosedFormMatchesGrid) { run_cases(5, 30, cases::oracle_equivalence); }

TEST(Properties, IntersectionExactMatchesBruteForce) {
  run_cases(6, 24, [](cases::Rng& r, int k) { return cases::intersection_agrees(r, k); });
}
