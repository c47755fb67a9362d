#include <gtest/gtest.h>

#include <random>

#include "lil/grid_spaces.hpp"
#include "test_util.hpp"

using namespace lil;
using lil::testing::mixed_norm_oracle;
using lil::testing::rel_err;

TEST(GridMeasureSpace, RejectsNegativeAndEmptyWeights) {
  EXPECT_THROW(GridMeasureSpace(std::vector<double>{1.0, -0.5}), std::invalid_argument);
  EXPECT_THROW(GridMeasureSpace(std::vector<double>{}), std::invalid_argument);
  EXPECT_TRUE(GridMeasureSpace::uniform_probability(7).is_probability());
  EXPECT_FALSE(GridMeasureSpace::counting(2).is_probability());
}

TEST(ExponentVector, RejectsExponentsBelowOne) {
  EXPECT_THROW(ExponentVector({2.0, 0.5}), invalid_exponent);
  EXPECT_NO_THROW(ExponentVector({1.0, 6.0}));
}

TEST(LpNorm, ConstantOnUnitMass) {
  GridFunction f(GridMeasureSpace::uniform_probability(5), std::vector<double>(5, -2.5));
  for (double p : {1.0, 2.0, 3.7, 10.0}) EXPECT_NEAR(lp_norm(f, p), 2.5, 1e-14);
}

TEST(LpNorm, ThreeFourFive) {
  GridFunction f(GridMeasureSpace::counting(2), {3.0, 4.0});
  EXPECT_DOUBLE_EQ(lp_norm(f, 2.0), 5.0);
}

TEST(LpNorm, MatchesWeightedSum) {
  std::mt19937_64 rng(11);
  const auto f = lil::testing::random_function(rng, {10});
  double s = 0.0;
  for (std::size_t i = 0; i < 10; ++i) s += f.axis(0).weight(i) * std::pow(std::abs(f[i]), 3.0);
  EXPECT_LT(rel_err(lp_norm(f, 3.0), std::cbrt(s)), 1e-12);
}

TEST(MixedNorm, FactorizesOverProducts) {
  std::mt19937_64 rng(12);
  const auto g1 = lil::testing::random_function(rng, {5});
  const auto g2 = lil::testing::random_function(rng, {7});
  const auto f = tensor_product(g1, g2);
  EXPECT_LT(rel_err(mixed_norm(f, ExponentVector({1.5, 4.0})), lp_norm(g1, 1.5) * lp_norm(g2, 4.0)), 1e-12);
}

TEST(MixedNorm, EqualExponentsGiveFlatNorm) {
  std::mt19937_64 rng(13);
  const auto f = lil::testing::random_function(rng, {4, 6, 3});
  EXPECT_LT(rel_err(mixed_norm(f, ExponentVector({2.5, 2.5, 2.5})), lp_norm(flatten(f), 2.5)), 1e-12);
}

TEST(MixedNorm, AxisOrderMatters) {
  GridFunction f({GridMeasureSpace::counting(2), GridMeasureSpace::counting(2)}, {1.0, 1.0, 1.0, 0.0});
  EXPECT_NEAR(mixed_norm(f, ExponentVector({1.0, 2.0})), std::sqrt(5.0), 1e-14);
  EXPECT_NEAR(mixed_norm(f, ExponentVector({2.0, 1.0})), std::sqrt(2.0) + 1.0, 1e-14);
}

TEST(MixedNorm, MatchesRecursiveOracle) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = lil::testing::random_function(rng, {3, 4, 2});
    const std::vector<double> p{1.0 + trial * 0.2, 3.0, 1.5};
    EXPECT_LT(rel_err(mixed_norm(f, ExponentVector(p)), mixed_norm_oracle(f, p)), 1e-12);
  }
}

TEST(MixedNorm, ExplicitOrderPermutesAxes) {
  std::mt19937_64 rng(15);
  const auto f = lil::testing::random_function(rng, {3, 5});
  const std::vector<std::size_t> order{1, 0};
  const auto g = permute_axes(f, order);
  EXPECT_EQ(g.extent(0), 5u);
  EXPECT_DOUBLE_EQ(g.at({4, 2}), f.at({2, 4}));
  EXPECT_LT(rel_err(mixed_norm(f, ExponentVector({2.0, 3.0}), order), mixed_norm_oracle(g, {2.0, 3.0})), 1e-12);
}

TEST(MixedNorm, DimensionMismatchThrows) {
  std::mt19937_64 rng(16);
  const auto f = lil::testing::random_function(rng, {3, 5});
  EXPECT_THROW(mixed_norm(f, ExponentVector({2.0})), dimension_mismatch);
  EXPECT_THROW(GridFunction(GridMeasureSpace::counting(3), {1.0, 2.0}), dimension_mismatch);
}

TEST(MinkowskiSlack, ZeroForFactorizedFields) {
  std::mt19937_64 rng(17);
  const auto g = lil::testing::random_function(rng, {4});
  GridFunction h(GridMeasureSpace::uniform_probability(6), lil::testing::random_values(rng, 6));
  const auto f = tensor_product(g, h);
  EXPECT_NEAR(minkowski_slack(f, 2.0, 3.0), 0.0, 1e-12 * mixed_norm_oracle(f, {2.0, 6.0}));
}

TEST(MinkowskiSlack, ZeroWhenMIsOne) {
  std::mt19937_64 rng(18);
  const auto f = lil::testing::random_function(rng, {4, 5}, true);
  EXPECT_NEAR(minkowski_slack(f, 2.7, 1.0), 0.0, 1e-12);
}

TEST(MinkowskiSlack, NonNegativeOnRandomGrids) {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 100; ++i) {
    const auto f = lil::testing::random_function(rng, {4, 4}, true);
    EXPECT_GE(minkowski_slack(f, 2.0, 2.0), -kSlackAbsTol);
  }
}

TEST(MinkowskiSlack, RequiresProbabilityOnLastAxis) {
  std::mt19937_64 rng(20);
  const auto f = lil::testing::random_function(rng, {3, 3});
  EXPECT_THROW(minkowski_slack(f, 2.0, 2.0), std::invalid_argument);
  const auto g = lil::testing::random_function(rng, {3, 3}, true);
  EXPECT_THROW(minkowski_slack(g, 0.5, 2.0), invalid_exponent);
}

TEST(PermutationSlack, ZeroForFactorizedFields) {
  std::mt19937_64 rng(21);
  const auto f = tensor_product(tensor_product(lil::testing::random_function(rng, {3}),
                                               lil::testing::random_function(rng, {3})),
                                lil::testing::random_function(rng, {4}));
  EXPECT_NEAR(permutation_slack(f, ExponentVector({1.0, 2.0}), 3.0), 0.0, 1e-12 * mixed_norm_oracle(f, {1, 2, 3}));
}

TEST(PermutationSlack, ZeroWhenAllExponentsEqual) {
  std::mt19937_64 rng(22);
  const auto f = lil::testing::random_function(rng, {3, 3, 4});
  EXPECT_NEAR(permutation_slack(f, ExponentVector({2.0, 2.0}), 2.0), 0.0, 1e-12 * mixed_norm_oracle(f, {2, 2, 2}));
}

TEST(PermutationSlack, NonNegativeOnRandomGrids) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 50; ++i) {
    const auto f = lil::testing::random_function(rng, {3, 3, 4});
    EXPECT_GE(permutation_slack(f, ExponentVector({1.0, 2.0}), 3.0), -kSlackAbsTol);
  }
}

TEST(PermutationSlack, RequiresOuterExponentAtLeastMax) {
  std::mt19937_64 rng(24);
  const auto f = lil::testing::random_function(rng, {3, 3, 4});
  EXPECT_THROW(permutation_slack(f, ExponentVector({1.0, 4.0}), 3.0), precondition_error);
}
