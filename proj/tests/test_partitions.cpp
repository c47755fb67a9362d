#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lil/partitions.hpp"

using namespace lil;

TEST(GeometricPartition, FirstValues) {
  const auto two = Partition::geometric(2);
  const std::vector<std::int64_t> want2{1, 3, 7, 15, 31};
  for (std::size_t k = 0; k < want2.size(); ++k) EXPECT_EQ(two.prefix()[k], want2[k]);
  const auto three = Partition::geometric(3);
  const std::vector<std::int64_t> want3{1, 7, 25, 79};
  for (std::size_t k = 0; k < want3.size(); ++k) EXPECT_EQ(three.prefix()[k], want3[k]);
}

TEST(GeometricPartition, ClosedFormBeyondPrefix) {
  for (int d = 2; d <= 6; ++d) {
    const auto p = Partition::geometric(d, 4);
    EXPECT_EQ(p.prefix()[1] - p.prefix()[0], static_cast<std::int64_t>(d * d - d));
    for (double k = 1; k <= 20; k += 1.0) {
      const double exact = std::pow(d, k) - d + 1.0;
      EXPECT_NEAR(p.log_A(k), std::log(exact), 1e-12) << "d=" << d << " k=" << k;
    }
  }
  EXPECT_THROW(Partition::geometric(1), std::invalid_argument);
}

TEST(GeometricPartition, LogLogForHugeIndices) {
  const auto p = Partition::geometric(3);
  // log A(k) ~ k log 3 for large k, so log log A ~ log k + log log 3.
  EXPECT_NEAR(p.log_log_A_at(1000.0), 1000.0 + std::log(std::log(3.0)), 1e-9);
  EXPECT_NEAR(p.log_log_A_at(5.0), std::log(p.log_A(std::exp(5.0))), 1e-12);
}

TEST(ExplicitPartition, ValidatesGaps) {
  EXPECT_THROW(Partition::explicit_prefix({1, 2}), std::invalid_argument);
  EXPECT_THROW(Partition::explicit_prefix({2, 5}), std::invalid_argument);
  const auto p = Partition::explicit_prefix({1, 4, 10}, 3);
  EXPECT_NEAR(p.A(4.0), 3.0 * 10.0 + 4.0, 1e-9);
}

TEST(ClassY, DoublingPartitionRatioIsTwo) {
  const auto p = Partition::geometric(2);
  for (double k = 1; k < 40; k += 1.0) EXPECT_NEAR(p.block_ratio(k), 2.0, 1e-12);
  EXPECT_TRUE(class_Y_check(p, 1.4).member());
  const auto bad = class_Y_check(p, 1.5);
  EXPECT_EQ(bad.verdict, YClassCheck::Verdict::violated);
  EXPECT_EQ(*bad.violated_at, 1.0);
}

TEST(ClassY, RatioFourAtWidthTwo) {
  const auto p = Partition::geometric(4);
  for (double k = 1; k < 30; k += 1.0) EXPECT_GE(p.block_ratio(k), 4.0);
  const auto y = class_Y_check(p, 2.0);
  EXPECT_TRUE(y.member());
  EXPECT_DOUBLE_EQ(y.inf_ratio, 4.0);
}

TEST(ClassY, GeneratorsAreInconclusiveUnlessViolated) {
  const auto g = Partition::from_generator([](double k) { return std::pow(5.0, k - 1.0); });
  EXPECT_EQ(class_Y_check(g, 2.0).verdict, YClassCheck::Verdict::inconclusive);
  EXPECT_EQ(class_Y_check(g, 2.3).verdict, YClassCheck::Verdict::violated);
  EXPECT_THROW(class_Y_check(g, 1.0), std::invalid_argument);
}

TEST(Norming, StartsAtOne) {
  for (double r : {0.5, 1.0, 2.0}) EXPECT_DOUBLE_EQ(NormingSequence::iterated_log(r)(1), 1.0);
  EXPECT_THROW(NormingSequence::iterated_log(0.4), std::invalid_argument);
}

TEST(Norming, ReachesTwoNearExpESquared) {
  const auto n = static_cast<std::int64_t>(std::ceil(std::exp(std::exp(2.0))) - std::ceil(kEulerPowE) + 1.0);
  EXPECT_NEAR(NormingSequence::iterated_log(1.0)(n), 2.0, 1e-3);
}

TEST(Norming, PowerRelation) {
  const double v1 = NormingSequence::iterated_log(1.0)(1'000'000);
  EXPECT_NEAR(NormingSequence::iterated_log(0.5)(1'000'000), std::sqrt(v1), 1e-14);
}

TEST(Norming, LogDomainAgreesAndIncreases) {
  const auto v = NormingSequence::iterated_log(1.0);
  for (std::int64_t n : {2, 10, 1000, 123456789})
    EXPECT_NEAR(v.at_log(std::log(static_cast<double>(n))), v(n), 1e-12);
  double prev = 0.0;
  for (std::int64_t n = 1; n < 100000; n = n * 3 + 1) {
    EXPECT_GT(v(n), prev);
    prev = v(n);
  }
  EXPECT_NEAR(v.at_log_log(800.0), 800.0, 1e-12);
}

TEST(Norming, CustomNeedsUnitStart) {
  EXPECT_THROW(NormingSequence::custom([](double n) { return n + 1.0; }), std::invalid_argument);
  EXPECT_DOUBLE_EQ(NormingSequence::custom([](double n) { return std::sqrt(n); })(9), 3.0);
}

TEST(FamilyWidth, BothRules) {
  const auto p = Partition::geometric(3);
  const double lo = family_width(p, WidthRule::largest_admissible);
  EXPECT_NEAR(lo, std::sqrt(3.0), 1e-8);
  EXPECT_LT(lo, std::sqrt(3.0));
  EXPECT_TRUE(class_Y_check(p, lo).member());
  // sup ratio is the first one: (A(2) - 1) / A(1) = 6.
  EXPECT_NEAR(family_width(p), std::sqrt(6.0), 1e-12);
  EXPECT_TRUE(block_cover_check(p, family_width(p)).member());
  EXPECT_EQ(*block_cover_check(p, lo).violated_at, 1.0);
}

TEST(BlockCover, DoublingAndGenerators) {
  const auto p = Partition::geometric(2);
  EXPECT_TRUE(block_cover_check(p, std::sqrt(2.0)).member());
  EXPECT_TRUE(block_cover_check(p, 3.0).member());
  EXPECT_EQ(block_cover_check(p, 1.4).verdict, YClassCheck::Verdict::violated);
  const auto g = Partition::from_generator([](double k) { return std::pow(5.0, k - 1.0); });
  EXPECT_EQ(block_cover_check(g, 2.3).verdict, YClassCheck::Verdict::inconclusive);
  EXPECT_EQ(block_cover_check(g, 2.0).verdict, YClassCheck::Verdict::violated);
}
