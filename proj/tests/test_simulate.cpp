#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lil/lil_bounds.hpp"
#include "lil/simulate.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace lil;
using lil::testing::rel_err;

namespace {

FieldSpec scalar_rademacher() {
  FieldSpec s;
  s.family = Family::rademacher;
  s.axes = {GridMeasureSpace::counting(1)};
  s.norm = NormSpec::lp(2.0);
  return s;
}

FieldSpec grid_spec(Family f, double param = 1.0) {
  FieldSpec s;
  s.family = f;
  s.param = param;
  s.axes = {GridMeasureSpace::uniform_probability(2), GridMeasureSpace::uniform_probability(2)};
  s.norm = NormSpec::lp(2.0);
  return s;
}

/// Binomial upper tail P(Bin(n, q) <= k) for the Clopper-Pearson oracle.
double binom_cdf(std::size_t k, std::size_t n, double q) {
  double s = 0.0;
  for (std::size_t j = 0; j <= k; ++j)
    s += std::exp(std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) + j * std::log(q) +
                  (n - j) * std::log1p(-q));
  return s;
}

}  // namespace

TEST(Simulate, ZeroFieldStaysAtZero) {
  auto s = grid_spec(Family::gaussian);
  s.scale = {0.0, 0.0, 0.0, 0.0};
  const auto e = simulate(s, 50, 100, 7);
  for (double v : e.sup_values) EXPECT_EQ(v, 0.0);
}

TEST(Simulate, ScalarRademacherMatchesExactLaw) {
  const auto exact = lil::testing::rademacher_sup_paths({1.0}, {1.0}, 2.0, 0.5, 3, true);
  const std::size_t trials = 100'000;
  const auto e = simulate(scalar_rademacher(), 3, trials, 2024, 0.5);
  std::vector<double> atoms = exact;
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  ASSERT_GE(atoms.size(), 2u);
  const auto emp = empirical_Q(e, {atoms.begin(), atoms.end()});
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    // Compare P(sup >= atom) through the tail just below the atom.
    const double u = atoms[i] * (1.0 - 1e-12);
    const double P = lil::testing::tail_probability(exact, u);
    const auto q = empirical_Q(e, {u}).q_hat.front();
    const double se = std::sqrt(P * (1.0 - P) / trials);
    EXPECT_LE(std::abs(q - P), 3.0 * se + 1e-12) << "atom " << atoms[i];
  }
}

TEST(Simulate, FasterNormingDominatedPathwise) {
  const auto s = grid_spec(Family::uniform);
  const auto obs = simulate_observers(s, {{s.norm, 0.5}, {s.norm, 1.0}}, 200, 500, 3);
  for (std::size_t i = 0; i < 500; ++i) EXPECT_LE(obs[1].sup_values[i], obs[0].sup_values[i]);
  // Each observer equals a single-observer run.
  EXPECT_EQ(obs[1].sup_values, simulate(s, 200, 500, 3, 1.0).sup_values);
}

TEST(Simulate, DeterministicAcrossThreadsAndSeedSensitive) {
  const auto s = grid_spec(Family::weibull, 1.0);
  const auto a = simulate(s, 300, 1000, 99, 1.0, 1);
  const auto b = simulate(s, 300, 1000, 99, 1.0, 4);
  const auto c = simulate(s, 300, 1000, 100, 1.0, 1);
  EXPECT_EQ(a.sup_values, b.sup_values);
  EXPECT_NE(a.sup_values, c.sup_values);
}

TEST(Simulate, MartingaleWithZeroLambdaIsIid) {
  auto s = grid_spec(Family::gaussian);
  const auto iid = simulate(s, 100, 200, 5, 1.0);
  s.dependence = Dependence::martingale;
  s.lambda = 0.0;
  EXPECT_EQ(simulate(s, 100, 200, 5, 1.0).sup_values, iid.sup_values);
  s.lambda = 0.9;
  const auto m = simulate(s, 100, 200, 5, 1.0);
  for (std::size_t i = 0; i < 200; ++i) EXPECT_TRUE(std::isfinite(m.sup_values[i]));
  s.lambda = 1.0;
  EXPECT_THROW(simulate(s, 10, 10, 5), std::invalid_argument);
}

TEST(Simulate, NormValidation) {
  auto s = grid_spec(Family::rademacher);
  s.norm = NormSpec::mixed({2.0});
  EXPECT_THROW(simulate(s, 10, 10, 1), dimension_mismatch);
  s.norm = NormSpec::lp(0.5);
  EXPECT_THROW(simulate(s, 10, 10, 1), invalid_exponent);
  s.norm = NormSpec::lp(2.0);
  EXPECT_THROW(simulate(s, 10, 10, 1, 0.4), std::invalid_argument);
}

TEST(Simulate, HorizonDoublingOnlyIncreasesSup) {
  const auto d = horizon_doubling(grid_spec(Family::rademacher), 100, 300, 8, 1.0);
  EXPECT_GE(d.mean_increment, 0.0);
  EXPECT_GE(d.fraction_changed, 0.0);
  EXPECT_LE(d.fraction_changed, 1.0);
}

TEST(FamilyMoments, ClosedForms) {
  EXPECT_EQ(family_moment(Family::rademacher, 1.0, 7.0), 1.0);
  EXPECT_NEAR(family_moment(Family::uniform, 2.0, 2.0), 2.0 / std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(family_moment(Family::gaussian, 1.5, 2.0), 1.5, 1e-14);
  EXPECT_NEAR(family_moment(Family::gaussian, 1.0, 4.0), std::pow(3.0, 0.25), 1e-14);
  EXPECT_NEAR(family_moment(Family::weibull, 1.0, 3.0), std::cbrt(6.0), 1e-13);
  EXPECT_NEAR(family_moment(Family::weibull, 2.0, 4.0), std::pow(2.0, 0.25), 1e-13);
}

TEST(FamilyMoments, SampleMomentsAgree) {
  for (auto f : {Family::uniform, Family::gaussian, Family::weibull}) {
    double m2 = 0.0;
    const int n = 200'000;
    CounterRng rng(17, 0);
    for (int i = 0; i < n; ++i) {
      const double x = draw_unit(f, 1.0, rng);
      m2 += x * x / n;
    }
    EXPECT_NEAR(std::sqrt(m2), family_moment(f, 1.0, 2.0), 0.01);
  }
}

TEST(EmpiricalQ, Extremes) {
  TrajectoryEnsemble e;
  e.sup_values = {0.5, 1.0, 2.0, 2.0};
  const auto c = empirical_Q(e, {0.1, 5.0});
  EXPECT_EQ(c.q_hat[0], 1.0);
  EXPECT_EQ(c.q_hat[1], 0.0);
  EXPECT_NEAR(c.cp_upper[1], 1.0 - std::pow(0.01, 1.0 / 4.0), 1e-12);
}

TEST(EmpiricalQ, ThreeAtoms) {
  TrajectoryEnsemble e;
  e.sup_values = {1.0, 1.0, 1.0, 2.0, 2.0, 3.0};
  const auto c = empirical_Q(e, {1.0, 2.0, 3.0});
  EXPECT_DOUBLE_EQ(c.q_hat[0], 3.0 / 6.0);
  EXPECT_DOUBLE_EQ(c.q_hat[1], 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(c.q_hat[2], 0.0);
}

TEST(ClopperPearson, SolvesTheBinomialEquation) {
  for (std::size_t n : {10u, 100u, 1000u})
    for (std::size_t k : {0u, 1u, 5u}) {
      const double q = clopper_pearson_upper(k, n);
      EXPECT_NEAR(binom_cdf(k, n, q), 0.01, 1e-9);
    }
  EXPECT_EQ(clopper_pearson_upper(5, 5), 1.0);
}

TEST(Dominance, TrivialCases) {
  EmpiricalCurve emp{{3.0, 4.0}, {0.5, 0.0}, {0.6, 0.0005}, 10000};
  EXPECT_TRUE(dominance_report(emp, {3.0, 4.0}, {1.0, 1.0}).all_pass());
  EXPECT_TRUE(dominance_report(emp, {3.0, 4.0}, {1.0, 0.001}).all_pass());
  const auto bad = dominance_report(emp, {3.0, 4.0}, {0.5, 0.001});
  EXPECT_EQ(bad.failures, 1u);
  // Zero exceedances with the bound under the zero-count limit: unresolved.
  const auto fine = dominance_report(emp, {3.0, 4.0}, {1.0, 1e-5});
  EXPECT_TRUE(fine.all_pass());
  EXPECT_EQ(fine.unresolved, 1u);
  EXPECT_TRUE(fine.rows[1].unresolved);
  // A positive count above the bound still fails.
  EmpiricalCurve hit{{3.0}, {0.0002}, {0.0009}, 10000};
  EXPECT_EQ(dominance_report(hit, {3.0}, {1e-5}).failures, 1u);
  EXPECT_THROW(dominance_report(emp, {3.0, 5.0}, {1.0, 1.0}), std::invalid_argument);
}

TEST(Dominance, RademacherFieldEndToEnd) {
  auto s = grid_spec(Family::rademacher);
  const auto env = envelope_from_spec(s);
  const auto v = NormingSequence::iterated_log(1.0);
  const auto u = log_grid(std::numbers::e, 20.0, 20);
  const auto bound = bound_curve(u, [&](double x) { return optimize_bound(env, v, x); }, Theorem::lebesgue, 1.0);
  const auto emp = empirical_Q(simulate(s, 2000, 20'000, 11, 1.0), u);
  EXPECT_TRUE(dominance_report(emp, bound).all_pass());
}

TEST(EnvelopeFromSpec, RademacherOnProbabilityGrid) {
  const auto env = envelope_from_spec(grid_spec(Family::rademacher));
  for (double L : {2.0, 5.0, 40.0}) EXPECT_LT(rel_err(env(L), 2.0 * rosenthal_upper(L)), 1e-14);
  auto m = grid_spec(Family::weibull, 1.0);
  m.norm = NormSpec::mixed({2.0, 4.0});
  m.scale = {1.0, 2.0, 0.5, 1.0};
  const auto e2 = envelope_from_spec(m);
  GridFunction amp(m.axes, m.scale);
  for (double L : {4.0, 9.0})
    EXPECT_LT(rel_err(e2(L), 2.0 * rosenthal_upper(L) * std::exp(std::lgamma(1.0 + L) / L) *
                                  lil::testing::mixed_norm_oracle(amp, {2.0, 4.0})),
              1e-12);
  EXPECT_EQ(e2.exponents().size(), 2u);
}
