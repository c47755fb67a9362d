#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lil/entropy_ct.hpp"
#include "lil/lil_bounds.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace lil;
using lil::testing::rel_err;

namespace {

IndexedField random_field(std::mt19937_64& rng, std::size_t nx, std::size_t nt, std::size_t nw) {
  auto X = lil::testing::random_space(rng, nx);
  std::vector<std::vector<double>> T;
  for (std::size_t t = 0; t < nt; ++t) T.push_back({static_cast<double>(t) / static_cast<double>(nt)});
  auto v = lil::testing::random_values(rng, nx * nt * nw, -1.0, 1.0);
  for (std::size_t i = 0; i < nx * nt; ++i) {
    double m = 0.0;
    for (std::size_t w = 0; w < nw; ++w) m += v[w * nx * nt + i] / static_cast<double>(nw);
    for (std::size_t w = 0; w < nw; ++w) v[w * nx * nt + i] -= m;
  }
  return IndexedField(X, T, GridMeasureSpace::uniform_probability(nw), v);
}

/// Same values at every t.
IndexedField constant_in_t(std::mt19937_64& rng, std::size_t nx, std::size_t nt) {
  const auto base = random_field(rng, nx, 1, 2);
  std::vector<double> v(nx * nt * 2);
  for (std::size_t w = 0; w < 2; ++w)
    for (std::size_t t = 0; t < nt; ++t)
      for (std::size_t x = 0; x < nx; ++x) v[x + nx * (t + nt * w)] = base.at(x, 0, w);
  std::vector<std::vector<double>> T;
  for (std::size_t t = 0; t < nt; ++t) T.push_back({static_cast<double>(t)});
  return IndexedField(base.X(), T, base.omega(), v);
}

}  // namespace

TEST(IndexedField, Validation) {
  const auto om = GridMeasureSpace::uniform_probability(2);
  EXPECT_THROW(IndexedField(GridMeasureSpace::counting(1), {{0.0}}, om, {1.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(IndexedField(GridMeasureSpace::counting(1), {{0.0}}, om, {1.0}), dimension_mismatch);
  EXPECT_THROW(IndexedField(GridMeasureSpace::counting(1), {{0.0}}, GridMeasureSpace::counting(2), {1.0, -1.0}),
               std::invalid_argument);
}

TEST(MomentDistanceRho, ZeroOnDiagonalAndForConstantFields) {
  std::mt19937_64 rng(51);
  const auto f = random_field(rng, 3, 4, 5);
  for (double r : moment_distance_rho(f, 2, 2, 3.0)) EXPECT_EQ(r, 0.0);
  const auto c = constant_in_t(rng, 3, 3);
  for (double r : moment_distance_rho(c, 0, 2, 2.0)) EXPECT_EQ(r, 0.0);
}

TEST(MomentDistanceRho, MatchesEnumeration) {
  std::mt19937_64 rng(52);
  const auto f = random_field(rng, 3, 3, 6);
  const auto rho = moment_distance_rho(f, 0, 2, 2.0);
  for (std::size_t x = 0; x < 3; ++x) {
    double s = 0.0;
    for (std::size_t w = 0; w < 6; ++w) s += std::pow(f.at(x, 0, w) - f.at(x, 2, w), 2.0) / 6.0;
    EXPECT_LT(rel_err(rho[x], std::sqrt(s)), 1e-12);
  }
}

TEST(DistanceR, DiagonalSymmetryAndHomogeneity) {
  std::mt19937_64 rng(53);
  const auto f = random_field(rng, 3, 4, 4);
  const double p = 3.0, Z = 2.0;
  EXPECT_EQ(distance_r(f, 1, 1, p, Z), 0.0);
  const auto M = distance_matrix_r(f, p, Z);
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_EQ(M[t * 4 + t], 0.0);
    for (std::size_t s = 0; s < 4; ++s) EXPECT_EQ(M[t * 4 + s], M[s * 4 + t]);
  }
  const double c = 2.5;
  const auto g = f.scaled(c);
  EXPECT_LT(rel_err(distance_r(g, 0, 3, p, Z), std::pow(c, p) * distance_r(f, 0, 3, p, Z)), 1e-12);
  EXPECT_LT(rel_err(M[0 * 4 + 3], distance_r(f, 0, 3, p, Z)), 1e-12);
}

TEST(DistanceR, SingletonPairMatchesHandExpansion) {
  std::mt19937_64 rng(54);
  const auto f = random_field(rng, 2, 3, 4);
  const double p = 2.0, Z = 1.5;
  const std::vector<ConjugatePair> only{conjugate(2.0)};
  double J = 0.0;
  for (std::size_t x = 0; x < 2; ++x) {
    double w = 0.0;  // W_{2(p-1)Z}(x) = sup_t |xi(x,t)|_{2(p-1)Z}
    for (std::size_t t = 0; t < 3; ++t) {
      double m = 0.0;
      for (std::size_t o = 0; o < 4; ++o) m += std::pow(std::abs(f.at(x, t, o)), 2.0 * (p - 1.0) * Z) / 4.0;
      w = std::max(w, std::pow(m, 1.0 / (2.0 * (p - 1.0) * Z)));
    }
    double rho = 0.0;
    for (std::size_t o = 0; o < 4; ++o) rho += std::pow(std::abs(f.at(x, 0, o) - f.at(x, 1, o)), 2.0 * Z) / 4.0;
    J += f.X().weight(x) * std::pow(w, p - 1.0) * std::pow(rho, 1.0 / (2.0 * Z));
  }
  const double want = 2.0 * p * rosenthal_upper(2.0 * Z) * std::pow(rosenthal_upper(2.0 * (p - 1.0) * Z), p - 1.0) * J;
  EXPECT_LT(rel_err(distance_r(f, 0, 1, p, Z, only), want), 1e-12);
  EXPECT_LT(rel_err(chaining_J(f, 0, 1, p, Z, 2.0, 2.0), J), 1e-12);
}

TEST(DistanceR, GridErrors) {
  std::mt19937_64 rng(55);
  const auto f = random_field(rng, 2, 2, 2);
  EXPECT_THROW(distance_r(f, 0, 1, 2.0, 1.0, {}), std::invalid_argument);
  EXPECT_THROW(distance_r(f, 0, 1, 2.0, 1.0, {{1.5, 1.5}}), std::invalid_argument);
}

TEST(Covering, AnalyticAndEmpirical) {
  const auto a = CoveringFunction::analytic(2.0, 2, 0.5);
  EXPECT_DOUBLE_EQ(a(0.25), std::pow(2.0 * 16.0, 2.0));
  EXPECT_EQ(a(100.0), 1.0);
  EXPECT_EQ(CoveringFunction::single_point()(1e-9), 1.0);
  // Three points on a line at 0, 1, 3.
  const std::vector<double> d{0, 1, 3, 1, 0, 2, 3, 2, 0};
  const auto e = CoveringFunction::empirical(d, 3);
  EXPECT_EQ(e(3.0), 1.0);
  EXPECT_EQ(e(1.0), 2.0);
  EXPECT_EQ(e(0.5), 3.0);
  EXPECT_EQ(e.max_count(), 3.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double eps = 1e-3; eps < 10.0; eps *= 1.5) {
    EXPECT_LE(e(eps), prev);
    prev = e(eps);
  }
}

TEST(NuP, SinglePointClosedFormAtEveryTheta) {
  const double sb = 0.3, p = 2.0, Z = 2.0;
  const auto r = nu_p(sb, p, Z, CoveringFunction::single_point());
  const double sh = sigma_hat(sb, p, Z);
  EXPECT_LT(rel_err(sh, std::pow(rosenthal_upper(p * Z), p) * sb), 1e-14);
  for (const auto& row : r.table) EXPECT_LT(rel_err(row.nu_pow_p, sh / (1.0 - row.theta)), 1e-12);
  EXPECT_LT(rel_err(r.nu_pow_p, sh / 0.95), 1e-12);
  EXPECT_DOUBLE_EQ(r.theta_star, 0.05);
  EXPECT_FALSE(r.theta_restricted);
}

TEST(NuP, StepCoveringMatchesDirectSummation) {
  // N(eps) = 4 below 0.01, 2 below 0.1, 1 above.
  const auto N = CoveringFunction::custom([](double e) { return e < 0.01 ? 4.0 : (e < 0.1 ? 2.0 : 1.0); }, 4.0);
  NuOptions opt;
  opt.theta_grid = {0.2, 0.5, 0.8};
  const double sb = 0.05, p = 2.0, Z = 3.0;
  const auto r = nu_p(sb, p, Z, N, opt);
  const double sh = sigma_hat(sb, p, Z);
  ASSERT_LT(sh, 1.0);
  for (const auto& row : r.table) {
    double direct = 0.0;
    for (int k = 1; k <= 10000; ++k)
      direct += std::pow(row.theta, k - 1) * std::pow(N(std::pow(row.theta * sh, k)), 1.0 / Z);
    EXPECT_LT(rel_err(row.series, direct), 1e-12);
  }
}

TEST(NuP, ConstantInTMatchesSinglePoint) {
  std::mt19937_64 rng(56);
  const auto c = constant_in_t(rng, 3, 4);
  const double p = 2.0, Z = 1.5;
  const auto a = nu_p(c, p, Z);
  const auto b = nu_p(sigma_bar(c, p, Z), p, Z, CoveringFunction::single_point());
  EXPECT_LT(rel_err(a.nu, b.nu), 1e-12);
}

TEST(NuP, MonotoneInTheCovering) {
  const double sb = 0.01, p = 2.0, Z = 2.0;
  double prev = 0.0;
  for (double D : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    const double nu = nu_p(sb, p, Z, CoveringFunction::analytic(D, 1, 1.0)).nu;
    EXPECT_GE(nu, prev);
    prev = nu;
  }
}

TEST(NuP, DivergenceFlag) {
  // Growing radii with N > 1 everywhere cannot be summed.
  const auto N = CoveringFunction::custom([](double) { return 2.0; }, 2.0);
  NuOptions opt;
  opt.theta_grid = {0.5};
  const auto r = nu_p(10.0, 2.0, 1.0, N, opt);
  EXPECT_TRUE(r.theta_restricted);
  EXPECT_FALSE(r.divergent);
  const auto inf = nu_p(10.0, 2.0, 1.0, CoveringFunction::analytic(1.0, 10, 1.0), opt);
  EXPECT_TRUE(inf.divergent);
  EXPECT_TRUE(std::isinf(inf.nu));
}

TEST(NuP, DominatesEnumeratedMoments) {
  std::mt19937_64 rng(57);
  const auto f = random_field(rng, 2, 3, 2);
  for (double Z : {1.0, 2.0})
    for (int n = 1; n <= 4; ++n)
      EXPECT_LE(lil::testing::enumerated_cl_moment(f, 2.0, Z, n), nu_p(f, 2.0, Z).nu) << "Z=" << Z << " n=" << n;
}

TEST(Holder, SinglePointReducesToDegenerateCase) {
  HolderExample ex;
  ex.D = 0.0;
  const double Z = 3.0;
  const auto a = holder_nu(ex, Z);
  const auto b = nu_p(std::pow(Z, ex.b), ex.p, Z, CoveringFunction::single_point());
  EXPECT_LT(rel_err(a.nu, b.nu), 1e-14);
  EXPECT_THROW(holder_nu(ex, 2.0), std::invalid_argument);
}

TEST(Holder, DoublingDiameterIncreasesNu) {
  HolderExample ex;
  for (double Z : {2.5, 4.0, 10.0}) {
    double prev = 0.0;
    for (double D : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      ex.D = D;
      const double nu = holder_nu(ex, Z).nu;
      EXPECT_GE(nu, prev);
      prev = nu;
    }
  }
}

TEST(Holder, ThetaFiniteAndDecreasing) {
  const auto env = holder_example_envelope(HolderExample{});
  const auto v = NormingSequence::iterated_log(2.0);
  const auto u = log_grid(std::numbers::e, 100.0, 16);
  const auto c = bound_curve(u, [&](double x) { return optimize_bound(env, v, x, Theorem::continuous_lebesgue); },
                             Theorem::continuous_lebesgue, 2.0);
  std::size_t informative = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    EXPECT_FALSE(c.points[i].undefined);
    EXPECT_TRUE(std::isfinite(c.values[i]));
    if (i > 0) EXPECT_LE(c.values[i], c.values[i - 1]);
    if (c.values[i] < 1.0) {
      ++informative;
      if (i > 0 && c.values[i - 1] < 1.0) EXPECT_LT(c.values[i], c.values[i - 1]);
    }
  }
  EXPECT_GE(informative, 5u);
}

TEST(Holder, AsymptoticUPower) {
  // nu_p(Z) grows like Z^(1 + b/p) up to logs, so the tail exponent tends to
  // p / (p + b) = 2/3 for p = 2, b = 1.
  const auto env = holder_example_envelope(HolderExample{});
  const auto v = NormingSequence::iterated_log(2.0);
  const auto u = log_grid(1e3, 1e5, 10);
  const auto c = bound_curve(u, [&](double x) { return optimize_bound(env, v, x, Theorem::continuous_lebesgue); },
                             Theorem::continuous_lebesgue, 2.0);
  const auto fit = fit_bound_shape(c, true);
  ASSERT_TRUE(fit.fittable);
  EXPECT_GT(fit.beta1, 0.55);
  EXPECT_LT(fit.beta1, 0.8);
}

TEST(Holder, ThetaEqualsGForSinglePointEnvelope) {
  std::mt19937_64 rng(58);
  const auto f = random_field(rng, 2, 1, 2);
  const auto env = nu_envelope(f, 2.0, default_L_grid(2.0, std::numeric_limits<double>::infinity(), 64, 1e6));
  for (std::size_t i = 0; i < env.grid().size(); i += 7) {
    const double L = env.grid()[i];
    const double sh = sigma_hat(sigma_bar(f, 2.0, L / 2.0), 2.0, L / 2.0);
    EXPECT_LT(rel_err(env.grid_values()[i], 2.0 * std::sqrt(sh / 0.95)), 1e-12);
  }
  const auto part = Partition::geometric(3);
  const auto v = NormingSequence::iterated_log(1.0);
  EXPECT_EQ(upper_bound_Theta(env, part, v, 2.5, 30.0).value, upper_bound_G(env, part, v, 2.5, 30.0).value);
}

TEST(PowerDifference, ElementaryInequality) {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> xs(-5.0, 5.0), ps(2.0, 8.0);
  for (int i = 0; i < 2000; ++i) {
    const double x = xs(rng), y = xs(rng), p = ps(rng);
    EXPECT_GE(power_difference_slack(x, y, p), -1e-10 * std::pow(std::max(std::abs(x), std::abs(y)), p));
  }
}
