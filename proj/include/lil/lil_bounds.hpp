#pragma once

// Tail bounds for sup_n ||S(n)|| / (sqrt(n) v(n)).
//
// For a partition in Y(w), the block k = [A(k), A(k+1)) contributes the
// Markov-optimized tail h(u v(A(k)) / w) of the running maximum, so
//
//   Q(u) <= sum_k h(u v(A(k)) / w).
//
// The maximal-inequality factor 2 already sits inside g (see envelopes.hpp),
// so the argument of h carries no extra 1/2. The same series gives the
// Lebesgue (G), mixed Lebesgue (F) and continuous-Lebesgue (Theta) bounds;
// only the envelope differs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lil/envelopes.hpp"
#include "lil/error.hpp"
#include "lil/parallel.hpp"
#include "lil/partitions.hpp"

namespace lil {

enum class Theorem { lebesgue, mixed_lebesgue, continuous_lebesgue };

enum class WidthCondition { block_covering, class_Y };

inline const char* theorem_name(Theorem t) {
  switch (t) {
    case Theorem::lebesgue: return "G";
    case Theorem::mixed_lebesgue: return "F";
    case Theorem::continuous_lebesgue: return "Theta";
  }
  return "?";
}

struct BoundValue {
  double value = 1.0;
  bool vacuous = true;     // value clamped at 1
  bool undefined = false;  // series did not converge: bound does not exist at u
  double truncation_k = 0; // last block index accounted for
  int d = 0;               // geometric ratio of the partition (0 for generators)
  double w = 0.0;
  Theorem theorem = Theorem::lebesgue;
};

struct SeriesOptions {
  /// Blocks summed term by term before switching to a condensation bound.
  std::size_t exact_terms = 512;
  /// Doublings of the condensation tail before giving up.
  int max_doublings = 400;
  /// Stop once a term is below this fraction of the running sum.
  double rel_tol = 1e-16;
  /// Largest log k examined by the far-field probe.
  double far_log_k = 1e6;
  /// Which width condition the partition must meet. block_covering is the
  /// one the bound needs; class_Y is the inf-ratio class, kept for comparison.
  WidthCondition condition = WidthCondition::block_covering;
};

namespace detail {

/// Far-field check on log k beyond the truncation point. With
/// phi(l) = l + log h(z(e^l)), the terms in (k/2, k] sum to at least
/// e^phi / 2, and the condensed series behaves like the integral of e^phi.
struct FarField {
  bool vacuous = false;    // some window (k/2, k] alone contributes >= 1
  bool divergent = false;  // k t_k still growing at the last probe
};

inline FarField far_field_probe(const std::function<double(double)>& log_tail, const Partition& part,
                                const NormingSequence& v, double w, double u, double log_k0, double log_k_max) {
  FarField out;
  double prev = std::numeric_limits<double>::quiet_NaN();
  bool rising = false;
  for (double l = std::max(log_k0, 1.0) * 2.0; l <= log_k_max; l *= 2.0) {
    const double lla = part.log_log_A_at(l);
    const double vv = v.at_log_log(lla);
    if (!std::isfinite(vv)) break;
    const double phi = l + std::min(0.0, log_tail(u * vv / w));
    if (phi - std::numbers::ln2 >= 0.0) {
      out.vacuous = true;
      return out;
    }
    rising = !std::isnan(prev) && phi > prev;
    prev = phi;
  }
  out.divergent = rising;
  return out;
}

/// sum_k h(u v(A(k)) / w), where log_tail(z) = log h(z) and h is non-increasing.
///
/// The first `exact_terms` terms are summed directly. The remainder is
/// bounded by Cauchy condensation: terms with index in (K 2^j, K 2^(j+1)]
/// are at most term(K 2^j), so the tail is at most sum_j K 2^j term(K 2^j).
/// Once the stopping rule fires, a far-field probe on log k guards against
/// series that only turn around (and diverge) at astronomically large k.
inline BoundValue series_bound(const std::function<double(double)>& log_tail, const Partition& part,
                               const NormingSequence& v, double w, double u, const SeriesOptions& opt) {
  BoundValue out;
  out.d = part.d();
  out.w = w;
  auto term = [&](double k) { return std::exp(std::min(0.0, log_tail(u * v.at_log(part.log_A(k)) / w))); };
  auto vacuous = [&](double k, bool undefined) {
    out.value = 1.0;
    out.vacuous = true;
    out.undefined = undefined;
    out.truncation_k = k;
    return out;
  };
  auto done = [&](double sum, double k) {
    if (part.kind() != Partition::Kind::generator && sum > 0.0) {
      const auto far = far_field_probe(log_tail, part, v, w, u, std::log(k), opt.far_log_k);
      if (far.vacuous || far.divergent) return vacuous(k, far.divergent);
    }
    out.value = std::min(1.0, sum);
    out.vacuous = sum >= 1.0;
    out.truncation_k = k;
    return out;
  };

  double sum = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  double last = 0.0;
  for (std::size_t i = 1; i <= opt.exact_terms; ++i) {
    const double k = static_cast<double>(i);
    const double t = term(k);
    sum += t;
    if (sum >= 1.0) return vacuous(k, false);
    if (t == 0.0 || (t <= opt.rel_tol * sum && t <= prev)) return done(sum, k);
    prev = t;
    last = t;
  }

  const double K = static_cast<double>(opt.exact_terms);
  double block_prev = std::numeric_limits<double>::infinity();
  double t_j = last;  // term(K 2^j)
  for (int j = 0; j <= opt.max_doublings; ++j) {
    const double start = K * std::ldexp(1.0, j);
    const double block = start * t_j;
    sum += block;
    if (sum >= 1.0) return vacuous(2.0 * start, false);
    if (block == 0.0 || (block <= opt.rel_tol * sum && block <= block_prev)) return done(sum, 2.0 * start);
    block_prev = block;
    t_j = term(2.0 * start);
  }
  return vacuous(K * std::ldexp(1.0, opt.max_doublings + 1), true);
}

inline void check_u(double u) { detail::require(u >= std::numbers::e, "bound: requires u >= e"); }

inline void check_membership(const Partition& part, double w, WidthCondition c) {
  if (c == WidthCondition::class_Y) {
    const auto y = class_Y_check(part, w);
    if (y.verdict == YClassCheck::Verdict::violated)
      throw precondition_error("bound: partition is not in Y(w) (ratio below w^2 at k = " +
                               std::to_string(static_cast<long long>(*y.violated_at)) + ")");
    return;
  }
  const auto y = block_cover_check(part, w);
  if (y.verdict == YClassCheck::Verdict::violated)
    throw precondition_error("bound: width does not cover the blocks (ratio above w^2 at k = " +
                             std::to_string(static_cast<long long>(*y.violated_at)) + ")");
}

inline BoundValue envelope_series(const MomentEnvelope& env, const Partition& part, const NormingSequence& v, double w,
                                  double u, Theorem th, const SeriesOptions& opt) {
  check_u(u);
  detail::require(w > 1.0, "bound: requires w > 1");
  check_membership(part, w, opt.condition);
  auto log_tail = [&env](double z) {
    const auto t = tail_from_envelope(env, z, true);
    return t.value == 0.0 && t.log_value == 0.0 ? -std::numeric_limits<double>::infinity() : t.log_value;
  };
  auto out = series_bound(log_tail, part, v, w, u, opt);
  out.theorem = th;
  return out;
}

}  // namespace detail

/// G(u) = sum_k h_p(u v(A(k)) / w) for an L_p envelope.
inline BoundValue upper_bound_G(const MomentEnvelope& env, const Partition& part, const NormingSequence& v, double w,
                                double u, const SeriesOptions& opt = {}) {
  return detail::envelope_series(env, part, v, w, u, Theorem::lebesgue, opt);
}

/// F(u) = sum_k gamma(u v(A(k)) / w) for a mixed-norm envelope.
inline BoundValue upper_bound_F(const MomentEnvelope& env, const Partition& part, const NormingSequence& v, double w,
                                double u, const SeriesOptions& opt = {}) {
  return detail::envelope_series(env, part, v, w, u, Theorem::mixed_lebesgue, opt);
}

/// Theta(u) = sum_k zeta(u v(A(k)) / w) for an envelope built from nu_p(L/p).
inline BoundValue upper_bound_Theta(const MomentEnvelope& nu_env, const Partition& part, const NormingSequence& v,
                                    double w, double u, const SeriesOptions& opt = {}) {
  return detail::envelope_series(nu_env, part, v, w, u, Theorem::continuous_lebesgue, opt);
}

inline Theorem theorem_for(const MomentEnvelope& env) {
  return env.exponents().size() > 1 ? Theorem::mixed_lebesgue : Theorem::lebesgue;
}

struct OptimizeOptions {
  int d_min = 2;
  int d_max = 16;
  WidthRule width = WidthRule::block_covering;
  SeriesOptions series{};
};

/// inf over the geometric family d in [d_min, d_max] of the series bound,
/// each at its family width. Ties go to the smaller d.
inline BoundValue optimize_bound(const MomentEnvelope& env, const NormingSequence& v, double u,
                                 Theorem th, const OptimizeOptions& opt = {}) {
  detail::check_u(u);
  detail::require(opt.d_min >= 2 && opt.d_max >= opt.d_min, "optimize_bound: need 2 <= d_min <= d_max");
  BoundValue best;
  bool have = false;
  for (int d = opt.d_min; d <= opt.d_max; ++d) {
    const auto part = Partition::geometric(d);
    const double w = family_width(part, opt.width);
    auto so = opt.series;
    if (opt.width == WidthRule::largest_admissible) so.condition = WidthCondition::class_Y;
    const auto b = detail::envelope_series(env, part, v, w, u, th, so);
    if (!have || b.value < best.value) {
      best = b;
      have = true;
    }
  }
  return best;
}

inline BoundValue optimize_bound(const MomentEnvelope& env, const NormingSequence& v, double u,
                                 const OptimizeOptions& opt = {}) {
  return optimize_bound(env, v, u, theorem_for(env), opt);
}

/// Bound values on an increasing u grid.
struct TailBoundCurve {
  std::vector<double> u;
  std::vector<double> values;     // running minimum of the raw bounds
  std::vector<BoundValue> points; // raw bound at each u
  Theorem theorem = Theorem::lebesgue;
  double norming_r = 0.0;
};

/// Log-spaced grid of n points on [a, b].
inline std::vector<double> log_grid(double a, double b, std::size_t n) {
  detail::require(a > 0.0 && b >= a && n >= 1, "log_grid: need 0 < a <= b and n >= 1");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = a;
    return g;
  }
  for (std::size_t i = 0; i < n; ++i)
    g[i] = a * std::pow(b / a, static_cast<double>(i) / static_cast<double>(n - 1));
  g.front() = a;
  g.back() = b;
  return g;
}

/// Evaluates `bound_at(u)` over the grid (in parallel), then applies a
/// running minimum: Q is non-increasing, so a bound at u also bounds Q at
/// every larger u.
inline TailBoundCurve bound_curve(const std::vector<double>& u_grid, const std::function<BoundValue(double)>& bound_at,
                                  Theorem th, double r, unsigned threads = 1) {
  for (std::size_t i = 1; i < u_grid.size(); ++i)
    detail::require(u_grid[i] > u_grid[i - 1], "bound_curve: u grid must be strictly increasing");
  TailBoundCurve c;
  c.u = u_grid;
  c.theorem = th;
  c.norming_r = r;
  c.points.resize(u_grid.size());
  parallel_for(u_grid.size(), threads, [&](std::size_t i) { c.points[i] = bound_at(u_grid[i]); });
  c.values.resize(u_grid.size());
  double running = 1.0;
  for (std::size_t i = 0; i < u_grid.size(); ++i) {
    running = std::min(running, c.points[i].value);
    c.values[i] = running;
  }
  return c;
}

struct LowerBoundOptions {
  /// Include the exp(-C u^2 log log u) branch (valid for the v_{1/2} norming).
  bool iterated_log_branch = false;
  std::optional<double> C;
};

struct LowerBound {
  double value = 0.0;
  double single_term = 0.0;  // P(||xi|| > u)
  std::optional<double> iterated_log_term;
};

/// Q(u) >= P(||xi|| > u); under v_{1/2} additionally
/// Q(u) >= exp(-C u^2 log log u) for u > e^e.
inline LowerBound lower_bound_Q(const std::function<double(double)>& xi_norm_tail, double u,
                                const LowerBoundOptions& opt = {}) {
  LowerBound out;
  out.single_term = std::clamp(xi_norm_tail(u), 0.0, 1.0);
  out.value = out.single_term;
  if (opt.iterated_log_branch) {
    if (!opt.C) throw std::invalid_argument("lower_bound_Q: the iterated-log branch needs a constant C");
    detail::require(*opt.C > 0.0, "lower_bound_Q: C must be > 0");
    detail::require(u > kEulerPowE, "lower_bound_Q: the iterated-log branch requires u > e^e");
    const double t = std::exp(-*opt.C * u * u * std::log(std::log(u)));
    out.iterated_log_term = t;
    out.value = std::max(out.value, t);
  }
  return out;
}

struct ShapeFit {
  bool fittable = false;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double C = 0.0;
  double residual = 0.0;  // RMS residual in log(-log value)
  std::size_t points = 0;
};

/// Least-squares fit of value ~ exp(-C u^b1 (log u)^b2) through
/// log(-log value) = log C + b1 log u + b2 log log u. Points with values
/// outside (0, 1) are skipped; fewer than five usable points is unfittable.
/// With fit_log_power = false, b2 is pinned to zero.
inline ShapeFit fit_bound_shape(const std::vector<double>& u, const std::vector<double>& values,
                                bool fit_log_power = true) {
  if (u.size() != values.size()) throw dimension_mismatch("fit_bound_shape: u and values differ in length");
  std::vector<std::size_t> use;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (values[i] > 0.0 && values[i] < 1.0 && u[i] >= std::numbers::e) use.push_back(i);
  ShapeFit fit;
  fit.points = use.size();
  if (use.size() < 5) return fit;

  const Eigen::Index n = static_cast<Eigen::Index>(use.size());
  const Eigen::Index cols = fit_log_power ? 3 : 2;
  Eigen::MatrixXd A(n, cols);
  Eigen::VectorXd y(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double uu = u[use[static_cast<std::size_t>(r)]];
    A(r, 0) = 1.0;
    A(r, 1) = std::log(uu);
    if (fit_log_power) A(r, 2) = std::log(std::log(uu));
    y(r) = std::log(-std::log(values[use[static_cast<std::size_t>(r)]]));
  }
  const Eigen::VectorXd x = A.colPivHouseholderQr().solve(y);
  fit.fittable = true;
  fit.C = std::exp(x(0));
  fit.beta1 = x(1);
  fit.beta2 = fit_log_power ? x(2) : 0.0;
  fit.residual = std::sqrt((A * x - y).squaredNorm() / static_cast<double>(n));
  return fit;
}

inline ShapeFit fit_bound_shape(const TailBoundCurve& curve, bool fit_log_power = true) {
  return fit_bound_shape(curve.u, curve.values, fit_log_power);
}

}  // namespace lil
