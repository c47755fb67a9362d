#pragma once

// Moment envelopes L -> g(L) bounding the L-th moment of the running maximum
// of normed sums, and their conversion to tail bounds by optimizing the
// Chebyshev-Markov inequality over L.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "lil/constants.hpp"
#include "lil/error.hpp"
#include "lil/grid_spaces.hpp"

namespace lil {

enum class EnvelopeKind { grid, analytic };

/// How a field's moments are aggregated over X for a scalar exponent p.
enum class FieldEnvelopeForm {
  /// K_R(L) * | (E|xi(x)|^L)^(1/L) |_{p,X}: the bound the Minkowski step
  /// actually delivers. Valid for any finite measure on X.
  minkowski,
  /// K_R(L) * (int_X E|xi(x)|^L dmu)^(1/L). Dominates the Minkowski form when
  /// mu(X) <= 1 and can undercut it (and fail as a bound) when mu(X) > 1.
  integrated,
};

struct EnvelopeOptions {
  /// Use L/(L-1) for the maximal-inequality factor instead of 2.
  bool sharp_doob = false;
  /// Use the symmetric-summand Rosenthal constant.
  bool symmetric = false;
  /// Multiplier on K_R for martingale-difference summands (1 = i.i.d.).
  double rosenthal_multiplier = 1.0;
  FieldEnvelopeForm form = FieldEnvelopeForm::minkowski;

  double maximal_factor(double L) const { return sharp_doob ? doob_factor(L) : 2.0; }
  double rosenthal(double L) const { return rosenthal_multiplier * rosenthal_upper(L, symmetric); }
};

/// Log-spaced evaluation grid on [low, min(L0, high)].
inline std::vector<double> default_L_grid(double low, double L0 = std::numeric_limits<double>::infinity(),
                                          std::size_t points = 96, double span = 1e3) {
  detail::require(low > 0.0 && points >= 2, "default_L_grid: need low > 0 and at least two points");
  double high = low * span;
  if (std::isfinite(L0)) high = std::min(high, low + (L0 - low) * (1.0 - 1e-9));
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(points - 1);
    g[i] = low * std::pow(high / low, t);
  }
  g.front() = low;
  return g;
}

class MomentEnvelope {
 public:
  using Fn = std::function<double(double)>;

  /// Envelope with a closed-form (or exactly computable) g on [low, L0).
  MomentEnvelope(Fn g, double domain_low, double L0, std::vector<double> grid, EnvelopeKind kind,
                 std::vector<double> exponents)
      : g_(std::move(g)), low_(domain_low), L0_(L0), grid_(std::move(grid)), kind_(kind),
        exponents_(std::move(exponents)) {
    validate_domain();
    values_.reserve(grid_.size());
    for (double L : grid_) values_.push_back(g_(L));
  }

  /// Envelope known only at the grid nodes; tail bounds then optimize over
  /// the nodes alone.
  static MomentEnvelope tabulated(double domain_low, double L0, std::vector<double> grid, std::vector<double> values,
                                  EnvelopeKind kind, std::vector<double> exponents) {
    if (grid.size() != values.size()) throw dimension_mismatch("MomentEnvelope: grid and values differ in length");
    for (double v : values) detail::require(v >= 0.0 && !std::isnan(v), "MomentEnvelope: g values must be >= 0");
    MomentEnvelope e;
    e.low_ = domain_low;
    e.L0_ = L0;
    e.grid_ = std::move(grid);
    e.values_ = std::move(values);
    e.kind_ = kind;
    e.exponents_ = std::move(exponents);
    e.validate_domain();
    return e;
  }

  bool tabulated() const noexcept { return !g_; }
  double domain_low() const noexcept { return low_; }
  double L0() const noexcept { return L0_; }
  EnvelopeKind kind() const noexcept { return kind_; }
  /// p (one entry) or p-vector the envelope was built for.
  const std::vector<double>& exponents() const noexcept { return exponents_; }
  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<double>& grid_values() const noexcept { return values_; }

  double operator()(double L) const {
    if (g_) return g_(L);
    const auto it = std::lower_bound(grid_.begin(), grid_.end(), L);
    if (it == grid_.end() || *it != L)
      throw std::out_of_range("MomentEnvelope: tabulated envelope is only defined on its grid");
    return values_[static_cast<std::size_t>(it - grid_.begin())];
  }

  /// c * g with the same domain and grid.
  MomentEnvelope scaled(double c) const {
    detail::require(c > 0.0, "MomentEnvelope::scaled: factor must be > 0");
    if (tabulated()) {
      std::vector<double> v = values_;
      for (double& x : v) x *= c;
      return MomentEnvelope::tabulated(low_, L0_, grid_, std::move(v), kind_, exponents_);
    }
    auto g = g_;
    return MomentEnvelope([g, c](double L) { return c * g(L); }, low_, L0_, grid_, kind_, exponents_);
  }

 private:
  MomentEnvelope() = default;

  void validate_domain() const {
    detail::require(L0_ > low_, "MomentEnvelope: L0 must exceed the domain's lower end");
    detail::require(!grid_.empty(), "MomentEnvelope: evaluation grid must be non-empty");
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      detail::require(grid_[i] >= low_ && grid_[i] < L0_, "MomentEnvelope: grid must lie in [low, L0)");
      if (i > 0) detail::require(grid_[i] > grid_[i - 1], "MomentEnvelope: grid must be strictly increasing");
    }
  }

  Fn g_;
  double low_ = 0.0;
  double L0_ = std::numeric_limits<double>::infinity();
  std::vector<double> grid_;
  std::vector<double> values_;
  EnvelopeKind kind_ = EnvelopeKind::analytic;
  std::vector<double> exponents_;
};

namespace detail {

/// (sum_i w_i |v_i|^L)^(1/L), rescaled by max|v| so large L does not overflow.
inline double scaled_moment_norm(const double* v, const double* w, std::size_t n, std::size_t stride, double L) {
  double big = 0.0;
  for (std::size_t i = 0; i < n; ++i) big = std::max(big, std::abs(v[i * stride]));
  if (big == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * std::pow(std::abs(v[i * stride]) / big, L);
  return big * std::pow(s, 1.0 / L);
}

/// x -> (E|xi(x)|^L)^(1/L) for xi on (X axes..., Omega), Omega last.
inline std::vector<double> pointwise_moment_norm(const GridFunction& xi, double L) {
  const auto& omega = xi.axis(xi.rank() - 1);
  const std::size_t nx = xi.size() / omega.size();
  std::vector<double> out(nx);
  for (std::size_t x = 0; x < nx; ++x)
    out[x] = scaled_moment_norm(xi.values().data() + x, omega.weights().data(), omega.size(), nx, L);
  return out;
}

inline void check_field(const GridFunction& xi) {
  if (xi.rank() < 2) throw dimension_mismatch("envelope: field must live on X x Omega");
  if (!xi.axis(xi.rank() - 1).is_probability())
    throw std::invalid_argument("envelope: the last (Omega) factor must be a uniform probability grid");
  // Rosenthal's inequality needs centered summands.
  const auto& omega = xi.axis(xi.rank() - 1);
  const std::size_t nx = xi.size() / omega.size();
  for (std::size_t x = 0; x < nx; ++x) {
    double mean = 0.0, scale = 0.0;
    for (std::size_t w = 0; w < omega.size(); ++w) {
      mean += omega.weight(w) * xi[w * nx + x];
      scale = std::max(scale, std::abs(xi[w * nx + x]));
    }
    detail::require(std::abs(mean) <= 1e-12 * std::max(scale, 1.0), "envelope: field must be centered over Omega");
  }
}

inline void check_grid_floor(const std::vector<double>& grid, double low) {
  for (double L : grid) detail::require(L >= low, "envelope: every L in the grid must be >= p");
}

}  // namespace detail

/// g(L) = c(L) K_R(L) * A_L(xi) for a field xi on X x Omega, with c(L) the
/// maximal-inequality factor and A_L chosen by options.form.
inline MomentEnvelope envelope_from_field(const GridFunction& xi, double p, std::vector<double> L_grid,
                                          const EnvelopeOptions& opt = {}) {
  detail::require(p >= 2.0, "envelope_from_field: requires p >= 2");
  detail::check_field(xi);
  detail::check_grid_floor(L_grid, p);

  auto field = std::make_shared<const GridFunction>(xi);
  // Weights of the X factor(s), flattened onto one axis.
  const auto x_flat = flatten(GridFunction::zeros({xi.axes().begin(), xi.axes().end() - 1}));
  auto weights =
      std::make_shared<const std::vector<double>>(x_flat.axis(0).weights().begin(), x_flat.axis(0).weights().end());

  MomentEnvelope::Fn g = [field, weights, p, opt](double L) {
    double a = 0.0;
    if (opt.form == FieldEnvelopeForm::minkowski) {
      const auto m = detail::pointwise_moment_norm(*field, L);
      a = lp_norm(m, *weights, p);
    } else {
      // (sum_x mu_x sum_w P_w |xi|^L)^(1/L): an L-norm on the product measure.
      const auto& omega = field->axis(field->rank() - 1);
      const std::size_t nx = weights->size();
      std::vector<double> w(field->size());
      for (std::size_t o = 0; o < omega.size(); ++o)
        for (std::size_t x = 0; x < nx; ++x) w[o * nx + x] = (*weights)[x] * omega.weight(o);
      a = detail::scaled_moment_norm(field->values().data(), w.data(), w.size(), 1, L);
    }
    return opt.maximal_factor(L) * opt.rosenthal(L) * a;
  };
  return MomentEnvelope(std::move(g), p, std::numeric_limits<double>::infinity(), std::move(L_grid),
                        EnvelopeKind::grid, {p});
}

/// g(L) = c(L) K_R(L) moment_fn(L) where moment_fn(L) bounds
/// (int_X E|xi(x)|^L dmu)^(1/L) (or its Minkowski counterpart) analytically.
inline MomentEnvelope envelope_from_moments(std::function<double(double)> moment_fn, double p,
                                            double L0 = std::numeric_limits<double>::infinity(),
                                            std::vector<double> L_grid = {}, const EnvelopeOptions& opt = {},
                                            std::vector<double> exponents = {}) {
  detail::require(p >= 2.0, "envelope_from_moments: requires p >= 2");
  if (L_grid.empty()) L_grid = default_L_grid(p, L0);
  detail::check_grid_floor(L_grid, p);
  if (exponents.empty()) exponents = {p};
  MomentEnvelope::Fn g = [fn = std::move(moment_fn), opt](double L) {
    const double m = fn(L);
    if (m == 0.0) return 0.0;
    return opt.maximal_factor(L) * opt.rosenthal(L) * m;
  };
  return MomentEnvelope(std::move(g), p, L0, std::move(L_grid), EnvelopeKind::analytic, std::move(exponents));
}

/// Gamma(L) = c(L) K_R(L) | (E|xi(x)|^L)^(1/L) |_{p-vector} for xi on
/// X_1 x ... x X_l x Omega.
inline MomentEnvelope mixed_envelope_from_field(const GridFunction& xi, const ExponentVector& p,
                                                std::vector<double> L_grid, const EnvelopeOptions& opt = {}) {
  detail::check_field(xi);
  if (xi.rank() != p.size() + 1) throw dimension_mismatch("mixed_envelope_from_field: rank must be len(p) + 1");
  const double pbar = p.max();
  detail::require(pbar >= 2.0, "mixed_envelope_from_field: requires max(p) >= 2");
  detail::check_grid_floor(L_grid, pbar);

  auto field = std::make_shared<const GridFunction>(xi);
  auto eval = std::make_shared<const MixedNormEvaluator>(
      std::vector<GridMeasureSpace>(xi.axes().begin(), xi.axes().end() - 1), p);
  MomentEnvelope::Fn g = [field, eval, opt](double L) {
    const auto m = detail::pointwise_moment_norm(*field, L);
    return opt.maximal_factor(L) * opt.rosenthal(L) * (*eval)(m);
  };
  std::vector<double> ex(p.components().begin(), p.components().end());
  return MomentEnvelope(std::move(g), pbar, std::numeric_limits<double>::infinity(), std::move(L_grid),
                        EnvelopeKind::grid, std::move(ex));
}

struct TailEstimate {
  double value = 1.0;      // min(1, inf_L (g(L)/z)^L)
  double log_value = 0.0;  // log of the unclamped infimum (may exceed 0)
  double L_star = 0.0;     // minimizing L found
  bool vacuous = true;     // clamp at 1 was active
};

namespace detail {

inline constexpr int kGoldenIterations = 64;
inline constexpr double kGoldenLogWidth = 1e-10;
/// exp() of anything below this is zero in double precision.
inline constexpr double kLogUnderflow = -745.2;

struct LogObjective {
  const MomentEnvelope& env;
  double log_z;
  double operator()(double L) const {
    const double g = env(L);
    if (g == 0.0) return -std::numeric_limits<double>::infinity();
    if (!(g > 0.0) || !std::isfinite(g)) return std::numeric_limits<double>::infinity();
    return L * (std::log(g) - log_z);
  }
};

}  // namespace detail

/// inf over L in the envelope's domain of (g(L)/z)^L, clamped to [0, 1].
///
/// Scans the evaluation grid, then refines by golden-section search in log L
/// inside the bracket around the best node. When the best node is the last
/// one and L0 is infinite the bracket is first pushed outward by doubling L.
/// With full_log the search continues past double underflow so that
/// log_value stays accurate for very large z.
inline TailEstimate tail_from_envelope(const MomentEnvelope& env, double z, bool full_log = false) {
  detail::require(z > 0.0 && std::isfinite(z), "tail_from_envelope: requires finite z > 0");
  const detail::LogObjective f{env, std::log(z)};
  const auto& grid = env.grid();

  TailEstimate out;
  auto finish = [&](double best_f, double best_L) {
    out.L_star = best_L;
    out.log_value = best_f;
    if (best_f == -std::numeric_limits<double>::infinity() || best_f < detail::kLogUnderflow) {
      out.value = 0.0;
      out.vacuous = false;
    } else if (best_f >= 0.0) {
      out.value = 1.0;
      out.vacuous = true;
    } else {
      out.value = std::exp(best_f);
      out.vacuous = false;
    }
    return out;
  };

  std::vector<double> fv(grid.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    fv[i] = env.tabulated() ? (env.grid_values()[i] == 0.0 ? -std::numeric_limits<double>::infinity()
                                                           : grid[i] * (std::log(env.grid_values()[i]) - f.log_z))
                            : f(grid[i]);
    if (fv[i] < fv[best]) best = i;
  }
  double best_f = fv[best];
  double best_L = grid[best];
  if (env.tabulated() || best_f == -std::numeric_limits<double>::infinity()) return finish(best_f, best_L);

  double lo = best > 0 ? grid[best - 1] : grid[best];
  double hi = best + 1 < grid.size() ? grid[best + 1] : grid[best];
  if (best + 1 == grid.size()) {
    if (std::isinf(env.L0())) {
      double prev = best > 0 ? grid[best - 1] : grid[best];
      double cur = grid[best];
      for (;;) {
        const double next = 2.0 * cur;
        const double fn = f(next);
        if (fn < best_f) {
          prev = cur;
          cur = next;
          best_f = fn;
          best_L = next;
          if ((!full_log && best_f < detail::kLogUnderflow) || cur > 1e15) return finish(best_f, best_L);
        } else {
          lo = prev;
          hi = next;
          break;
        }
      }
    } else {
      hi = env.domain_low() + (env.L0() - env.domain_low()) * (1.0 - 1e-12);
      hi = std::max(hi, grid[best]);
    }
  }
  if (hi <= lo) return finish(best_f, best_L);

  // Golden section on t = log L.
  constexpr double inv_phi = 0.6180339887498949;
  double a = std::log(lo), b = std::log(hi);
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(std::exp(c)), fd = f(std::exp(d));
  for (int it = 0; it < detail::kGoldenIterations && (b - a) > detail::kGoldenLogWidth; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(std::exp(d));
    }
    if (fc < best_f) {
      best_f = fc;
      best_L = std::exp(c);
    }
    if (fd < best_f) {
      best_f = fd;
      best_L = std::exp(d);
    }
  }
  return finish(best_f, best_L);
}

/// Tail-decay class of a summand with P(|xi| > z) <= exp(-z^b1 (log z)^(-b2)).
struct TailClass {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double r0 = 1.0;         // natural norming exponent (b1 + 1) / b1
  double u_power = 1.0;    // b1 / (b1 + 1)
  double log_power = 0.0;  // (-b2 - b1 (b1 - 1)) / (b1 + 1)
  bool bounded() const noexcept { return std::isinf(beta1); }
};

inline TailClass classify_tail(double beta1, double beta2 = 0.0) {
  detail::require(beta1 > 0.0, "classify_tail: requires beta1 > 0");
  TailClass t;
  t.beta1 = beta1;
  t.beta2 = beta2;
  if (std::isinf(beta1)) {
    t.r0 = 1.0;
    t.u_power = 1.0;
    t.log_power = 0.0;
    return t;
  }
  t.r0 = (beta1 + 1.0) / beta1;
  t.u_power = beta1 / (beta1 + 1.0);
  t.log_power = (-beta2 - beta1 * (beta1 - 1.0)) / (beta1 + 1.0);
  return t;
}

}  // namespace lil
