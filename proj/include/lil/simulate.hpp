#pragma once

// Monte Carlo trajectories n -> ||S(n)|| / (sqrt(n) v(n)) on grid spaces,
// empirical tail estimates with exact binomial confidence limits, and the
// dominance check of an empirical curve against a bound curve.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "lil/envelopes.hpp"
#include "lil/error.hpp"
#include "lil/grid_spaces.hpp"
#include "lil/lil_bounds.hpp"
#include "lil/parallel.hpp"
#include "lil/partitions.hpp"

namespace lil {

enum class Family { rademacher, uniform, gaussian, weibull };
enum class Dependence { iid, martingale };
/// independent: one draw per grid point; common: one draw shared by all points.
enum class Coupling { independent, common };
enum class NormKind { lp, mixed, cl };

struct NormSpec {
  NormKind kind = NormKind::lp;
  double p = 2.0;             // lp and cl
  std::vector<double> p_vec;  // mixed, one exponent per axis (axis 0 innermost)

  static NormSpec lp(double p) { return {NormKind::lp, p, {}}; }
  static NormSpec mixed(std::vector<double> p) { return {NormKind::mixed, 0.0, std::move(p)}; }
  /// sup over the last axis (T) of the L_p norm over the remaining axes.
  static NormSpec cl(double p) { return {NormKind::cl, p, {}}; }

  /// Smallest admissible moment order for the envelope.
  double floor() const {
    return kind == NormKind::mixed ? *std::max_element(p_vec.begin(), p_vec.end()) : p;
  }
  friend bool operator==(const NormSpec&, const NormSpec&) = default;
};

struct FieldSpec {
  Family family = Family::rademacher;
  /// uniform: half-width a; gaussian: standard deviation; weibull: shape beta.
  double param = 1.0;
  /// Per-point amplitude (empty = 1 everywhere).
  std::vector<double> scale;
  Coupling coupling = Coupling::independent;
  Dependence dependence = Dependence::iid;
  /// Martingale mode: the conditional amplitude lies in [1 - lambda, 1].
  double lambda = 0.5;
  std::vector<GridMeasureSpace> axes;
  NormSpec norm;

  std::size_t points() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.size();
    return n;
  }
  double amplitude(std::size_t x) const { return scale.empty() ? 1.0 : scale[x]; }

  void validate() const {
    detail::require(!axes.empty(), "FieldSpec: needs at least one grid axis");
    if (!scale.empty() && scale.size() != points())
      throw dimension_mismatch("FieldSpec: scale must have one entry per grid point");
    for (double s : scale) detail::require(s >= 0.0 && std::isfinite(s), "FieldSpec: scale entries must be >= 0");
    if (family == Family::uniform || family == Family::gaussian)
      detail::require(param > 0.0, "FieldSpec: uniform/gaussian parameter must be > 0");
    if (family == Family::weibull) detail::require(param > 0.0, "FieldSpec: weibull shape must be > 0");
    if (dependence == Dependence::martingale)
      detail::require(lambda >= 0.0 && lambda < 1.0, "FieldSpec: martingale lambda must lie in [0, 1)");
    check_norm(norm);
  }

  void check_norm(const NormSpec& n) const {
    switch (n.kind) {
      case NormKind::lp:
        if (!(n.p >= 1.0)) throw invalid_exponent("FieldSpec: norm exponent must be >= 1");
        break;
      case NormKind::mixed:
        if (n.p_vec.size() != axes.size()) throw dimension_mismatch("FieldSpec: mixed norm needs one exponent per axis");
        for (double q : n.p_vec)
          if (!(q >= 1.0)) throw invalid_exponent("FieldSpec: norm exponent must be >= 1");
        break;
      case NormKind::cl:
        if (axes.size() < 2) throw dimension_mismatch("FieldSpec: cl norm needs X axes plus a T axis");
        if (!(n.p >= 1.0)) throw invalid_exponent("FieldSpec: norm exponent must be >= 1");
        break;
    }
  }
};

/// (E|eta|^L)^(1/L) for the unit member of each family.
inline double family_moment(Family f, double param, double L) {
  detail::require(L >= 1.0, "family_moment: requires L >= 1");
  switch (f) {
    case Family::rademacher: return 1.0;
    case Family::uniform: return param * std::pow(L + 1.0, -1.0 / L);
    case Family::gaussian:
      return param * std::exp((0.5 * L * std::numbers::ln2 + std::lgamma(0.5 * (L + 1.0)) - 0.5 * std::log(std::numbers::pi)) / L);
    case Family::weibull: return std::exp(std::lgamma(1.0 + L / param) / L);
  }
  return 0.0;
}

namespace detail {

/// Norm of a flat value vector on the field's grid; holds its own scratch.
class NormEvaluator {
 public:
  NormEvaluator(const std::vector<GridMeasureSpace>& axes, const NormSpec& n) : kind_(n.kind), p_(n.p) {
    switch (kind_) {
      case NormKind::lp: {
        const auto flat = flatten(GridFunction::zeros(axes));
        w_.assign(flat.axis(0).weights().begin(), flat.axis(0).weights().end());
        break;
      }
      case NormKind::mixed: mixed_.emplace_back(axes, ExponentVector(n.p_vec)); break;
      case NormKind::cl: {
        const auto flat = flatten(GridFunction::zeros({axes.begin(), axes.end() - 1}));
        w_.assign(flat.axis(0).weights().begin(), flat.axis(0).weights().end());
        nt_ = axes.back().size();
        break;
      }
    }
  }

  double operator()(const std::vector<double>& v) const {
    switch (kind_) {
      case NormKind::lp: return lp(v.data(), v.size());
      case NormKind::mixed: return mixed_.front()(v);
      case NormKind::cl: {
        const std::size_t nx = w_.size();
        double best = 0.0;
        for (std::size_t t = 0; t < nt_; ++t) best = std::max(best, lp(v.data() + t * nx, nx));
        return best;
      }
    }
    return 0.0;
  }

 private:
  double lp(const double* v, std::size_t n) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w_[i] * abs_pow(v[i], p_);
    return root(s, p_);
  }

  NormKind kind_;
  double p_;
  std::vector<double> w_;
  std::vector<MixedNormEvaluator> mixed_;
  std::size_t nt_ = 1;
};

}  // namespace detail

/// Counter-based generator: output i of stream `key` is mix(key + (i+1) gamma),
/// so any trial's draws depend only on (seed, trial, draw index).
class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  CounterRng(std::uint64_t seed, std::uint64_t trial) : state_(mix(seed ^ mix(trial * kGamma + 0x5851f42d4c957f2dULL))) {}

  std::uint64_t next() {
    state_ += kGamma;
    return mix(state_);
  }
  /// Uniform on (0, 1].
  double uniform_open0() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }
  /// Uniform on [-1, 1).
  double symmetric_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-52 - 1.0; }
  bool sign_bit() {
    if (bits_left_ == 0) {
      bits_ = next();
      bits_left_ = 64;
    }
    const bool b = bits_ & 1U;
    bits_ >>= 1;
    --bits_left_;
    return b;
  }
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open0();
    const double u2 = uniform_open0();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    spare_ = rad * std::sin(2.0 * std::numbers::pi * u2);
    have_spare_ = true;
    return rad * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
  std::uint64_t bits_ = 0;
  int bits_left_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// One unit draw of the family.
inline double draw_unit(Family f, double param, CounterRng& rng) {
  switch (f) {
    case Family::rademacher: return rng.sign_bit() ? 1.0 : -1.0;
    case Family::uniform: return param * rng.symmetric_unit();
    case Family::gaussian: return param * rng.gaussian();
    case Family::weibull: {
      const double mag = param == 1.0 ? -std::log(rng.uniform_open0()) : std::pow(-std::log(rng.uniform_open0()), 1.0 / param);
      return rng.sign_bit() ? mag : -mag;
    }
  }
  return 0.0;
}

struct TrajectoryEnsemble {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::size_t n_max = 0;
  double r = 0.5;
  NormSpec norm;
  std::vector<double> sup_values;  // per trial, sup_{n <= n_max} ||tau(n)||
};

/// A (norm, norming) pair observed along each simulated path.
struct Observer {
  NormSpec norm;
  double r = 0.5;
};

/// 1 / (sqrt(n) v_r(n)) for n = 1..n_max (index n - 1).
inline std::vector<double> inverse_norming_table(double r, std::size_t n_max) {
  const auto v = NormingSequence::iterated_log(r);
  std::vector<double> t(n_max);
  for (std::size_t n = 1; n <= n_max; ++n)
    t[n - 1] = 1.0 / (std::sqrt(static_cast<double>(n)) * v(static_cast<std::int64_t>(n)));
  return t;
}

/// Runs `trials` independent paths of length n_max and records, for every
/// observer, the running sup of ||S(n)|| / (sqrt(n) v_r(n)). All observers
/// see the same paths. Results do not depend on the thread count.
inline std::vector<TrajectoryEnsemble> simulate_observers(const FieldSpec& spec, const std::vector<Observer>& observers,
                                                          std::size_t n_max, std::size_t trials, std::uint64_t seed,
                                                          unsigned threads = 1) {
  spec.validate();
  detail::require(n_max >= 1 && trials >= 1, "simulate: requires n_max >= 1 and trials >= 1");
  detail::require(!observers.empty(), "simulate: needs at least one observer");

  // Distinct norms and distinct normings are evaluated once per step.
  std::vector<NormSpec> norms;
  std::vector<double> rs;
  std::vector<std::pair<std::size_t, std::size_t>> obs_index;
  for (const auto& o : observers) {
    spec.check_norm(o.norm);
    detail::require(o.r >= 0.5, "simulate: norming exponent r must be >= 1/2");
    auto ni = std::find(norms.begin(), norms.end(), o.norm) - norms.begin();
    if (static_cast<std::size_t>(ni) == norms.size()) norms.push_back(o.norm);
    auto ri = std::find(rs.begin(), rs.end(), o.r) - rs.begin();
    if (static_cast<std::size_t>(ri) == rs.size()) rs.push_back(o.r);
    obs_index.emplace_back(static_cast<std::size_t>(ni), static_cast<std::size_t>(ri));
  }
  std::vector<std::vector<double>> inv_norming;
  for (double r : rs) inv_norming.push_back(inverse_norming_table(r, n_max));

  std::vector<TrajectoryEnsemble> out(observers.size());
  for (std::size_t i = 0; i < observers.size(); ++i) {
    out[i] = {seed, trials, n_max, observers[i].r, observers[i].norm, std::vector<double>(trials, 0.0)};
  }

  const std::size_t npts = spec.points();
  std::vector<double> amp(npts);
  for (std::size_t x = 0; x < npts; ++x) amp[x] = spec.amplitude(x);

  constexpr std::size_t kChunk = 256;
  const std::size_t chunks = (trials + kChunk - 1) / kChunk;
  parallel_for(chunks, threads, [&](std::size_t c) {
    std::vector<detail::NormEvaluator> evals;
    for (const auto& n : norms) evals.emplace_back(spec.axes, n);
    std::vector<double> S(npts), xi(npts), nv(norms.size()), sup(observers.size());
    const std::size_t first = c * kChunk, last = std::min(trials, first + kChunk);
    for (std::size_t trial = first; trial < last; ++trial) {
      CounterRng rng(seed, trial);
      std::fill(S.begin(), S.end(), 0.0);
      std::fill(sup.begin(), sup.end(), 0.0);
      for (std::size_t n = 1; n <= n_max; ++n) {
        if (spec.coupling == Coupling::common) {
          const double e = draw_unit(spec.family, spec.param, rng);
          for (std::size_t x = 0; x < npts; ++x) xi[x] = amp[x] * e;
        } else {
          for (std::size_t x = 0; x < npts; ++x) xi[x] = amp[x] * draw_unit(spec.family, spec.param, rng);
        }
        if (spec.dependence == Dependence::martingale && n > 1) {
          // Amplitude from the past only; the symmetric draw keeps E[xi | past] = 0.
          const double root_n = std::sqrt(static_cast<double>(n - 1));
          for (std::size_t x = 0; x < npts; ++x) xi[x] *= 1.0 - spec.lambda * std::abs(std::tanh(S[x] / root_n));
        }
        for (std::size_t x = 0; x < npts; ++x) S[x] += xi[x];
        for (std::size_t k = 0; k < evals.size(); ++k) nv[k] = evals[k](S);
        for (std::size_t o = 0; o < obs_index.size(); ++o) {
          const double tau = nv[obs_index[o].first] * inv_norming[obs_index[o].second][n - 1];
          if (tau > sup[o]) sup[o] = tau;
        }
      }
      for (std::size_t o = 0; o < observers.size(); ++o) out[o].sup_values[trial] = sup[o];
    }
  });
  return out;
}

inline TrajectoryEnsemble simulate(const FieldSpec& spec, std::size_t n_max, std::size_t trials, std::uint64_t seed,
                                   double r = 0.5, unsigned threads = 1) {
  return simulate_observers(spec, {{spec.norm, r}}, n_max, trials, seed, threads).front();
}

/// Clopper-Pearson one-sided upper limit for k successes out of n.
inline double clopper_pearson_upper(std::size_t k, std::size_t n, double confidence = 0.99) {
  detail::require(n >= 1 && k <= n, "clopper_pearson_upper: requires 0 <= k <= n, n >= 1");
  if (k == n) return 1.0;
  return boost::math::ibeta_inv(static_cast<double>(k + 1), static_cast<double>(n - k), confidence);
}

struct EmpiricalCurve {
  std::vector<double> u;
  std::vector<double> q_hat;
  std::vector<double> cp_upper;  // 99% Clopper-Pearson upper limit
  std::size_t trials = 0;
};

/// Q_hat(u) = fraction of trials with sup > u.
inline EmpiricalCurve empirical_Q(const TrajectoryEnsemble& ens, const std::vector<double>& u_grid) {
  for (std::size_t i = 1; i < u_grid.size(); ++i)
    detail::require(u_grid[i] > u_grid[i - 1], "empirical_Q: u grid must be strictly increasing");
  auto sorted = ens.sup_values;
  std::sort(sorted.begin(), sorted.end());
  EmpiricalCurve c;
  c.u = u_grid;
  c.trials = sorted.size();
  for (double u : u_grid) {
    const auto above = static_cast<std::size_t>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), u));
    c.q_hat.push_back(static_cast<double>(above) / static_cast<double>(c.trials));
    c.cp_upper.push_back(clopper_pearson_upper(above, c.trials));
  }
  return c;
}

struct DominanceRow {
  double u = 0.0;
  double q_hat = 0.0;
  double cp_upper = 0.0;
  double bound = 1.0;
  bool vacuous = false;
  bool pass = true;
  /// No exceedance observed, but the bound is below the zero-count limit.
  bool unresolved = false;
};

struct DominanceReport {
  std::vector<DominanceRow> rows;
  std::size_t failures = 0;
  std::size_t unresolved = 0;
  bool all_pass() const noexcept { return failures == 0; }
};

/// PASS at u iff the 99% upper limit is <= the bound, or the bound is vacuous.
/// A row with no exceedances whose bound lies below the zero-count limit
/// 1 - 0.01^(1/trials) is beyond the run's resolution: it is marked
/// unresolved, not failed, since zero exceedances cannot contradict a bound.
inline DominanceReport dominance_report(const EmpiricalCurve& emp, const std::vector<double>& bound_u,
                                        const std::vector<double>& bound_values,
                                        const std::vector<bool>& bound_vacuous = {}) {
  if (emp.u.size() != bound_u.size() || bound_values.size() != bound_u.size())
    throw dimension_mismatch("dominance_report: u grids differ in length");
  DominanceReport rep;
  for (std::size_t i = 0; i < emp.u.size(); ++i) {
    const double tol = 1e-12 * std::max(1.0, std::abs(emp.u[i]));
    if (std::abs(emp.u[i] - bound_u[i]) > tol) throw std::invalid_argument("dominance_report: u grids differ");
    DominanceRow row;
    row.u = emp.u[i];
    row.q_hat = emp.q_hat[i];
    row.cp_upper = emp.cp_upper[i];
    row.bound = bound_values[i];
    row.vacuous = (bound_vacuous.empty() ? false : bound_vacuous[i]) || bound_values[i] >= 1.0;
    row.pass = row.vacuous || row.cp_upper <= row.bound;
    if (!row.pass && row.q_hat == 0.0) {
      row.unresolved = true;
      row.pass = true;
      ++rep.unresolved;
    }
    if (!row.pass) ++rep.failures;
    rep.rows.push_back(row);
  }
  return rep;
}

inline DominanceReport dominance_report(const EmpiricalCurve& emp, const TailBoundCurve& bound) {
  std::vector<bool> vac;
  for (std::size_t i = 0; i < bound.values.size(); ++i) vac.push_back(bound.values[i] >= 1.0);
  return dominance_report(emp, bound.u, bound.values, vac);
}

/// Moment envelope implied by a FieldSpec: c(L) K_R(L) times the FieldSpec norm
/// of x -> (E|xi(x)|^L)^(1/L). For the cl norm the sup over T is bounded by
/// the l_L sum over T.
inline MomentEnvelope envelope_from_spec(const FieldSpec& spec, const EnvelopeOptions& opt = {},
                                         std::vector<double> L_grid = {}) {
  spec.validate();
  const double low = std::max(2.0, spec.norm.floor());
  if (L_grid.empty()) L_grid = default_L_grid(low);
  std::vector<double> amp(spec.points());
  for (std::size_t x = 0; x < amp.size(); ++x) amp[x] = spec.amplitude(x);

  std::function<double(double)> moment;
  switch (spec.norm.kind) {
    case NormKind::lp: {
      const auto flat = flatten(GridFunction::zeros(spec.axes));
      std::vector<double> w(flat.axis(0).weights().begin(), flat.axis(0).weights().end());
      const double p = spec.norm.p;
      moment = [amp, w, p, f = spec.family, a = spec.param](double L) {
        return family_moment(f, a, L) * lp_norm(amp, w, p);
      };
      break;
    }
    case NormKind::mixed: {
      auto eval = std::make_shared<const MixedNormEvaluator>(spec.axes, ExponentVector(spec.norm.p_vec));
      const double base = (*eval)(amp);
      moment = [base, f = spec.family, a = spec.param](double L) { return family_moment(f, a, L) * base; };
      break;
    }
    case NormKind::cl: {
      const auto flat = flatten(GridFunction::zeros({spec.axes.begin(), spec.axes.end() - 1}));
      std::vector<double> w(flat.axis(0).weights().begin(), flat.axis(0).weights().end());
      const std::size_t nx = w.size(), nt = spec.axes.back().size();
      std::vector<double> per_t(nt);
      for (std::size_t t = 0; t < nt; ++t)
        per_t[t] = lp_norm(std::span<const double>(amp.data() + t * nx, nx), w, spec.norm.p);
      moment = [per_t, f = spec.family, a = spec.param](double L) {
        double big = *std::max_element(per_t.begin(), per_t.end());
        if (big == 0.0) return 0.0;
        double s = 0.0;
        for (double v : per_t) s += std::pow(v / big, L);
        return family_moment(f, a, L) * big * std::pow(s, 1.0 / L);
      };
      break;
    }
  }
  std::vector<double> ex = spec.norm.kind == NormKind::mixed ? spec.norm.p_vec : std::vector<double>{spec.norm.p};
  return envelope_from_moments(moment, low, std::numeric_limits<double>::infinity(), std::move(L_grid), opt,
                               std::move(ex));
}

/// Horizon-doubling diagnostic: per-trial increase of the sup when the
/// horizon goes from n_max to 2 n_max on the same paths.
struct HorizonDiagnostic {
  double mean_increment = 0.0;
  double max_increment = 0.0;
  double fraction_changed = 0.0;
};

inline HorizonDiagnostic horizon_doubling(const FieldSpec& spec, std::size_t n_max, std::size_t trials,
                                          std::uint64_t seed, double r = 0.5, unsigned threads = 1) {
  const auto a = simulate(spec, n_max, trials, seed, r, threads);
  const auto b = simulate(spec, 2 * n_max, trials, seed, r, threads);
  HorizonDiagnostic d;
  std::size_t changed = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    const double inc = b.sup_values[i] - a.sup_values[i];
    d.mean_increment += inc;
    d.max_increment = std::max(d.max_increment, inc);
    if (inc > 0.0) ++changed;
  }
  d.mean_increment /= static_cast<double>(trials);
  d.fraction_changed = static_cast<double>(changed) / static_cast<double>(trials);
  return d;
}

}  // namespace lil
