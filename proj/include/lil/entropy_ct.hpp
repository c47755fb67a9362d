#pragma once

// Continuous-Lebesgue space machinery: fields xi(x, t) indexed by a finite
// parameter set T, the moment distance r_{p,Z} on T, covering numbers, and the
// chaining functional nu_p(Z) bounding (E sup_t |Sigma_n(., t)|_p^(pZ))^(1/pZ).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "lil/constants.hpp"
#include "lil/envelopes.hpp"
#include "lil/error.hpp"
#include "lil/grid_spaces.hpp"
#include "lil/parallel.hpp"

namespace lil {

/// xi(x, t, omega) on X x T x Omega. Storage is x fastest, then t, then omega.
class IndexedField {
 public:
  IndexedField(GridMeasureSpace X, std::vector<std::vector<double>> T, GridMeasureSpace omega,
               std::vector<double> values)
      : X_(std::move(X)), T_(std::move(T)), omega_(std::move(omega)), values_(std::move(values)) {
    detail::require(!T_.empty(), "IndexedField: T must be non-empty");
    for (const auto& t : T_)
      if (t.size() != T_.front().size()) throw dimension_mismatch("IndexedField: T points differ in dimension");
    if (values_.size() != X_.size() * T_.size() * omega_.size())
      throw dimension_mismatch("IndexedField: values must have |X| * |T| * |Omega| entries");
    detail::require(omega_.is_probability(), "IndexedField: Omega must be a uniform probability grid");
    for (std::size_t t = 0; t < nt(); ++t)
      for (std::size_t x = 0; x < nx(); ++x) {
        double mean = 0.0, scale = 0.0;
        for (std::size_t w = 0; w < nw(); ++w) {
          mean += omega_.weight(w) * at(x, t, w);
          scale = std::max(scale, std::abs(at(x, t, w)));
        }
        detail::require(std::abs(mean) <= 1e-12 * std::max(scale, 1.0), "IndexedField: field must be centered");
      }
  }

  std::size_t nx() const noexcept { return X_.size(); }
  std::size_t nt() const noexcept { return T_.size(); }
  std::size_t nw() const noexcept { return omega_.size(); }
  const GridMeasureSpace& X() const noexcept { return X_; }
  const std::vector<std::vector<double>>& T() const noexcept { return T_; }
  const GridMeasureSpace& omega() const noexcept { return omega_; }
  const std::vector<double>& values() const noexcept { return values_; }

  double at(std::size_t x, std::size_t t, std::size_t w) const { return values_[x + nx() * (t + nt() * w)]; }

  /// Euclidean distance between parameter points.
  double base_distance(std::size_t t, std::size_t s) const {
    double d2 = 0.0;
    for (std::size_t i = 0; i < T_[t].size(); ++i) d2 += (T_[t][i] - T_[s][i]) * (T_[t][i] - T_[s][i]);
    return std::sqrt(d2);
  }

  IndexedField scaled(double c) const {
    auto v = values_;
    for (double& a : v) a *= c;
    return IndexedField(X_, T_, omega_, std::move(v));
  }

 private:
  GridMeasureSpace X_;
  std::vector<std::vector<double>> T_;
  GridMeasureSpace omega_;
  std::vector<double> values_;
};

namespace detail {

inline double omega_moment(const IndexedField& f, double v, const std::function<double(std::size_t)>& value_at) {
  double big = 0.0;
  for (std::size_t w = 0; w < f.nw(); ++w) big = std::max(big, std::abs(value_at(w)));
  if (big == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t w = 0; w < f.nw(); ++w) s += f.omega().weight(w) * std::pow(std::abs(value_at(w)) / big, v);
  return big * std::pow(s, 1.0 / v);
}

}  // namespace detail

/// x -> |xi(x, t) - xi(x, s)|_{v, Omega}.
inline std::vector<double> moment_distance_rho(const IndexedField& f, std::size_t t, std::size_t s, double v) {
  detail::require(v >= 1.0, "moment_distance_rho: requires v >= 1");
  detail::require(t < f.nt() && s < f.nt(), "moment_distance_rho: parameter index out of range");
  std::vector<double> out(f.nx());
  for (std::size_t x = 0; x < f.nx(); ++x)
    out[x] = detail::omega_moment(f, v, [&](std::size_t w) { return f.at(x, t, w) - f.at(x, s, w); });
  return out;
}

/// W_gamma(x) = sup_t |xi(x, t)|_{gamma, Omega}.
inline std::vector<double> moment_sup_W(const IndexedField& f, double gamma) {
  detail::require(gamma >= 1.0, "moment_sup_W: requires gamma >= 1");
  std::vector<double> out(f.nx(), 0.0);
  for (std::size_t x = 0; x < f.nx(); ++x)
    for (std::size_t t = 0; t < f.nt(); ++t)
      out[x] = std::max(out[x], detail::omega_moment(f, gamma, [&](std::size_t w) { return f.at(x, t, w); }));
  return out;
}

/// J(t, s; p, Z; alpha, beta) = int_X W_{(p-1) beta Z}^(p-1) rho_{alpha Z, x}(t, s) dmu.
inline double chaining_J(const IndexedField& f, std::size_t t, std::size_t s, double p, double Z, double alpha,
                         double beta) {
  const auto W = moment_sup_W(f, (p - 1.0) * beta * Z);
  const auto rho = moment_distance_rho(f, t, s, alpha * Z);
  double J = 0.0;
  for (std::size_t x = 0; x < f.nx(); ++x) J += f.X().weight(x) * std::pow(W[x], p - 1.0) * rho[x];
  return J;
}

struct ConjugatePair {
  double alpha;
  double beta;
};

inline ConjugatePair conjugate(double alpha) {
  detail::require(alpha > 1.0, "conjugate: requires alpha > 1");
  return {alpha, alpha / (alpha - 1.0)};
}

inline std::vector<ConjugatePair> default_conjugate_grid() {
  std::vector<ConjugatePair> g;
  for (double a : {1.25, 1.5, 2.0, 3.0, 5.0}) g.push_back(conjugate(a));
  return g;
}

/// Pairs for which both Rosenthal constants K_R(alpha Z) and
/// K_R((p-1) beta Z) are finite, i.e. both arguments are >= 2.
inline std::vector<ConjugatePair> admissible_pairs(const std::vector<ConjugatePair>& grid, double p, double Z) {
  if (grid.empty()) throw std::invalid_argument("distance_r: empty (alpha, beta) grid");
  std::vector<ConjugatePair> out;
  for (const auto& ab : grid) {
    detail::require(ab.alpha > 1.0 && ab.beta > 1.0 && std::abs(1.0 / ab.alpha + 1.0 / ab.beta - 1.0) < 1e-12,
                    "distance_r: (alpha, beta) must satisfy alpha, beta > 1 and 1/alpha + 1/beta = 1");
    if (ab.alpha * Z >= 2.0 && (p - 1.0) * ab.beta * Z >= 2.0) out.push_back(ab);
  }
  if (out.empty())
    throw std::invalid_argument("distance_r: no (alpha, beta) pair gives Rosenthal arguments >= 2 at this (p, Z)");
  return out;
}

/// Moment distance matrix r_{p,Z}(t, s) over all pairs (symmetric, zero diagonal).
///
///   r = 2p inf_{alpha,beta} K_R(alpha Z) K_R^(p-1)((p-1) beta Z) J(t, s; p, Z; alpha, beta)
inline std::vector<double> distance_matrix_r(const IndexedField& f, double p, double Z,
                                             const std::vector<ConjugatePair>& grid = default_conjugate_grid(),
                                             const EnvelopeOptions& opt = {}, unsigned threads = 1) {
  detail::require(p >= 2.0, "distance_r: requires p >= 2");
  detail::require(Z >= 1.0, "distance_r: requires Z >= 1");
  const auto pairs = admissible_pairs(grid, p, Z);
  const std::size_t nt = f.nt();

  struct PairData {
    double factor;
    std::vector<double> weight;  // mu(x) W^(p-1)(x)
    double alphaZ;
  };
  std::vector<PairData> pd;
  for (const auto& ab : pairs) {
    PairData d;
    d.factor = 2.0 * p * opt.rosenthal(ab.alpha * Z) * std::pow(opt.rosenthal((p - 1.0) * ab.beta * Z), p - 1.0);
    const auto W = moment_sup_W(f, (p - 1.0) * ab.beta * Z);
    d.weight.resize(f.nx());
    for (std::size_t x = 0; x < f.nx(); ++x) d.weight[x] = f.X().weight(x) * std::pow(W[x], p - 1.0);
    d.alphaZ = ab.alpha * Z;
    pd.push_back(std::move(d));
  }

  std::vector<double> M(nt * nt, 0.0);
  const std::size_t npairs = nt * (nt - 1) / 2;
  std::vector<std::pair<std::size_t, std::size_t>> idx;
  idx.reserve(npairs);
  for (std::size_t t = 0; t < nt; ++t)
    for (std::size_t s = t + 1; s < nt; ++s) idx.emplace_back(t, s);
  parallel_for(idx.size(), threads, [&](std::size_t i) {
    const auto [t, s] = idx[i];
    double best = std::numeric_limits<double>::infinity();
    for (const auto& d : pd) {
      const auto rho = moment_distance_rho(f, t, s, d.alphaZ);
      double J = 0.0;
      for (std::size_t x = 0; x < f.nx(); ++x) J += d.weight[x] * rho[x];
      best = std::min(best, d.factor * J);
    }
    M[t * nt + s] = best;
    M[s * nt + t] = best;
  });
  return M;
}

inline double distance_r(const IndexedField& f, std::size_t t, std::size_t s, double p, double Z,
                         const std::vector<ConjugatePair>& grid = default_conjugate_grid(),
                         const EnvelopeOptions& opt = {}) {
  detail::require(t < f.nt() && s < f.nt(), "distance_r: parameter index out of range");
  detail::require(p >= 2.0, "distance_r: requires p >= 2");
  detail::require(Z >= 1.0, "distance_r: requires Z >= 1");
  if (t == s) {
    admissible_pairs(grid, p, Z);
    return 0.0;
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& ab : admissible_pairs(grid, p, Z)) {
    const double K = opt.rosenthal(ab.alpha * Z) * std::pow(opt.rosenthal((p - 1.0) * ab.beta * Z), p - 1.0);
    best = std::min(best, 2.0 * p * K * chaining_J(f, t, s, p, Z, ab.alpha, ab.beta));
  }
  return best;
}

/// sigma_bar_{p,Z} = sup_t int_X (E|xi(x,t)|^(pZ))^(1/Z) dmu.
inline double sigma_bar(const IndexedField& f, double p, double Z) {
  detail::require(p >= 1.0 && Z >= 1.0, "sigma_bar: requires p >= 1 and Z >= 1");
  double best = 0.0;
  for (std::size_t t = 0; t < f.nt(); ++t) {
    double s = 0.0;
    for (std::size_t x = 0; x < f.nx(); ++x)
      s += f.X().weight(x) * std::pow(detail::omega_moment(f, p * Z, [&](std::size_t w) { return f.at(x, t, w); }), p);
    best = std::max(best, s);
  }
  return best;
}

/// sigma_hat = K_R^p(pZ) sigma_bar.
inline double sigma_hat(double sigma_bar_value, double p, double Z, const EnvelopeOptions& opt = {}) {
  return std::pow(opt.rosenthal(p * Z), p) * sigma_bar_value;
}

/// eps -> N(T, rho, eps), non-increasing, with N = 1 once eps reaches the diameter.
class CoveringFunction {
 public:
  enum class Kind { analytic, empirical, custom };

  /// max(1, C_cov D (lip / eps)^(1/l))^d: a d-dimensional set of diameter D
  /// measured in a metric bounded by lip * |t - s|^l.
  static CoveringFunction analytic(double D, int d, double l, double C_cov = 1.0, double lip = 1.0) {
    detail::require(D >= 0.0, "CoveringFunction: diameter must be >= 0");
    detail::require(d >= 1, "CoveringFunction: dimension must be >= 1");
    detail::require(l > 0.0 && l <= 1.0, "CoveringFunction: Holder index must lie in (0, 1]");
    detail::require(C_cov > 0.0 && lip > 0.0, "CoveringFunction: constants must be > 0");
    CoveringFunction c;
    c.kind_ = Kind::analytic;
    c.D_ = D;
    c.d_ = d;
    c.l_ = l;
    c.C_ = C_cov;
    c.lip_ = lip;
    return c;
  }

  /// Greedy farthest-point cover of a finite set from its distance matrix
  /// (row-major, n x n). Upper-bounds the minimal covering number.
  static CoveringFunction empirical(const std::vector<double>& dist, std::size_t n) {
    if (dist.size() != n * n) throw dimension_mismatch("CoveringFunction: distance matrix must be n x n");
    detail::require(n >= 1, "CoveringFunction: empty point set");
    CoveringFunction c;
    c.kind_ = Kind::empirical;
    c.n_ = n;
    // radii_[m-1] = covering radius of the first m greedy centres.
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    std::size_t next = 0;
    for (std::size_t m = 1; m <= n; ++m) {
      for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], dist[next * n + i]);
      std::size_t far = 0;
      for (std::size_t i = 1; i < n; ++i)
        if (nearest[i] > nearest[far]) far = i;
      c.radii_.push_back(nearest[far]);
      next = far;
      if (nearest[far] == 0.0) break;
    }
    return c;
  }

  static CoveringFunction single_point() { return analytic(0.0, 1, 1.0); }

  static CoveringFunction custom(std::function<double(double)> N, double max_count) {
    CoveringFunction c;
    c.kind_ = Kind::custom;
    c.fn_ = std::move(N);
    c.max_ = max_count;
    return c;
  }

  Kind kind() const noexcept { return kind_; }

  double operator()(double eps) const {
    switch (kind_) {
      case Kind::analytic: {
        if (D_ == 0.0) return 1.0;
        if (eps <= 0.0) return std::numeric_limits<double>::infinity();
        return std::pow(std::max(1.0, base(eps)), d_);
      }
      case Kind::empirical: {
        for (std::size_t m = 0; m < radii_.size(); ++m)
          if (radii_[m] <= eps) return static_cast<double>(m + 1);
        return static_cast<double>(radii_.size());
      }
      case Kind::custom: return fn_(eps);
    }
    return 1.0;
  }

  /// sup_eps N(eps): |T| for a finite set, infinity for a continuum.
  double max_count() const {
    switch (kind_) {
      case Kind::analytic: return D_ == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
      case Kind::empirical: return static_cast<double>(radii_.size());
      case Kind::custom: return max_;
    }
    return 1.0;
  }

  /// True when N(eps') = (C D (lip/eps')^(1/l))^d exactly for all eps' <= eps.
  bool power_regime(double eps) const { return kind_ == Kind::analytic && D_ > 0.0 && eps > 0.0 && base(eps) >= 1.0; }
  /// Exponent a in N(eps) ~ eps^(-a) inside the power regime.
  double power_exponent() const { return static_cast<double>(d_) / l_; }

 private:
  CoveringFunction() = default;
  double base(double eps) const { return C_ * D_ * std::pow(lip_ / eps, 1.0 / l_); }

  Kind kind_ = Kind::analytic;
  double D_ = 0.0, l_ = 1.0, C_ = 1.0, lip_ = 1.0, max_ = 1.0;
  int d_ = 1;
  std::size_t n_ = 1;
  std::vector<double> radii_;
  std::function<double(double)> fn_;
};

/// 0.05, 0.10, ..., 0.95.
inline std::vector<double> default_theta_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 19; ++i) g.push_back(0.05 * i);
  return g;
}

struct NuOptions {
  std::vector<double> theta_grid = default_theta_grid();
  std::vector<ConjugatePair> pairs = default_conjugate_grid();
  std::size_t max_terms = 10'000;
  EnvelopeOptions envelope{};
  unsigned threads = 1;
};

struct ChainSum {
  double value = 0.0;
  bool divergent = false;
  std::size_t terms = 0;
};

/// sum_{k>=1} theta^(k-1) N^(1/Z)(radius^k), with the tail added in closed
/// form once N is constant (N = 1 on growing radii, N = max on shrinking
/// radii) or follows the analytic power law (a geometric series).
inline ChainSum chain_sum(double theta, double radius, const CoveringFunction& N, double Z,
                          std::size_t max_terms = 10'000) {
  detail::require(theta > 0.0 && theta < 1.0, "chain_sum: theta must lie in (0, 1)");
  detail::require(radius > 0.0, "chain_sum: radius must be > 0");
  ChainSum out;
  const double log_r = std::log(radius);
  const double max_n = N.max_count();
  double tpow = 1.0;  // theta^(k-1)
  for (std::size_t k = 1; k <= max_terms; ++k) {
    const double eps = std::exp(static_cast<double>(k) * log_r);
    const double n = N(eps);
    out.terms = k;
    if (!std::isfinite(n)) {
      out.divergent = true;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    const double term = tpow * std::pow(n, 1.0 / Z);
    out.value += term;
    const double rest = tpow * theta / (1.0 - theta);  // sum_{j>k} theta^(j-1)
    if ((radius >= 1.0 && n <= 1.0) || radius == 1.0 || (radius < 1.0 && n >= max_n)) {
      out.value += rest * std::pow(n, 1.0 / Z);
      return out;
    }
    if (radius < 1.0 && N.power_regime(eps)) {
      const double q = theta * std::pow(radius, -N.power_exponent() / Z);
      if (q >= 1.0) {
        out.divergent = true;
        out.value = std::numeric_limits<double>::infinity();
        return out;
      }
      out.value += term * q / (1.0 - q);
      return out;
    }
    tpow *= theta;
    if (tpow == 0.0) return out;
  }
  out.divergent = true;
  out.value = std::numeric_limits<double>::infinity();
  return out;
}

struct NuThetaRow {
  double theta = 0.0;
  double series = 0.0;      // sum_k theta^(k-1) N^(1/Z)(...)
  double nu_pow_p = 0.0;    // sigma_hat * series
  bool divergent = false;
};

struct NuResult {
  double p = 2.0;
  double Z = 1.0;
  double sigma_bar = 0.0;
  double sigma_hat = 0.0;
  double nu = 0.0;        // nu_p(Z)
  double nu_pow_p = 0.0;  // nu_p^p(Z)
  double theta_star = 0.0;
  bool divergent = false;
  /// sigma_hat >= 1: theta was scanned over (0, 1/sigma_hat) so the radii shrink.
  bool theta_restricted = false;
  std::vector<NuThetaRow> table;
};

/// nu_p^p(Z) = sigma_hat inf_theta sum_k theta^(k-1) N^(1/Z)(T, r_hat, (theta sigma_hat)^k),
/// with N measured in the normalized distance r_hat = r / sigma_hat.
inline NuResult nu_p(double sigma_bar_value, double p, double Z, const CoveringFunction& N, const NuOptions& opt = {}) {
  detail::require(p >= 2.0, "nu_p: requires p >= 2");
  detail::require(Z >= 1.0, "nu_p: requires Z >= 1");
  detail::require(sigma_bar_value >= 0.0, "nu_p: sigma_bar must be >= 0");
  detail::require(!opt.theta_grid.empty(), "nu_p: empty theta grid");
  for (double th : opt.theta_grid) detail::require(th > 0.0 && th < 1.0, "nu_p: theta grid must lie in (0, 1)");

  NuResult out;
  out.p = p;
  out.Z = Z;
  out.sigma_bar = sigma_bar_value;
  out.sigma_hat = sigma_hat(sigma_bar_value, p, Z, opt.envelope);
  if (out.sigma_hat == 0.0) {
    out.theta_star = opt.theta_grid.front();
    for (double th : opt.theta_grid) out.table.push_back({th, 0.0, 0.0, false});
    return out;
  }

  double scale = 1.0;
  if (out.sigma_hat >= 1.0 && N.max_count() > 1.0) {
    out.theta_restricted = true;
    scale = 1.0 / out.sigma_hat;
  }
  double best = std::numeric_limits<double>::infinity();
  for (double th0 : opt.theta_grid) {
    const double th = th0 * scale;
    const auto s = chain_sum(th, th * out.sigma_hat, N, Z, opt.max_terms);
    NuThetaRow row{th, s.value, out.sigma_hat * s.value, s.divergent};
    out.table.push_back(row);
    if (!s.divergent && row.nu_pow_p < best) {
      best = row.nu_pow_p;
      out.theta_star = th;
    }
  }
  if (!std::isfinite(best)) {
    out.divergent = true;
    out.nu_pow_p = out.nu = std::numeric_limits<double>::infinity();
    return out;
  }
  out.nu_pow_p = best;
  out.nu = std::pow(best, 1.0 / p);
  return out;
}

/// nu_p(Z) for a finite field: sigma_bar from the field, N from a greedy
/// cover of T in r_hat.
inline NuResult nu_p(const IndexedField& f, double p, double Z, const NuOptions& opt = {}) {
  const double sb = sigma_bar(f, p, Z);
  const double sh = sigma_hat(sb, p, Z, opt.envelope);
  if (f.nt() == 1 || sh == 0.0) return nu_p(sb, p, Z, CoveringFunction::single_point(), opt);
  auto r = distance_matrix_r(f, p, Z, opt.pairs, opt.envelope, opt.threads);
  for (double& v : r) v /= sh;
  return nu_p(sb, p, Z, CoveringFunction::empirical(r, f.nt()), opt);
}

/// Envelope L -> c(L) nu_p(L/p) for the running maximum of |S_n|_{p,inf}, with
/// c(L) the maximal-inequality factor. Tabulated on L_grid (all L >= p); the
/// default grid spans six decades so that far-out series terms stay controlled.
inline MomentEnvelope nu_envelope(const IndexedField& f, double p, std::vector<double> L_grid = {},
                                  const NuOptions& opt = {}) {
  detail::require(p >= 2.0, "nu_envelope: requires p >= 2");
  if (L_grid.empty()) L_grid = default_L_grid(p, std::numeric_limits<double>::infinity(), 96, 1e6);
  detail::check_grid_floor(L_grid, p);
  std::vector<double> vals(L_grid.size());
  for (std::size_t i = 0; i < L_grid.size(); ++i)
    vals[i] = opt.envelope.maximal_factor(L_grid[i]) * nu_p(f, p, L_grid[i] / p, opt).nu;
  return MomentEnvelope::tabulated(p, std::numeric_limits<double>::infinity(), std::move(L_grid), std::move(vals),
                                   EnvelopeKind::grid, {p});
}

struct HolderExample {
  double C_rho = 1.0;  // constant in the sigma_bar and J bounds
  double l = 1.0;      // Holder index of the increments
  double b = 1.0;      // growth exponent in Z
  double p = 2.0;
  int d = 1;           // dimension of T
  double D = 1.0;      // diameter of T
  double C_cov = 1.0;
};

/// nu_p(Z) for a field with rho_{v,x}(t,s) <= B_v(x) |t-s|^l and
///   int_X W_{2(p-1)Z}^(p-1) B_{2Z} dmu <= C Z^b,  sigma_bar_{p,Z} = C Z^b.
/// With alpha = beta = 2, r_hat <= lip |t - s|^l where
///   lip = 2p K_R(2Z) K_R^(p-1)(2(p-1)Z) / K_R^p(pZ)
/// (the C Z^b factors cancel), so N(T, r_hat, eps) is the analytic cover.
inline NuResult holder_nu(const HolderExample& ex, double Z, const NuOptions& opt = {}) {
  detail::require(ex.l > 0.0 && ex.l <= 1.0, "holder_example: l must lie in (0, 1]");
  detail::require(ex.b <= 1.0, "holder_example: b must be <= 1");
  detail::require(ex.C_rho > 0.0, "holder_example: C must be > 0");
  detail::require(Z > 2.0 * ex.d / ex.l, "holder_example: requires Z > 2d/l");
  const auto& eo = opt.envelope;
  const double lip = 2.0 * ex.p * eo.rosenthal(2.0 * Z) * std::pow(eo.rosenthal(2.0 * (ex.p - 1.0) * Z), ex.p - 1.0) /
                     std::pow(eo.rosenthal(ex.p * Z), ex.p);
  const auto N = CoveringFunction::analytic(ex.D, ex.d, ex.l, ex.C_cov, lip);
  return nu_p(ex.C_rho * std::pow(Z, ex.b), ex.p, Z, N, opt);
}

/// Envelope L -> c(L) nu_p(L/p) for the Holder example, tabulated on
/// L > 2 d p / l (tail bounds then optimize over the nodes, which keeps them
/// valid upper bounds). The default grid spans six decades.
inline MomentEnvelope holder_example_envelope(const HolderExample& ex, std::vector<double> L_grid = {},
                                              const NuOptions& opt = {}) {
  detail::require(ex.p >= 2.0, "holder_example: requires p >= 2");
  const double low = ex.p * std::max(1.0, 2.0 * ex.d / ex.l);
  if (L_grid.empty()) L_grid = default_L_grid(low * (1.0 + 1e-6), std::numeric_limits<double>::infinity(), 192, 1e6);
  for (double L : L_grid) detail::require(L > low, "holder_example: every L must exceed 2 d p / l (Z > 2d/l)");
  std::vector<double> vals(L_grid.size());
  for (std::size_t i = 0; i < L_grid.size(); ++i)
    vals[i] = opt.envelope.maximal_factor(L_grid[i]) * holder_nu(ex, L_grid[i] / ex.p, opt).nu;
  return MomentEnvelope::tabulated(low, std::numeric_limits<double>::infinity(), std::move(L_grid), std::move(vals),
                                   EnvelopeKind::analytic, {ex.p});
}

/// p |x - y| (|x|^(p-1) + |y|^(p-1)) - | |x|^p - |y|^p |, which is >= 0 for p >= 1.
inline double power_difference_slack(double x, double y, double p) {
  const double ax = std::abs(x), ay = std::abs(y);
  return p * std::abs(x - y) * (std::pow(ax, p - 1.0) + std::pow(ay, p - 1.0)) -
         std::abs(std::pow(ax, p) - std::pow(ay, p));
}

}  // namespace lil
