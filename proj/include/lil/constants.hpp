#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "lil/error.hpp"

namespace lil {

/// C_R in the closed-form Rosenthal estimate K_R(p) <= C_R p / (e log p).
inline constexpr double kRosenthalConstant = 1.77638;
/// C_R for symmetrically distributed summands.
inline constexpr double kRosenthalConstantSymmetric = 1.53572;

/// Upper estimate of the Rosenthal constant K_R(p).
///
/// The estimate is finite for every p > 1, but K_R(p) itself is only finite
/// for p >= 2; callers that need a valid bound pass p >= 2.
inline double rosenthal_upper(double p, bool symmetric = false) {
  detail::require_domain(p > 1.0 && std::isfinite(p), "rosenthal_upper: requires p > 1");
  const double c = symmetric ? kRosenthalConstantSymmetric : kRosenthalConstant;
  return c * p / (std::numbers::e * std::log(p));
}

/// Rosenthal-type constant for martingale differences: the i.i.d. estimate
/// times a user multiplier. The default multiplier of 1 is not a proven
/// constant; supply a known one when available.
inline double martingale_rosenthal_upper(double p, double multiplier = 1.0, bool symmetric = false) {
  detail::require_domain(multiplier > 0.0, "martingale_rosenthal_upper: multiplier must be > 0");
  return multiplier * rosenthal_upper(p, symmetric);
}

/// Doob maximal factor L/(L-1), at most 2 for L >= 2.
inline double doob_factor(double L) {
  detail::require_domain(L >= 2.0, "doob_factor: requires L >= 2");
  return L / (L - 1.0);
}

/// beta(k), k >= 1: an explicit prefix beta(1..K) followed by an analytic tail.
struct MixingProfile {
  enum class Tail { zero, geometric, power };

  std::vector<double> prefix;
  Tail tail = Tail::zero;
  double tail_scale = 0.0;  // c
  double tail_param = 0.0;  // q for c*q^k, a for c*k^(-a)

  static MixingProfile zero() { return {}; }

  /// beta(k) = c q^k for every k >= 1.
  static MixingProfile geometric(double q, double c = 1.0) { return {{}, Tail::geometric, c, q}; }

  /// beta(k) = c k^(-a) for every k >= 1.
  static MixingProfile power(double a, double c = 1.0) { return {{}, Tail::power, c, a}; }

  double beta(std::size_t k) const {
    detail::require(k >= 1, "MixingProfile: k starts at 1");
    if (k <= prefix.size()) return prefix[k - 1];
    const double kk = static_cast<double>(k);
    switch (tail) {
      case Tail::zero: return 0.0;
      case Tail::geometric: return tail_scale * std::pow(tail_param, kk);
      case Tail::power: return tail_scale * std::pow(kk, -tail_param);
    }
    return 0.0;
  }

  void validate() const {
    for (double b : prefix) detail::require(b >= 0.0 && std::isfinite(b), "MixingProfile: beta(k) must be >= 0");
    detail::require(tail_scale >= 0.0, "MixingProfile: tail scale must be >= 0");
    if (tail == Tail::geometric) detail::require(tail_param >= 0.0, "MixingProfile: geometric ratio must be >= 0");
  }
};

struct MixingaleCoefficient {
  double value = 0.0;      // K_M(m); +inf when divergent
  bool divergent = false;  // the analytic tail makes the series diverge
  bool converged = true;   // remainder bound reached tail_tol
  std::size_t terms = 0;   // explicit terms summed
  double remainder_bound = 0.0;
};

/// K_M(m) = m [ sum_{k>=1} beta(k) (k+1)^((m-2)/2) ]^(1/m).
///
/// The explicit prefix is summed exactly; the analytic tail is summed term by
/// term until a closed-form bound on the remainder falls below tail_tol times
/// the running sum. That remainder bound is added, so the result is an upper
/// estimate of the true series.
inline MixingaleCoefficient mixingale_coefficient(double m, const MixingProfile& profile, double tail_tol = 1e-15,
                                                  std::size_t max_terms = 1'000'000) {
  detail::require_domain(m >= 1.0, "mixingale_coefficient: requires m >= 1");
  detail::require(tail_tol > 0.0, "mixingale_coefficient: tail_tol must be > 0");
  profile.validate();

  const double s = (m - 2.0) / 2.0;
  auto weight = [s](double k) { return std::pow(k + 1.0, s); };

  MixingaleCoefficient out;
  double sum = 0.0;
  std::size_t k = 0;
  for (; k < profile.prefix.size(); ++k) sum += profile.prefix[k] * weight(static_cast<double>(k + 1));
  out.terms = k;

  const double c = profile.tail_scale;
  if (profile.tail != MixingProfile::Tail::zero && c > 0.0) {
    if (profile.tail == MixingProfile::Tail::geometric) {
      const double q = profile.tail_param;
      if (q >= 1.0) {
        out.divergent = true;
      } else if (q > 0.0) {
        double rem = 0.0;
        for (;;) {
          ++k;
          const double kk = static_cast<double>(k);
          const double t = c * std::pow(q, kk) * weight(kk);
          sum += t;
          // t_{j+1}/t_j <= rho for all j >= k.
          const double rho = q * std::pow((kk + 2.0) / (kk + 1.0), std::max(s, 0.0));
          rem = rho < 1.0 ? t * rho / (1.0 - rho) : std::numeric_limits<double>::infinity();
          if (rem <= tail_tol * sum || t == 0.0 || k - out.terms >= max_terms) break;
        }
        out.terms = k;
        out.remainder_bound = rem;
        out.converged = rem <= tail_tol * sum || rem == 0.0;
        sum += std::isfinite(rem) ? rem : 0.0;
        if (!std::isfinite(rem)) out.divergent = true;
      }
    } else {
      const double a = profile.tail_param;
      const double decay = a - s - 1.0;  // remainder ~ N^(-decay)
      if (decay <= 0.0) {
        out.divergent = true;
      } else {
        double rem = 0.0;
        for (;;) {
          ++k;
          const double kk = static_cast<double>(k);
          sum += c * std::pow(kk, -a) * weight(kk);
          // Integral bound on sum_{j>k}: (j+1)^s <= j^s (1+1/k)^s for s >= 0.
          rem = c * std::pow(1.0 + 1.0 / kk, std::max(s, 0.0)) * std::pow(kk, -decay) / decay;
          if (rem <= tail_tol * sum || k - out.terms >= max_terms) break;
        }
        out.terms = k;
        out.remainder_bound = rem;
        out.converged = rem <= tail_tol * sum;
        sum += rem;
      }
    }
  }

  if (out.divergent) {
    out.value = std::numeric_limits<double>::infinity();
    out.converged = false;
    return out;
  }
  out.value = m * std::pow(sum, 1.0 / m);
  return out;
}

}  // namespace lil
