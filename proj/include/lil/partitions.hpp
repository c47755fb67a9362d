#pragma once

// Partitions of the positive integers into blocks [A(k), A(k+1)), the class
// Y(w) test inf_k (A(k+1)-1)/A(k) >= w^2, and norming sequences v(n).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lil/error.hpp"

namespace lil {

/// e^e.
inline constexpr double kEulerPowE = 15.15426224147926;

/// A(1) = 1 < A(2) < ... with A(k+1) >= A(k) + 2.
///
/// Stored as an exact prefix A(1..K) continued by the recursion
/// A(k+1) = d A(k) + (d-1)^2, which is how the geometric family
/// A(k) = d^k - d + 1 propagates. A user generator replaces both.
class Partition {
 public:
  enum class Kind { geometric, explicit_prefix, generator };

  /// A(k) = d^k - d + 1 with the first K values cached exactly.
  static Partition geometric(int d, std::size_t K = 8) {
    detail::require(d >= 2, "geometric_partition: requires d >= 2");
    detail::require(K >= 1, "geometric_partition: prefix length must be >= 1");
    Partition p;
    p.kind_ = Kind::geometric;
    p.d_ = d;
    std::int64_t a = 1;
    p.prefix_.push_back(a);
    const std::int64_t dd = d;
    const std::int64_t c = (dd - 1) * (dd - 1);
    while (p.prefix_.size() < K) {
      if (a > (std::numeric_limits<std::int64_t>::max() - c) / dd) break;  // keep the prefix exact
      a = dd * a + c;
      p.prefix_.push_back(a);
    }
    return p;
  }

  /// Explicit prefix; beyond it the sequence continues geometrically with
  /// ratio d (A(k+1) = d A(k) + (d-1)^2).
  static Partition explicit_prefix(std::vector<std::int64_t> A, int continue_d = 2) {
    detail::require(!A.empty() && A.front() == 1, "Partition: A(1) must equal 1");
    detail::require(continue_d >= 2, "Partition: continuation ratio must be >= 2");
    for (std::size_t k = 1; k < A.size(); ++k)
      detail::require(A[k] >= A[k - 1] + 2, "Partition: requires A(k+1) >= A(k) + 2");
    Partition p;
    p.kind_ = Kind::explicit_prefix;
    p.d_ = continue_d;
    p.prefix_ = std::move(A);
    return p;
  }

  /// A(k) supplied by a closure (as a double; may be inf for huge k).
  static Partition from_generator(std::function<double(double)> A) {
    detail::require(static_cast<bool>(A), "Partition: generator must be callable");
    detail::require(A(1.0) == 1.0, "Partition: A(1) must equal 1");
    Partition p;
    p.kind_ = Kind::generator;
    p.gen_ = std::move(A);
    return p;
  }

  Kind kind() const noexcept { return kind_; }
  /// Continuation ratio (geometric d); 0 for generators.
  int d() const noexcept { return kind_ == Kind::generator ? 0 : d_; }
  const std::vector<std::int64_t>& prefix() const noexcept { return prefix_; }

  /// log A(k) for real k >= 1 (k is an integer in every use, but may exceed
  /// 2^63, so it is carried as a double).
  double log_A(double k) const {
    detail::require(k >= 1.0, "Partition: k starts at 1");
    if (kind_ == Kind::generator) return std::log(gen_(k));
    const double K = static_cast<double>(prefix_.size());
    if (k <= K) return std::log(static_cast<double>(prefix_[static_cast<std::size_t>(k) - 1]));
    // A(K+j) = d^j (A(K) + d - 1) - (d - 1)
    const double j = k - K;
    const double dm1 = d_ - 1.0;
    const double head = j * std::log(static_cast<double>(d_)) + std::log(static_cast<double>(prefix_.back()) + dm1);
    return head + std::log1p(-dm1 * std::exp(-head));
  }

  double A(double k) const { return std::exp(log_A(k)); }

  /// log log A(k) given log k, valid far beyond the range of doubles for k.
  /// NaN for generators once k is not representable.
  double log_log_A_at(double log_k) const {
    if (log_k < 700.0) return std::log(log_A(std::max(1.0, std::exp(log_k))));
    if (kind_ == Kind::generator) return std::numeric_limits<double>::quiet_NaN();
    // log A(k) = k log d + c with c = log(A(K) + d - 1) - K log d (up to a vanishing term).
    const double K = static_cast<double>(prefix_.size());
    const double ld = std::log(static_cast<double>(d_));
    const double c = std::log(static_cast<double>(prefix_.back()) + d_ - 1.0) - K * ld;
    return log_k + std::log(ld + c * std::exp(-log_k));
  }

  /// (A(k+1) - 1) / A(k), accurate for huge A.
  double block_ratio(double k) const {
    if (kind_ == Kind::generator) return (gen_(k + 1.0) - 1.0) / gen_(k);
    const double K = static_cast<double>(prefix_.size());
    if (k < K) {
      const auto i = static_cast<std::size_t>(k) - 1;
      return static_cast<double>(prefix_[i + 1] - 1) / static_cast<double>(prefix_[i]);
    }
    const double dd = d_;
    return dd + ((dd - 1.0) * (dd - 1.0) - 1.0) * std::exp(-log_A(k));
  }

 private:
  Partition() = default;

  Kind kind_ = Kind::geometric;
  int d_ = 2;
  std::vector<std::int64_t> prefix_;
  std::function<double(double)> gen_;
};

inline Partition geometric_partition(int d, std::size_t K = 8) { return Partition::geometric(d, K); }

struct YClassCheck {
  enum class Verdict { member, violated, inconclusive };
  Verdict verdict = Verdict::inconclusive;
  std::optional<double> violated_at;  // first k with ratio < w^2
  double inf_ratio = std::numeric_limits<double>::infinity();  // over checked k (and the analytic limit)
  double sup_ratio = 0.0;

  bool member() const noexcept { return verdict == Verdict::member; }
};

/// Relative slack in the Y(w) comparison, so that w = sqrt(ratio) is a member.
inline constexpr double kYClassRelTol = 1e-12;

/// Class Y(w): inf_k (A(k+1)-1)/A(k) >= w^2 (non-strict, up to kYClassRelTol).
///
/// Prefix and geometric continuation are settled analytically: past the
/// prefix the ratio is d + ((d-1)^2 - 1)/A(k), which decreases to d.
/// Generators are checked for k <= K_check only.
inline YClassCheck class_Y_check(const Partition& part, double w, std::size_t K_check = 64) {
  detail::require(w > 1.0, "class_Y_check: requires w > 1");
  const double w2 = w * w * (1.0 - kYClassRelTol);
  YClassCheck out;

  auto visit = [&](double k) {
    const double r = part.block_ratio(k);
    out.inf_ratio = std::min(out.inf_ratio, r);
    out.sup_ratio = std::max(out.sup_ratio, r);
    if (r < w2 && !out.violated_at) out.violated_at = k;
  };

  if (part.kind() == Partition::Kind::generator) {
    for (std::size_t k = 1; k <= K_check; ++k) visit(static_cast<double>(k));
    out.verdict = out.violated_at ? YClassCheck::Verdict::violated : YClassCheck::Verdict::inconclusive;
    return out;
  }

  const double K = static_cast<double>(part.prefix().size());
  for (double k = 1; k <= K; k += 1.0) visit(k);  // k = K is the first continuation ratio
  const double dd = part.d();
  out.inf_ratio = std::min(out.inf_ratio, dd);
  if (!out.violated_at && dd < w2) {
    // Continuation ratios fall to d < w^2: find the first k below w^2.
    const double excess = (dd - 1.0) * (dd - 1.0) - 1.0;
    double k = K + 1.0;
    while (part.block_ratio(k) >= w2) {
      if (excess <= 0.0) break;
      k += 1.0;
    }
    out.violated_at = k;
  }
  out.verdict = out.violated_at ? YClassCheck::Verdict::violated : YClassCheck::Verdict::member;
  return out;
}

/// Block covering: sup_k (A(k+1)-1)/A(k) <= w^2 (up to kYClassRelTol).
///
/// This is what the block-maximum step of the bound needs: every n in block
/// k satisfies n <= w^2 A(k). Past the prefix the ratio of a geometric
/// partition is non-increasing, so visiting k <= K settles it.
inline YClassCheck block_cover_check(const Partition& part, double w, std::size_t K_check = 64) {
  detail::require(w > 1.0, "block_cover_check: requires w > 1");
  const double w2 = w * w * (1.0 + kYClassRelTol);
  YClassCheck out;
  auto visit = [&](double k) {
    const double r = part.block_ratio(k);
    out.inf_ratio = std::min(out.inf_ratio, r);
    out.sup_ratio = std::max(out.sup_ratio, r);
    if (r > w2 && !out.violated_at) out.violated_at = k;
  };
  if (part.kind() == Partition::Kind::generator) {
    for (std::size_t k = 1; k <= K_check; ++k) visit(static_cast<double>(k));
    out.verdict = out.violated_at ? YClassCheck::Verdict::violated : YClassCheck::Verdict::inconclusive;
    return out;
  }
  const double K = static_cast<double>(part.prefix().size());
  for (double k = 1; k <= K; k += 1.0) visit(k);
  out.inf_ratio = std::min(out.inf_ratio, static_cast<double>(part.d()));
  out.verdict = out.violated_at ? YClassCheck::Verdict::violated : YClassCheck::Verdict::member;
  return out;
}

/// v(n): v(1) = 1, strictly increasing, unbounded.
class NormingSequence {
 public:
  /// v_r(n) = [log log(n + e^e - 1)]^r, r >= 1/2.
  static NormingSequence iterated_log(double r) {
    detail::require(r >= 0.5, "NormingSequence: iterated-log exponent r must be >= 1/2");
    NormingSequence v;
    v.r_ = r;
    return v;
  }

  /// User-supplied v with v(1) = 1.
  static NormingSequence custom(std::function<double(double)> fn) {
    detail::require(static_cast<bool>(fn) && fn(1.0) == 1.0, "NormingSequence: custom sequence needs v(1) = 1");
    NormingSequence v;
    v.fn_ = std::move(fn);
    return v;
  }

  bool is_iterated_log() const noexcept { return !fn_; }
  double r() const noexcept { return r_; }

  double operator()(std::int64_t n) const {
    detail::require(n >= 1, "norming_value: requires n >= 1");
    if (fn_) return fn_(static_cast<double>(n));
    if (n == 1) return 1.0;
    return std::pow(std::log(std::log(static_cast<double>(n) + (kEulerPowE - 1.0))), r_);
  }

  /// v(n) given log n, for n far beyond integer range.
  double at_log(double log_n) const {
    detail::require(log_n >= 0.0, "norming_value: requires n >= 1");
    if (fn_) return fn_(std::exp(log_n));
    if (log_n == 0.0) return 1.0;
    // log(n + c) = log n + log1p(c / n)
    const double log_shifted = log_n + std::log1p((kEulerPowE - 1.0) * std::exp(-log_n));
    return std::pow(std::log(log_shifted), r_);
  }

  /// v(n) given log log n for astronomically large n (iterated-log only).
  double at_log_log(double loglog_n) const {
    if (loglog_n < 700.0) return at_log(std::exp(loglog_n));
    if (fn_) return std::numeric_limits<double>::quiet_NaN();
    return std::pow(loglog_n, r_);
  }

 private:
  NormingSequence() = default;
  double r_ = 0.5;
  std::function<double(double)> fn_;
};

inline double norming_value(const NormingSequence& v, std::int64_t n) { return v(n); }

/// How the width w is chosen for a geometric partition in the optimizer.
enum class WidthRule {
  /// Largest w with inf-ratio >= w^2, less 1e-9: w = sqrt(d) - 1e-9.
  /// Under-covers the early blocks when d >= 3; not a valid bound there.
  largest_admissible,
  /// Smallest w with sup-ratio <= w^2: every n in block k has n <= w^2 A(k).
  block_covering,
};

inline constexpr double kWidthEpsilon = 1e-9;

inline double family_width(const Partition& part, WidthRule rule = WidthRule::block_covering) {
  detail::require(part.kind() != Partition::Kind::generator, "family_width: needs an analytic partition");
  const auto probe = class_Y_check(part, 1.0 + 1e-12);
  if (rule == WidthRule::largest_admissible) return std::sqrt(probe.inf_ratio) - kWidthEpsilon;
  return std::sqrt(probe.sup_ratio);
}

}  // namespace lil
