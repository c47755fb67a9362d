#pragma once

// Finite weighted grids standing in for measure spaces, functions on their
// products, ordinary and mixed (anisotropic) Lebesgue-Riesz norms, and the
// two integral inequalities used by the moment bounds.
//
// Axis convention: axis 0 is innermost. Values are stored row-major with
// axis 0 varying fastest, and a mixed norm with exponents (p_1, ..., p_l)
// integrates axis 0 with p_1 first and the last axis with p_l last.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lil/error.hpp"

namespace lil {

/// Relative tolerance for norm identities.
inline constexpr double kIdentityRelTol = 1e-12;
/// Absolute tolerance for inequality slack.
inline constexpr double kSlackAbsTol = 1e-10;

class GridMeasureSpace {
 public:
  explicit GridMeasureSpace(std::vector<double> weights) : weights_(std::move(weights)) {
    detail::require(!weights_.empty(), "GridMeasureSpace: index set must be non-empty");
    for (double w : weights_) {
      detail::require(std::isfinite(w) && w > 0.0, "GridMeasureSpace: every weight must be finite and > 0");
    }
  }

  static GridMeasureSpace counting(std::size_t n) { return GridMeasureSpace(std::vector<double>(n, 1.0)); }

  /// n points of mass 1/n each: a finite uniform probability space.
  static GridMeasureSpace uniform_probability(std::size_t n) {
    detail::require(n > 0, "GridMeasureSpace: index set must be non-empty");
    return GridMeasureSpace(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  std::size_t size() const noexcept { return weights_.size(); }
  double weight(std::size_t i) const { return weights_.at(i); }
  std::span<const double> weights() const noexcept { return weights_; }

  double total_mass() const noexcept { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

  /// Uniform weights summing to one.
  bool is_probability(double tol = kIdentityRelTol) const noexcept {
    if (std::abs(total_mass() - 1.0) > tol) return false;
    const double w0 = weights_.front();
    return std::all_of(weights_.begin(), weights_.end(), [&](double w) { return std::abs(w - w0) <= tol; });
  }

  friend bool operator==(const GridMeasureSpace&, const GridMeasureSpace&) = default;

 private:
  std::vector<double> weights_;
};

/// Exponents p_1..p_l, each >= 1.
class ExponentVector {
 public:
  ExponentVector(std::initializer_list<double> p) : ExponentVector(std::vector<double>(p)) {}
  explicit ExponentVector(std::vector<double> p) : p_(std::move(p)) {
    detail::require(!p_.empty(), "ExponentVector: needs at least one component");
    for (double v : p_) {
      if (!(v >= 1.0) || !std::isfinite(v)) throw invalid_exponent("ExponentVector: components must lie in [1, inf)");
    }
  }

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t k) const { return p_.at(k); }
  std::span<const double> components() const noexcept { return p_; }

  /// p-bar, the largest component.
  double max() const noexcept { return *std::max_element(p_.begin(), p_.end()); }

  friend bool operator==(const ExponentVector&, const ExponentVector&) = default;

 private:
  std::vector<double> p_;
};

class GridFunction {
 public:
  GridFunction(std::vector<GridMeasureSpace> axes, std::vector<double> values)
      : axes_(std::move(axes)), values_(std::move(values)) {
    detail::require(!axes_.empty(), "GridFunction: needs at least one axis");
    if (values_.size() != expected_size()) {
      std::ostringstream msg;
      msg << "GridFunction: expected " << expected_size() << " values, got " << values_.size();
      throw dimension_mismatch(msg.str());
    }
  }

  GridFunction(GridMeasureSpace axis, std::vector<double> values)
      : GridFunction(std::vector<GridMeasureSpace>{std::move(axis)}, std::move(values)) {}

  static GridFunction zeros(std::vector<GridMeasureSpace> axes) {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.size();
    return GridFunction(std::move(axes), std::vector<double>(n, 0.0));
  }

  std::size_t rank() const noexcept { return axes_.size(); }
  const GridMeasureSpace& axis(std::size_t k) const { return axes_.at(k); }
  const std::vector<GridMeasureSpace>& axes() const noexcept { return axes_; }
  std::size_t extent(std::size_t k) const { return axes_.at(k).size(); }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t flat) const { return values_[flat]; }
  double& operator[](std::size_t flat) { return values_[flat]; }

  std::size_t flat_index(std::span<const std::size_t> idx) const {
    if (idx.size() != rank()) throw dimension_mismatch("GridFunction: index rank mismatch");
    std::size_t flat = 0;
    for (std::size_t k = rank(); k-- > 0;) flat = flat * extent(k) + idx[k];
    return flat;
  }

  double at(std::initializer_list<std::size_t> idx) const {
    std::vector<std::size_t> v(idx);
    return values_.at(flat_index(v));
  }

 private:
  std::size_t expected_size() const noexcept {
    std::size_t n = 1;
    for (const auto& a : axes_) n *= a.size();
    return n;
  }

  std::vector<GridMeasureSpace> axes_;
  std::vector<double> values_;
};

namespace detail {

inline double abs_pow(double x, double p) {
  const double a = std::abs(x);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  if (p == 4.0) return (a * a) * (a * a);
  return std::pow(a, p);
}

inline double root(double s, double p) {
  if (p == 1.0) return s;
  if (p == 2.0) return std::sqrt(s);
  if (p == 4.0) return std::sqrt(std::sqrt(s));
  return std::pow(s, 1.0 / p);
}

}  // namespace detail

/// Weighted p-norm of raw values: (sum_i w_i |f_i|^p)^(1/p).
inline double lp_norm(std::span<const double> values, std::span<const double> weights, double p) {
  if (!(p >= 1.0)) throw invalid_exponent("lp_norm: exponent must be >= 1");
  if (values.size() != weights.size()) throw dimension_mismatch("lp_norm: values/weights size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += weights[i] * detail::abs_pow(values[i], p);
  return detail::root(s, p);
}

inline double lp_norm(const GridFunction& f, double p) {
  if (!(p >= 1.0)) throw invalid_exponent("lp_norm: exponent must be >= 1");
  if (f.rank() != 1) throw dimension_mismatch("lp_norm: expects a single-factor space (flatten products first)");
  return lp_norm(f.values(), f.axis(0).weights(), p);
}

/// Collapses a product grid onto one axis carrying the product measure.
inline GridFunction flatten(const GridFunction& f) {
  std::vector<double> w(f.size(), 1.0);
  std::size_t stride = 1;
  for (std::size_t k = 0; k < f.rank(); ++k) {
    const auto& ax = f.axis(k);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] *= ax.weight((i / stride) % ax.size());
    stride *= ax.size();
  }
  return GridFunction(GridMeasureSpace(std::move(w)), std::vector<double>(f.values().begin(), f.values().end()));
}

/// Reorders axes: axis k of the result is axis order[k] of f.
inline GridFunction permute_axes(const GridFunction& f, std::span<const std::size_t> order) {
  const std::size_t l = f.rank();
  if (order.size() != l) throw dimension_mismatch("permute_axes: order length must equal rank");
  std::vector<bool> seen(l, false);
  for (std::size_t a : order) {
    detail::require(a < l && !seen[a], "permute_axes: order must be a permutation of the axes");
    seen[a] = true;
  }
  std::vector<GridMeasureSpace> axes;
  axes.reserve(l);
  for (std::size_t k = 0; k < l; ++k) axes.push_back(f.axis(order[k]));

  std::vector<std::size_t> old_stride(l, 1);
  for (std::size_t k = 1; k < l; ++k) old_stride[k] = old_stride[k - 1] * f.extent(k - 1);

  std::vector<double> out(f.size());
  std::vector<std::size_t> idx(l, 0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    std::size_t old_flat = 0;
    for (std::size_t k = 0; k < l; ++k) old_flat += idx[k] * old_stride[order[k]];
    out[j] = f[old_flat];
    for (std::size_t k = 0; k < l; ++k) {
      if (++idx[k] < axes[k].size()) break;
      idx[k] = 0;
    }
  }
  return GridFunction(std::move(axes), std::move(out));
}

/// h(x, y) = a(x) * b(y) with the axes of a innermost.
inline GridFunction tensor_product(const GridFunction& a, const GridFunction& b) {
  std::vector<GridMeasureSpace> axes = a.axes();
  axes.insert(axes.end(), b.axes().begin(), b.axes().end());
  std::vector<double> v(a.size() * b.size());
  for (std::size_t j = 0; j < b.size(); ++j)
    for (std::size_t i = 0; i < a.size(); ++i) v[j * a.size() + i] = a[i] * b[j];
  return GridFunction(std::move(axes), std::move(v));
}

/// Reusable mixed-norm evaluator for a fixed shape; keeps a scratch buffer so
/// repeated evaluation (e.g. once per simulation step) does not allocate.
class MixedNormEvaluator {
 public:
  MixedNormEvaluator(std::vector<GridMeasureSpace> axes, ExponentVector p) : axes_(std::move(axes)), p_(std::move(p)) {
    if (axes_.size() != p_.size()) throw dimension_mismatch("mixed_norm: number of factors must equal length of p");
    std::size_t n = 1;
    for (const auto& a : axes_) n *= a.size();
    size_ = n;
    scratch_.resize(n / axes_.front().size());
  }

  std::size_t size() const noexcept { return size_; }

  double operator()(std::span<const double> values) const {
    if (values.size() != size_) throw dimension_mismatch("mixed_norm: value count does not match the grid");
    // First level reads from `values`, later levels reduce in place.
    std::size_t len = size_;
    std::span<const double> src = values;
    for (std::size_t k = 0; k < axes_.size(); ++k) {
      const auto w = axes_[k].weights();
      const std::size_t n = w.size();
      const std::size_t outer = len / n;
      const double pk = p_[k];
      for (std::size_t j = 0; j < outer; ++j) {
        double s = 0.0;
        const double* row = src.data() + j * n;
        for (std::size_t i = 0; i < n; ++i) s += w[i] * detail::abs_pow(row[i], pk);
        scratch_[j] = detail::root(s, pk);
      }
      len = outer;
      src = std::span<const double>(scratch_.data(), len);
    }
    return scratch_[0];
  }

 private:
  std::vector<GridMeasureSpace> axes_;
  ExponentVector p_;
  std::size_t size_ = 0;
  mutable std::vector<double> scratch_;
};

inline double mixed_norm(const GridFunction& f, const ExponentVector& p) {
  if (f.rank() != p.size()) throw dimension_mismatch("mixed_norm: number of factors must equal length of p");
  return MixedNormEvaluator(f.axes(), p)(f.values());
}

/// Iterated norm with an explicit integration order: the k-th integration
/// runs over axis order[k] with exponent p[k].
inline double mixed_norm(const GridFunction& f, const ExponentVector& p, std::span<const std::size_t> order) {
  if (f.rank() != p.size()) throw dimension_mismatch("mixed_norm: number of factors must equal length of p");
  return mixed_norm(permute_axes(f, order), p);
}

/// |xi|_{pm, Omega; p, X} - |xi|_{p, X; mp, Omega} for xi on X x Omega
/// (Omega is the last axis). Non-negative up to rounding: the generalized
/// Minkowski inequality.
inline double minkowski_slack(const GridFunction& f, double p, double m) {
  if (!(p >= 1.0) || !(m >= 1.0)) throw invalid_exponent("minkowski_slack: need p >= 1 and m >= 1");
  if (f.rank() < 2) throw dimension_mismatch("minkowski_slack: expects X x Omega");
  const std::size_t l = f.rank();
  if (!f.axis(l - 1).is_probability())
    throw std::invalid_argument("minkowski_slack: the last factor must be a uniform probability grid");

  std::vector<double> lhs_p(l, p);
  lhs_p.back() = m * p;
  const double lhs = mixed_norm(f, ExponentVector(lhs_p));

  std::vector<std::size_t> order(l);
  order[0] = l - 1;
  for (std::size_t k = 1; k < l; ++k) order[k] = k - 1;
  std::vector<double> rhs_p(l, p);
  rhs_p.front() = m * p;
  const double rhs = mixed_norm(f, ExponentVector(rhs_p), order);
  return rhs - lhs;
}

/// |phi|_{r, Z; p, X} - |phi|_{p, X; r, Z} for phi on X_1 x ... x X_l x Z
/// (Z is the last axis). Requires r >= max(p).
inline double permutation_slack(const GridFunction& f, const ExponentVector& p, double r) {
  const std::size_t l = p.size();
  if (f.rank() != l + 1) throw dimension_mismatch("permutation_slack: expects rank = len(p) + 1");
  if (!(r >= p.max())) throw precondition_error("permutation_slack: requires r >= max(p)");

  std::vector<double> lhs_p(p.components().begin(), p.components().end());
  lhs_p.push_back(r);
  const double lhs = mixed_norm(f, ExponentVector(lhs_p));

  std::vector<std::size_t> order(l + 1);
  order[0] = l;
  for (std::size_t k = 0; k < l; ++k) order[k + 1] = k;
  std::vector<double> rhs_p{r};
  rhs_p.insert(rhs_p.end(), p.components().begin(), p.components().end());
  const double rhs = mixed_norm(f, ExponentVector(rhs_p), order);
  return rhs - lhs;
}

}  // namespace lil
