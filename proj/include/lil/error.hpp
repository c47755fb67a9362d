#pragma once

#include <stdexcept>
#include <string>

namespace lil {

/// Raised when a documented precondition of an operation does not hold
/// (for example a partition outside the requested class, or r < p-bar).
class precondition_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised for exponents outside [1, inf).
class invalid_exponent : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when two objects that must share a shape do not.
class dimension_mismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

inline void require_domain(bool ok, const std::string& what) {
  if (!ok) throw std::domain_error(what);
}

}  // namespace detail
}  // namespace lil
