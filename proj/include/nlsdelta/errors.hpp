#pragma once

#include <stdexcept>
#include <string>

namespace nlsdelta {

enum class ErrorKind {
  domain,              // argument outside the admissible set
  unsupported_order,   // Bessel order other than 0 or 1
  shape,               // field length does not match the grid
  grid_too_small,
  not_in_domain,       // operator applied off H^2_alpha
  singular_resolvent,  // shift sits on the eigenvalue
  linear_algebra,
  shift_too_small,     // quadratic form used with lambda <= |e_alpha|
  rescale_undefined,
  parameter,
  numerical_overflow,
  certificate_unsatisfiable,
  unusable_reference,
  inapplicable_sign,
  hypothesis_violated,
  config,
  io,
};

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace nlsdelta
