#pragma once

// Mass, quadratic form, energy, action, Pohozaev and Nehari functionals.

#include <cmath>
#include <string>

#include "nlsdelta/errors.hpp"
#include "nlsdelta/grid.hpp"
#include "nlsdelta/state.hpp"

namespace nlsdelta {

/// Focusing is the minus sign in i u_t = Delta_alpha u -/+ |u|^{p-1} u.
enum class Sign { focusing, defocusing };

inline double nonlinear_sign(Sign s) { return s == Sign::focusing ? -1.0 : 1.0; }

inline std::string to_string(Sign s) { return s == Sign::focusing ? "focusing" : "defocusing"; }

/// S = E + (omega/2) M by default; `full_omega` is E + omega M, for sensitivity checks.
enum class ActionConvention { half_omega, full_omega };

inline void check_power(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) fail(ErrorKind::parameter, "nonlinearity power must satisfy p > 1");
}

/// F(u) = ||grad phi||^2 + lambda (||phi||^2 - ||u||^2) + Gamma |q|^2. Requires a
/// real shift with lambda >= |e_alpha| (equality is allowed for the bound state).
inline double quadratic_form(const DecomposedState& s) {
  if (!s.kernel->real_shift()) fail(ErrorKind::domain, "quadratic_form: needs a real decomposition shift");
  const double lambda = s.lambda();
  const double e = std::abs(s.model()->eigenvalue());
  if (lambda < e * (1.0 - 1e-12))
    fail(ErrorKind::shift_too_small, "quadratic_form: lambda must not be below |e_alpha| = " + std::to_string(e));
  const auto& grid = s.grid();
  const Field u = total_field(s);
  return dirichlet_form(grid, s.phi) + lambda * (norm_sq(grid, s.phi) - norm_sq(grid, u)) +
         s.kernel->coupling().real() * std::norm(s.q);
}

inline double mass(const DecomposedState& s) { return norm_sq(s.grid(), total_field(s)); }

/// ||u||_{p+1}^{p+1}.
inline double power_integral(const DecomposedState& s, double p) {
  const Field u = total_field(s);
  double acc = 0.0;
  const auto w = s.grid().weights();
  for (std::size_t j = 0; j < u.size(); ++j) acc += w[j] * abs_pow(u[j], p + 1.0);
  return acc;
}

inline double energy(const DecomposedState& s, double p, Sign sign) {
  check_power(p);
  return 0.5 * quadratic_form(s) + nonlinear_sign(sign) * power_integral(s, p) / (p + 1.0);
}

inline double action(const DecomposedState& s, double p, Sign sign, double omega,
                     ActionConvention convention = ActionConvention::half_omega) {
  const double factor = convention == ActionConvention::half_omega ? 0.5 : 1.0;
  return energy(s, p, sign) + factor * omega * mass(s);
}

inline double pohozaev(const DecomposedState& s, double p) {
  check_power(p);
  return quadratic_form(s) - (p - 1.0) / (p + 1.0) * power_integral(s, p) + std::norm(s.q) / (4.0 * pi);
}

inline double nehari_residual(const DecomposedState& s, double p, double omega) {
  check_power(p);
  return quadratic_form(s) + omega * mass(s) - power_integral(s, p);
}

struct FunctionalReport {
  double mass = 0.0;
  double F = 0.0;
  double energy = 0.0;
  double action = 0.0;
  double pohozaev = 0.0;
  double nehari = 0.0;
  double power = 0.0;  // ||u||_{p+1}^{p+1}
  double lambda_used = 0.0;
  double p = 0.0;
  double omega = 0.0;
  Sign sign = Sign::focusing;
};

/// All functionals from one pass over the state.
inline FunctionalReport evaluate(const DecomposedState& s, double p, Sign sign, double omega = 0.0,
                                 ActionConvention convention = ActionConvention::half_omega) {
  check_power(p);
  FunctionalReport r;
  r.p = p;
  r.sign = sign;
  r.omega = omega;
  r.lambda_used = s.lambda();
  r.F = quadratic_form(s);
  const Field u = total_field(s);
  const auto w = s.grid().weights();
  for (std::size_t j = 0; j < u.size(); ++j) {
    r.mass += w[j] * std::norm(u[j]);
    r.power += w[j] * abs_pow(u[j], p + 1.0);
  }
  r.energy = 0.5 * r.F + nonlinear_sign(sign) * r.power / (p + 1.0);
  r.action = r.energy + (convention == ActionConvention::half_omega ? 0.5 : 1.0) * omega * r.mass;
  r.pohozaev = r.F - (p - 1.0) / (p + 1.0) * r.power + std::norm(s.q) / (4.0 * pi);
  r.nehari = r.F + omega * r.mass - r.power;
  return r;
}

}  // namespace nlsdelta
