#pragma once

// Localised virial V = Int eta_R |u|^2, its first two time derivatives, and
// the blow-up certificate for scaled ground states.

#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "nlsdelta/errors.hpp"
#include "nlsdelta/functionals.hpp"
#include "nlsdelta/ground_state.hpp"
#include "nlsdelta/operator.hpp"
#include "nlsdelta/specfun.hpp"
#include "nlsdelta/state.hpp"

namespace nlsdelta {

namespace detail {
// theta(t) = 1 on [0,1], 1 - s^3 (6 s^2 - 15 s + 10) with s = t - 1 on (1,2), 0 after.
inline double theta(double t) {
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  const double s = t - 1.0;
  return 1.0 - s * s * s * (s * (6.0 * s - 15.0) + 10.0);
}
inline double theta_prime(double t) {
  if (t <= 1.0 || t >= 2.0) return 0.0;
  const double s = t - 1.0;
  return -30.0 * s * s * (s - 1.0) * (s - 1.0);
}
// Theta'(t) = Int_0^t theta.
inline double big_theta_prime(double t) {
  if (t <= 1.0) return t;
  if (t >= 2.0) return 1.5;
  const double s = t - 1.0;
  const double s4 = s * s * s * s;
  return 1.0 + s - (s4 * s * s - 3.0 * s4 * s + 2.5 * s4);
}
// Theta(t) = Int_0^t Theta'.
inline double big_theta(double t) {
  if (t <= 1.0) return 0.5 * t * t;
  if (t >= 2.0) return 13.0 / 7.0 + 1.5 * (t - 2.0);
  const double s = t - 1.0;
  const double s5 = s * s * s * s * s;
  return 0.5 + s + 0.5 * s * s - (s5 * s * s / 7.0 - 0.5 * s5 * s + 0.5 * s5);
}
}  // namespace detail

/// Asymptotic slope Theta'(infinity) = Int_0^2 theta.
inline constexpr double cutoff_slope_limit = 1.5;

struct CutoffValues {
  double eta = 0.0;
  double d1 = 0.0;   // eta'
  double d2 = 0.0;   // eta''
  double d3 = 0.0;   // eta'''
  double lap = 0.0;  // eta'' + eta'/r
};

/// eta_R(r) = R^2 Theta(r/R) and its radial derivatives.
inline CutoffValues cutoff_eval(double R, double r) {
  if (!(R > 0.0)) fail(ErrorKind::parameter, "cutoff_eval: R must be positive");
  if (!(r >= 0.0)) fail(ErrorKind::domain, "cutoff_eval: r must be non-negative");
  const double t = r / R;
  CutoffValues c;
  c.eta = R * R * detail::big_theta(t);
  c.d1 = R * detail::big_theta_prime(t);
  c.d2 = detail::theta(t);
  c.d3 = detail::theta_prime(t) / R;
  c.lap = r > 0.0 ? c.d2 + c.d1 / r : 2.0;
  return c;
}

inline double default_virial_radius(const RadialGrid& grid) { return grid.r_max() / 4.0; }

inline double virial_V(const DecomposedState& s, double R) {
  const auto& grid = s.grid();
  const Field u = total_field(s);
  const auto w = grid.weights();
  double acc = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) acc += w[j] * cutoff_eval(R, grid.node(j)).eta * std::norm(u[j]);
  return acc;
}

/// 2 Im Int eta' u_r conj(u), with u_r = phi_r + q G'.
inline double virial_Vprime(const DecomposedState& s, double R) {
  const auto& grid = s.grid();
  const Field u = total_field(s);
  const Field dphi = radial_derivative(grid, s.phi);
  const auto& jet = s.kernel->continuum_jet();
  double acc = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double r = grid.node(j);
    const cplx ur = dphi[j] + s.q * jet[j].d1;
    acc += grid.weights()[j] * cutoff_eval(R, r).d1 * (ur * std::conj(u[j])).imag();
  }
  return 2.0 * acc;
}

struct VirialBreakdown {
  double four_P = 0.0;
  double rem_p1 = 0.0;
  double rem_uHu = 0.0;
  double rem_grad = 0.0;
  double rem_cross = 0.0;
  double rem_GG = 0.0;
  double total = 0.0;

  double remainder() const { return rem_p1 + rem_uHu + rem_grad + rem_cross + rem_GG; }
};

/// V'' = 4P + remainder, each remainder integral reported separately. Only the
/// focusing equation is covered.
inline VirialBreakdown virial_Vsecond(const DecomposedState& s, double R, double p, Sign sign = Sign::focusing,
                                      double domain_tol = default_domain_tol) {
  if (sign != Sign::focusing)
    fail(ErrorKind::inapplicable_sign, "virial_Vsecond: the breakdown is derived for the focusing equation only");
  check_power(p);
  if (!s.kernel->real_shift()) fail(ErrorKind::domain, "virial_Vsecond: needs a real decomposition shift");
  const auto& grid = s.grid();
  const auto w = grid.weights();
  const Field u = total_field(s);
  const Field hu = apply_delta_alpha(s, domain_tol);
  const Field dphi = radial_derivative(grid, s.phi);
  const auto g = s.kernel->green();
  const double lambda = s.lambda();
  const auto& jet = s.kernel->continuum_jet();

  VirialBreakdown b;
  b.four_P = 4.0 * pohozaev(s, p);
  double p1 = 0.0, uhu = 0.0, grad = 0.0, cross = 0.0, gg = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double r = grid.node(j);
    const CutoffValues c = cutoff_eval(R, r);
    const double lap2 = c.lap - 2.0;
    const double dphi2 = std::norm(dphi[j]);
    grad += w[j] * (4.0 * c.d2 - 2.0 * c.lap) * dphi2;
    if (lap2 == 0.0) continue;  // core r <= R: the other terms vanish identically
    p1 += w[j] * lap2 * abs_pow(u[j], p + 1.0);
    uhu += w[j] * lap2 * (u[j] * std::conj(hu[j])).real();
    gg += w[j] * lap2 * std::norm(g[j]);
    // psi = eta' - r vanishes on the core; the x-part contributes nothing real.
    const double psi = c.d1 - r, dpsi = c.d2 - 1.0, ddpsi = c.d3;
    const GreenJet& gj = jet[j];
    const cplx div_psi_g = (dpsi + psi / r) * gj.g + psi * gj.d1;
    const cplx f1 = dpsi * gj.d1 + psi * gj.d2;
    const cplx f2 = ddpsi * gj.d1 + 2.0 * dpsi * gj.d2 + psi * gj.d3;
    const cplx lap_psi_dg = f2 + f1 / r;
    cross += w[j] * (std::conj(s.q) * lambda * s.phi[j] * div_psi_g - s.q * std::conj(s.phi[j]) * lap_psi_dg).real();
  }
  b.rem_p1 = -2.0 * (p - 1.0) / (p + 1.0) * p1;
  b.rem_uHu = 2.0 * uhu;
  b.rem_grad = grad;
  b.rem_cross = 4.0 * cross;
  b.rem_GG = 2.0 * lambda * std::norm(s.q) * gg;
  b.total = b.four_P + b.rem_p1 + b.rem_uHu + b.rem_grad + b.rem_cross + b.rem_GG;
  return b;
}

struct BlowupCertificate {
  double omega = 0.0;
  double p = 0.0;
  double action_u0 = 0.0;
  double action_ground = 0.0;
  double energy_u0 = 0.0;
  double pohozaev_u0 = 0.0;
  double margin_action = 0.0;    // S(v) - S(u0), needs > 0
  double margin_energy = 0.0;    // E(u0), needs >= 0
  double margin_pohozaev = 0.0;  // -P(u0), needs > 0
  double pohozaev_bound = 0.0;   // 2 (S(u0) - S(v)): P stays below this along the flow
  double delta = 0.0;            // 2 (S(v) - S(u0))
  double c2 = 0.0;               // delta / 2
  bool hypothesis_applicable = false;  // 3 < p <= 5
  bool holds = false;

  std::string describe() const {
    return "S(v)-S(u0)=" + std::to_string(margin_action) + " E(u0)=" + std::to_string(margin_energy) +
           " -P(u0)=" + std::to_string(margin_pohozaev) + (hypothesis_applicable ? "" : " (p outside (3,5])");
  }
};

inline BlowupCertificate blowup_certificate(const DecomposedState& u0, const GroundStateReport& ground, double p) {
  if (!ground.converged) fail(ErrorKind::unusable_reference, "blowup_certificate: ground state did not converge");
  check_power(p);
  BlowupCertificate c;
  c.omega = ground.omega;
  c.p = p;
  const DecomposedState u = change_lambda(u0, ground.state.kernel);
  const FunctionalReport fu = evaluate(u, p, Sign::focusing, c.omega);
  c.action_u0 = fu.action;
  c.action_ground = action(ground.state, p, Sign::focusing, c.omega);
  c.energy_u0 = fu.energy;
  c.pohozaev_u0 = fu.pohozaev;
  c.margin_action = c.action_ground - c.action_u0;
  c.margin_energy = c.energy_u0;
  c.margin_pohozaev = -c.pohozaev_u0;
  c.pohozaev_bound = 2.0 * (c.action_u0 - c.action_ground);
  c.delta = -c.pohozaev_bound;
  c.c2 = 0.5 * c.delta;
  c.hypothesis_applicable = p > 3.0 && p <= 5.0;
  c.holds = c.hypothesis_applicable && c.margin_action > 0.0 && c.margin_energy >= 0.0 && c.margin_pohozaev > 0.0;
  return c;
}

}  // namespace nlsdelta
