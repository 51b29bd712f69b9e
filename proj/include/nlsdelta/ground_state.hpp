#pragma once

// Ground states of Delta_alpha v + omega v - |v|^{p-1} v = 0 by minimising the
// action on the Nehari manifold.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "nlsdelta/errors.hpp"
#include "nlsdelta/functionals.hpp"
#include "nlsdelta/operator.hpp"
#include "nlsdelta/state.hpp"

namespace nlsdelta {

/// s u with s = ((F + omega M) / ||u||_{p+1}^{p+1})^{1/(p-1)}: the unique point of
/// the ray through u on the Nehari manifold.
inline DecomposedState nehari_rescale(const DecomposedState& s, double omega, double p) {
  check_power(p);
  const double linear = quadratic_form(s) + omega * mass(s);
  const double power = power_integral(s, p);
  if (!(linear > 0.0)) fail(ErrorKind::rescale_undefined, "nehari_rescale: F + omega M must be positive");
  if (!(power > 0.0)) fail(ErrorKind::rescale_undefined, "nehari_rescale: zero state");
  return std::pow(linear / power, 1.0 / (p - 1.0)) * s;
}

/// ||Delta_alpha v + omega v - c |v|^{p-1} v||_2; c = 0 gives the linear residual.
inline double stationary_residual(const DecomposedState& s, double omega, double p, double nonlinear_coeff = 1.0,
                                  double domain_tol = default_domain_tol) {
  const Field hv = apply_delta_alpha(s, domain_tol);
  const Field u = total_field(s);
  Field res(u.size());
  for (std::size_t j = 0; j < u.size(); ++j)
    res[j] = hv[j] + omega * u[j] - nonlinear_coeff * abs_pow(u[j], p - 1.0) * u[j];
  return std::sqrt(norm_sq(s.grid(), res));
}

struct GroundStateOptions {
  double lambda_ref = 0.0;  // <= 0: default_lambda_ref(alpha)
  double dtau = 0.1;
  double tol_resid = 1e-6;
  double tol_nehari = 1e-8;
  int max_iters = 20000;
};

struct GroundStateLogEntry {
  int iteration = 0;
  double action = 0.0;
  double residual = 0.0;
};

struct GroundStateReport {
  DecomposedState state;
  double omega = 0.0;
  double p = 0.0;
  double action_value = 0.0;
  double residual = 0.0;  // stationary residual relative to h1_alpha
  double nehari = 0.0;    // nehari residual relative to F + omega M
  int iterations = 0;
  bool converged = false;
  std::vector<GroundStateLogEntry> log;  // accepted iterations only
};

/// Initial guess: Gaussian regular part projected onto the operator domain (q > 0), then rescaled onto Nehari.
inline DecomposedState ground_state_seed(const WorkspacePtr& ws, double omega, double p) {
  Field phi = sample(ws->grid(), [](double r) { return std::exp(-r * r); });
  return nehari_rescale(project_to_domain(ws, std::move(phi)), omega, p);
}

/// Semi-implicit gradient flow: backward Euler through the resolvent at
/// 1/dtau + omega, explicit nonlinearity, Nehari rescale after each step. A step
/// that raises the action is rejected and dtau is halved.
inline GroundStateReport solve_ground_state(const ModelPtr& model, double omega, double p,
                                            const GroundStateOptions& opts = {}) {
  check_power(p);
  const double e = std::abs(model->eigenvalue());
  if (!(omega > e))
    fail(ErrorKind::parameter, "solve_ground_state: omega must exceed |e_alpha| = " + std::to_string(e));
  const double lambda_ref = opts.lambda_ref > 0.0 ? opts.lambda_ref : default_lambda_ref(model->alpha());
  if (!(lambda_ref > e)) fail(ErrorKind::parameter, "solve_ground_state: lambda_ref must exceed |e_alpha|");
  if (!(opts.dtau > 0.0)) fail(ErrorKind::parameter, "solve_ground_state: dtau must be positive");

  const auto ws_ref = make_workspace(model, lambda_ref);

  auto relative_residual = [&](const DecomposedState& v) {
    return stationary_residual(v, omega, p) / norms(v).h1_alpha;
  };

  GroundStateReport rep;
  rep.omega = omega;
  rep.p = p;
  DecomposedState v = ground_state_seed(ws_ref, omega, p);
  double s_cur = action(v, p, Sign::focusing, omega);
  double res_cur = relative_residual(v);
  rep.log.push_back({0, s_cur, res_cur});

  double dtau = opts.dtau;
  WorkspacePtr ws_flow = make_workspace(model, 1.0 / dtau + omega);
  int it = 0;
  int rejections = 0;
  while (it < opts.max_iters) {
    ++it;
    const Field u = total_field(v);
    Field f(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) f[j] = u[j] / dtau + abs_pow(u[j], p - 1.0) * u[j];
    DecomposedState next = nehari_rescale(change_lambda(resolvent(ws_flow, f), ws_ref), omega, p);
    const double s_next = action(next, p, Sign::focusing, omega);
    if (s_next > s_cur + 1e-14 * std::abs(s_cur)) {
      if (++rejections > 60) break;
      dtau *= 0.5;
      ws_flow = make_workspace(model, 1.0 / dtau + omega);
      continue;
    }
    v = std::move(next);
    s_cur = s_next;
    res_cur = relative_residual(v);
    rep.log.push_back({it, s_cur, res_cur});
    if (res_cur <= opts.tol_resid) break;
  }

  // Global phase: q real and positive.
  if (std::abs(v.q) > 0.0) v = (std::conj(v.q) / std::abs(v.q)) * v;
  const FunctionalReport fr = evaluate(v, p, Sign::focusing, omega);
  rep.action_value = fr.action;
  rep.residual = relative_residual(v);
  rep.nehari = std::abs(fr.nehari) / (fr.F + omega * fr.mass);
  rep.iterations = it;
  rep.converged = rep.residual <= opts.tol_resid && rep.nehari <= opts.tol_nehari;
  rep.state = std::move(v);
  return rep;
}

}  // namespace nlsdelta
