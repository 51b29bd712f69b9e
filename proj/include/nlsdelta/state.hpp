#pragma once

// u = phi + q G^lambda on the grid, the change of decomposition shift, and norms.

#include <cmath>
#include <complex>
#include <memory>
#include <span>
#include <utility>

#include "nlsdelta/errors.hpp"
#include "nlsdelta/grid.hpp"
#include "nlsdelta/model.hpp"

namespace nlsdelta {

inline constexpr double default_domain_tol = 1e-6;

/// Regular part phi at the nodes, charge q, and the workspace of the shift the
/// pair refers to (which also carries alpha and the grid).
struct DecomposedState {
  Field phi;
  cplx q{0.0, 0.0};
  WorkspacePtr kernel;

  cplx shift() const { return kernel->shift(); }
  double lambda() const { return kernel->shift().real(); }
  double alpha() const { return kernel->alpha(); }
  const RadialGrid& grid() const { return kernel->grid(); }
  const ModelPtr& model() const { return kernel->model_ptr(); }
};

inline DecomposedState make_state(WorkspacePtr kernel, Field phi, cplx q) {
  if (!kernel) fail(ErrorKind::parameter, "make_state: null workspace");
  check_shape(kernel->grid(), phi.size(), "make_state");
  return DecomposedState{std::move(phi), q, std::move(kernel)};
}

inline DecomposedState zero_state(WorkspacePtr kernel) {
  const std::size_t n = kernel->grid().size();
  return make_state(std::move(kernel), Field(n, cplx{0.0, 0.0}), cplx{0.0, 0.0});
}

/// Node-wise phi_j + q G_j.
inline Field total_field(const DecomposedState& s) {
  const auto g = s.kernel->green();
  Field u(s.phi.size());
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = s.phi[j] + s.q * g[j];
  return u;
}

namespace detail {
inline void require_same_kernel(const DecomposedState& a, const DecomposedState& b, const char* who) {
  if (a.kernel != b.kernel && (a.shift() != b.shift() || a.alpha() != b.alpha() || !(a.grid() == b.grid())))
    fail(ErrorKind::parameter, std::string(who) + ": states refer to different shifts or models");
}
}  // namespace detail

inline DecomposedState operator*(cplx c, const DecomposedState& s) {
  DecomposedState out = s;
  for (auto& v : out.phi) v *= c;
  out.q *= c;
  return out;
}

inline DecomposedState operator*(double c, const DecomposedState& s) { return cplx{c, 0.0} * s; }

inline DecomposedState operator+(const DecomposedState& a, const DecomposedState& b) {
  detail::require_same_kernel(a, b, "operator+");
  DecomposedState out = a;
  for (std::size_t j = 0; j < out.phi.size(); ++j) out.phi[j] += b.phi[j];
  out.q += b.q;
  return out;
}

inline DecomposedState operator-(const DecomposedState& a, const DecomposedState& b) {
  return a + (-1.0) * b;
}

/// Re-expresses the same total field against another kernel:
/// phi' = phi + q (G - G'), q unchanged.
inline DecomposedState change_lambda(const DecomposedState& s, WorkspacePtr target) {
  if (!target) fail(ErrorKind::parameter, "change_lambda: null workspace");
  if (target->model_ptr() != s.model() &&
      (target->alpha() != s.alpha() || !(target->grid() == s.grid())))
    fail(ErrorKind::parameter, "change_lambda: target workspace belongs to another model");
  if (target == s.kernel) return s;
  const auto g_old = s.kernel->green();
  const auto g_new = target->green();
  Field phi(s.phi.size());
  for (std::size_t j = 0; j < phi.size(); ++j) phi[j] = s.phi[j] + s.q * (g_old[j] - g_new[j]);
  return DecomposedState{std::move(phi), s.q, std::move(target)};
}

inline DecomposedState change_lambda(const DecomposedState& s, cplx lambda_new) {
  if (!admissible_shift(lambda_new)) fail(ErrorKind::domain, "change_lambda: shift must avoid (-inf, 0]");
  if (lambda_new == s.shift()) return s;
  return change_lambda(s, make_workspace(s.model(), lambda_new));
}

inline DecomposedState change_lambda(const DecomposedState& s, double lambda_new) {
  return change_lambda(s, cplx{lambda_new, 0.0});
}

/// |q Gamma - phi(0)| / ((|q| + 1) max(|Gamma|, 1)); zero on H^2_alpha.
/// Multiplying through by Gamma keeps the test meaningful at the eigenvalue shift.
inline double domain_defect(const DecomposedState& s) {
  const cplx gamma = s.kernel->coupling();
  return std::abs(s.q * gamma - s.model()->origin_trace(s.phi)) / ((std::abs(s.q) + 1.0) * std::max(std::abs(gamma), 1.0));
}

/// Unique domain element with regular part phi at this kernel: q = phi(0) / Gamma.
inline DecomposedState project_to_domain(WorkspacePtr kernel, Field phi) {
  const cplx gamma = kernel->coupling();
  if (std::abs(gamma) < 1e-10)
    fail(ErrorKind::singular_resolvent, "project_to_domain: Gamma vanishes at this shift");
  const cplx q = kernel->model().origin_trace(phi) / gamma;
  return make_state(std::move(kernel), std::move(phi), q);
}

struct NormReport {
  double mass = 0.0;      // ||u||_2^2
  double l2_phi = 0.0;
  double h1_phi = 0.0;    // sqrt(||phi||^2 + ||grad phi||^2)
  double h1_alpha = 0.0;  // h1_phi + |q|
  double lp = 0.0;        // ||u||_p, p as requested
};

inline NormReport norms(const DecomposedState& s, double p = 2.0) {
  if (!(p >= 1.0)) fail(ErrorKind::parameter, "norms: p must be >= 1");
  const auto& grid = s.grid();
  const Field u = total_field(s);
  NormReport r;
  r.mass = norm_sq(grid, u);
  const double l2 = norm_sq(grid, s.phi);
  r.l2_phi = std::sqrt(l2);
  r.h1_phi = std::sqrt(l2 + dirichlet_form(grid, s.phi));
  r.h1_alpha = r.h1_phi + std::abs(s.q);
  r.lp = lp_norm(grid, u, p);
  return r;
}

}  // namespace nlsdelta
