#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>

#include "nlsdelta/errors.hpp"
#include "nlsdelta/grid.hpp"
#include "nlsdelta/model.hpp"
#include "nlsdelta/state.hpp"

namespace nlsdelta {

/// Delta_alpha u = -Delta_h phi - lambda q G^lambda, defined on the operator domain only.
inline Field apply_delta_alpha(const DecomposedState& s, double domain_tol = default_domain_tol) {
  const double defect = domain_defect(s);
  if (!(defect <= domain_tol))
    fail(ErrorKind::not_in_domain,
         "apply_delta_alpha: domain constraint q = phi(0)/Gamma violated (defect " + std::to_string(defect) + ")");
  Field out = laplacian(s.grid(), s.phi);
  const cplx lq = s.shift() * s.q;
  const auto g = s.kernel->green();
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = -out[j] - lq * g[j];
  return out;
}

/// (z + Delta_alpha)^{-1} f: free solve, then the domain constraint fixes the charge.
inline DecomposedState resolvent(const WorkspacePtr& ws, std::span<const cplx> f) {
  check_shape(ws->grid(), f.size(), "resolvent");
  for (const auto& v : f)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      fail(ErrorKind::numerical_overflow, "resolvent: non-finite source");
  const cplx gamma = ws->coupling();
  if (std::abs(gamma) < 1e-10)
    fail(ErrorKind::singular_resolvent, "resolvent: shift coincides with the eigenvalue (Gamma = 0)");
  Field phi = ws->solve_free(f);
  const cplx q = ws->model().origin_trace(phi) / gamma;
  return DecomposedState{std::move(phi), q, ws};
}

/// Whether Gamma_h has a positive root, i.e. the box is wide enough for a bound state.
inline bool holds_bound_state(const ModelPtr& model) {
  const double e = std::abs(model->eigenvalue());
  if (model->calibration_shift() == e) return true;
  // The outer wall keeps Gamma_h(0+) finite, so a root needs Gamma_h < 0 near 0.
  return make_workspace(model, 1e-14 * e)->coupling().real() < 0.0;
}

/// The lambda > 0 with Gamma_h(lambda) = 0, so -lambda is the discrete eigenvalue.
/// It is |e_alpha| exactly when the model was calibrated there. A box that cuts
/// off the tail of G^{|e_alpha|} moves it, and only this shift gives an
/// eigenvector that satisfies the domain constraint. Needs holds_bound_state.
inline double discrete_bound_shift(const ModelPtr& model) {
  const double e = std::abs(model->eigenvalue());
  if (model->calibration_shift() == e) return e;
  if (!holds_bound_state(model))
    fail(ErrorKind::grid_too_small, "bound_state: r_max is too small to hold the bound state");
  // Gamma_h increases with slope ||G_h^lambda||^2; Newton in log lambda. Gamma_h
  // carries rounding near 1e-12, so the step test stops well above that floor.
  double x = std::log(e);
  for (int k = 0; k < 100; ++k) {
    const auto ws = make_workspace(model, std::exp(x));
    const double slope = std::exp(x) * norm_sq(model->grid(), ws->green());
    const double step = std::clamp(ws->coupling().real() / slope, -1.0, 1.0);
    x -= step;
    if (std::abs(step) <= 1e-9) return std::exp(x);
  }
  fail(ErrorKind::linear_algebra, "discrete_bound_shift: Newton iteration did not converge");
}

/// Normalised eigenstate G_h^lambda / ||G_h^lambda||, phi = 0, at lambda = discrete_bound_shift.
inline DecomposedState bound_state(const ModelPtr& model) {
  const double lambda = discrete_bound_shift(model);
  auto ws = make_workspace(model, lambda);
  const double nrm = std::sqrt(norm_sq(model->grid(), ws->green()));
  return make_state(std::move(ws), Field(model->grid().size(), cplx{0.0, 0.0}), cplx{1.0 / nrm, 0.0});
}

}  // namespace nlsdelta
