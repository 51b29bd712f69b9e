#pragma once

// Initial data: projected Gaussians, certified multiples of a ground state, and
// snapshot reloads.

#include <cmath>
#include <optional>
#include <string>

#include "nlsdelta/errors.hpp"
#include "nlsdelta/ground_state.hpp"
#include "nlsdelta/io.hpp"
#include "nlsdelta/state.hpp"
#include "nlsdelta/virial.hpp"

namespace nlsdelta {

enum class InitialKind { gaussian, scaled_ground_state, custom_snapshot };

inline std::string to_string(InitialKind k) {
  switch (k) {
    case InitialKind::gaussian: return "gaussian";
    case InitialKind::scaled_ground_state: return "scaled_ground_state";
    case InitialKind::custom_snapshot: return "custom_snapshot";
  }
  return "?";
}

enum class ChargeMode { project, zero };

struct GaussianParams {
  double amplitude = 1.0;
  double sigma = 1.0;
  ChargeMode charge = ChargeMode::project;
  double projection_shift = 0.0;  // <= 0: the target kernel's shift
  double target_mass = 0.0;       // > 0: rescale the result to this discrete mass
};

struct ScaledGroundParams {
  double omega = 2.0;
  double p = 4.0;
  double c = 0.0;        // > 1: try this multiple first; otherwise search
  double c_max = 2.0;
  GroundStateOptions ground;
};

struct InitialDataParams {
  GaussianParams gaussian;
  ScaledGroundParams scaled;
  std::string snapshot_path;
};

/// phi = A exp(-(r/sigma)^2) with charge from one domain projection (or none),
/// expressed at `ws`.
inline DecomposedState gaussian_data(const WorkspacePtr& ws, const GaussianParams& g) {
  if (!(g.sigma > 0.0)) fail(ErrorKind::parameter, "gaussian: sigma must be positive");
  if (!std::isfinite(g.amplitude)) fail(ErrorKind::parameter, "gaussian: amplitude must be finite");
  if (g.target_mass < 0.0) fail(ErrorKind::parameter, "gaussian: mass must be non-negative");
  Field phi = sample(ws->grid(), [&](double r) {
    const double t = r / g.sigma;
    return g.amplitude * std::exp(-t * t);
  });
  DecomposedState s;
  if (g.charge == ChargeMode::zero) {
    s = make_state(ws, std::move(phi), cplx{0.0, 0.0});
  } else {
    const double shift = g.projection_shift > 0.0 ? g.projection_shift : ws->shift().real();
    const WorkspacePtr proj = shift == ws->shift().real() && ws->real_shift() ? ws : make_workspace(ws->model_ptr(), shift);
    s = change_lambda(project_to_domain(proj, std::move(phi)), ws);
  }
  if (g.target_mass > 0.0) {
    const double m = mass(s);
    if (!(m > 0.0)) fail(ErrorKind::rescale_undefined, "gaussian: zero state cannot be rescaled to a mass");
    s = std::sqrt(g.target_mass / m) * s;
  }
  return s;
}

struct ScaledGroundResult {
  DecomposedState state;
  GroundStateReport ground;
  BlowupCertificate certificate;
  double c = 1.0;
  double c_energy_zero = 1.0;  // largest c on the ray with E(c v) >= 0, capped at c_max
};

/// c v_omega with the blow-up certificate satisfied. A requested c is used when
/// it certifies; otherwise c is the midpoint of (1, c_E], where c_E is the
/// bisected zero of E(c v) (S and P margins are positive for every c > 1).
inline ScaledGroundResult scaled_ground_data(const WorkspacePtr& ws, const GroundStateReport& ground,
                                             const ScaledGroundParams& sp) {
  if (!(sp.c_max > 1.0)) fail(ErrorKind::parameter, "scaled_ground_state: c_max must exceed 1");
  if (!ground.converged) fail(ErrorKind::unusable_reference, "scaled_ground_state: ground state did not converge");
  const double p = ground.p;
  const DecomposedState v = change_lambda(ground.state, ws);

  ScaledGroundResult out;
  out.ground = ground;
  auto try_c = [&](double c) {
    out.c = c;
    out.state = c * v;
    out.certificate = blowup_certificate(out.state, ground, p);
    return out.certificate.holds;
  };

  // E(c v) = c^2 F / 2 - c^{p+1} L / (p+1) is positive then negative on c > 0.
  auto energy_at = [&](double c) { return energy(c * v, p, Sign::focusing); };
  if (energy_at(sp.c_max) >= 0.0) {
    out.c_energy_zero = sp.c_max;
  } else if (energy_at(1.0) < 0.0) {
    out.c_energy_zero = 1.0;
  } else {
    double lo = 1.0, hi = sp.c_max;
    for (int k = 0; k < 200 && hi - lo > 1e-14; ++k) {
      const double mid = 0.5 * (lo + hi);
      (energy_at(mid) >= 0.0 ? lo : hi) = mid;
    }
    out.c_energy_zero = lo;
  }

  if (sp.c > 1.0 && sp.c <= sp.c_max && try_c(sp.c)) return out;
  if (out.c_energy_zero > 1.0 && try_c(0.5 * (1.0 + out.c_energy_zero))) return out;
  if (!(out.c_energy_zero > 1.0)) try_c(sp.c > 1.0 && sp.c <= sp.c_max ? sp.c : std::min(1.1, sp.c_max));  // margins for the report
  fail(ErrorKind::certificate_unsatisfiable,
       "scaled_ground_state: no c in (1, " + std::to_string(sp.c_max) + "] satisfies the certificate; at c=" +
           std::to_string(out.c) + ": " + out.certificate.describe());
}

inline ScaledGroundResult scaled_ground_data(const WorkspacePtr& ws, const ScaledGroundParams& sp) {
  return scaled_ground_data(ws, solve_ground_state(ws->model_ptr(), sp.omega, sp.p, sp.ground), sp);
}

/// Snapshot reload, re-expressed at `ws`. Grid and alpha must match.
inline DecomposedState snapshot_data(const WorkspacePtr& ws, const std::string& path) {
  const Snapshot snap = read_snapshot(path);
  return change_lambda(snapshot_to_state(snap, ws->model_ptr()), ws);
}

inline DecomposedState make_initial_data(InitialKind kind, const InitialDataParams& params, const WorkspacePtr& ws) {
  switch (kind) {
    case InitialKind::gaussian: return gaussian_data(ws, params.gaussian);
    case InitialKind::scaled_ground_state: return scaled_ground_data(ws, params.scaled).state;
    case InitialKind::custom_snapshot: return snapshot_data(ws, params.snapshot_path);
  }
  fail(ErrorKind::parameter, "make_initial_data: unknown kind");
}

}  // namespace nlsdelta
