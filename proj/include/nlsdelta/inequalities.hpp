#pragma once

// Numerical bench for the functional inequalities used in the analysis:
// logarithmic Hardy, Sobolev, radial Strauss, Gagliardo-Nirenberg and the
// Lipschitz bound on the power nonlinearity. Every result is an empirical
// ratio; nothing here proves a bound.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "nlsdelta/errors.hpp"
#include "nlsdelta/functionals.hpp"
#include "nlsdelta/grid.hpp"
#include "nlsdelta/model.hpp"
#include "nlsdelta/specfun.hpp"
#include "nlsdelta/state.hpp"
#include "nlsdelta/virial.hpp"

namespace nlsdelta {

/// sqrt(||f||^2 + ||f'||^2) of a node field, with f = 0 past r_max.
inline double h1_norm(const RadialGrid& grid, std::span<const cplx> f) {
  return std::sqrt(norm_sq(grid, f) + dirichlet_form(grid, f));
}

/// Int_{r < 1/2} |u|^a / (r^2 |log r|^b) dx. |u|^a is constant per cell and the
/// weight is integrated exactly: Int dr / (r |log r|^b) = t^{1-b} / (b-1), t = -log r.
inline double log_hardy_integral(const RadialGrid& grid, std::span<const cplx> u, double a, double b) {
  check_shape(grid, u.size(), "log_hardy_integral");
  if (!(b > 1.0)) fail(ErrorKind::hypothesis_violated, "log_hardy: needs b > 1");
  const double h = grid.spacing();
  auto primitive = [&](double r) { return r <= 0.0 ? 0.0 : std::pow(-std::log(r), 1.0 - b) / (b - 1.0); };
  double acc = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double lo = double(j) * h;
    if (lo >= 0.5) break;
    const double hi = std::min(double(j + 1) * h, 0.5);
    acc += abs_pow(u[j], a) * (primitive(hi) - primitive(lo));
  }
  return 2.0 * pi * acc;
}

/// Log-Hardy integral over ||u||_{H^1}^a. Gate: 1 < a, b finite, 1 + a - b < 0.
inline double log_hardy_ratio(const RadialGrid& grid, std::span<const cplx> u, double a, double b) {
  if (!(a > 1.0) || !std::isfinite(a) || !std::isfinite(b))
    fail(ErrorKind::hypothesis_violated, "log_hardy: needs 1 < a and finite b");
  if (!(1.0 + a - b < 0.0))
    fail(ErrorKind::hypothesis_violated, "log_hardy: needs 1 + a - b < 0, got " + std::to_string(1.0 + a - b));
  const double nrm = h1_norm(grid, u);
  if (!(nrm > 0.0)) fail(ErrorKind::parameter, "log_hardy: zero field");
  return log_hardy_integral(grid, u, a, b) / std::pow(nrm, a);
}

/// ||u||_rho / ||u||_{H^1_alpha}.
inline double sobolev_ratio(const DecomposedState& s, double rho) {
  if (!(rho >= 2.0)) fail(ErrorKind::parameter, "sobolev_ratio: needs rho >= 2");
  const NormReport n = norms(s, rho);
  if (!(n.h1_alpha > 0.0)) fail(ErrorKind::parameter, "sobolev_ratio: zero state");
  return n.lp / n.h1_alpha;
}

/// sup_{r >= r_min} r^{1/2} |u(r)| / (||u||^{1/2} ||u'||^{1/2}).
inline double strauss_ratio(const RadialGrid& grid, std::span<const cplx> u, double r_min) {
  check_shape(grid, u.size(), "strauss_ratio");
  if (!(r_min > 0.0)) fail(ErrorKind::parameter, "strauss_ratio: needs r_min > 0");
  double sup = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j)
    if (grid.node(j) >= r_min) sup = std::max(sup, std::sqrt(grid.node(j)) * std::abs(u[j]));
  const double den = std::pow(norm_sq(grid, u) * dirichlet_form(grid, u), 0.25);
  if (!(den > 0.0)) fail(ErrorKind::parameter, "strauss_ratio: zero or constant field");
  return sup / den;
}

/// ||u||_{p+1} / (||u||_2^{2/(p+1)} ||u||_{H^1_alpha}^{1 - 2/(p+1)}); its supremum is C_GN.
inline double gagliardo_nirenberg_ratio(const DecomposedState& s, double p) {
  check_power(p);
  const NormReport n = norms(s, p + 1.0);
  const double th = 2.0 / (p + 1.0);
  const double den = std::pow(std::sqrt(n.mass), th) * std::pow(n.h1_alpha, 1.0 - th);
  if (!(den > 0.0)) fail(ErrorKind::parameter, "gagliardo_nirenberg_ratio: zero state");
  return n.lp / den;
}

/// Sufficient small-mass bound 2 C^{-4} for global existence at p = 3.
inline double cubic_mass_threshold(double c_gn) { return 2.0 / std::pow(c_gn, 4.0); }

/// ||g(u)||_{L^r} with g(u) = |u|^{p-1} u over the total field.
inline double nonlinearity_lr_norm(const DecomposedState& s, double p, double r) {
  check_power(p);
  const Field u = total_field(s);
  Field g(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) g[j] = abs_pow(u[j], p - 1.0) * u[j];
  return lp_norm(s.grid(), g, r);
}

struct StatePair {
  DecomposedState u;
  DecomposedState v;
};

struct KatoReport {
  double r_prime = 0.0;
  double worst_ratio = 0.0;  // max ||g(u) - g(v)||_{r'} / ||u - v||_2
  double fitted_C = 0.0;     // max ratio / (||u||^{p-1}_{H^1_alpha} + ||v||^{p-1}_{H^1_alpha})
  double max_h1 = 0.0;       // largest H^1_alpha norm met
  int pairs_used = 0;
  int pairs_skipped = 0;     // u = v
};

/// Lipschitz bound of g from L^2 into L^{r'}, r' = 2 - eps.
inline KatoReport kato_lipschitz_check(const std::vector<StatePair>& pairs, double p, double eps) {
  check_power(p);
  if (!(eps > 0.0 && eps < 1.0)) fail(ErrorKind::parameter, "kato_lipschitz_check: eps must lie in (0, 1)");
  KatoReport rep;
  rep.r_prime = 2.0 - eps;
  for (const auto& pr : pairs) {
    const Field u = total_field(pr.u);
    const Field v = total_field(change_lambda(pr.v, pr.u.kernel));
    Field du(u.size()), dg(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
      du[j] = u[j] - v[j];
      dg[j] = abs_pow(u[j], p - 1.0) * u[j] - abs_pow(v[j], p - 1.0) * v[j];
    }
    const double den = std::sqrt(norm_sq(pr.u.grid(), du));
    if (!(den > 0.0)) {
      ++rep.pairs_skipped;
      continue;
    }
    const double ratio = lp_norm(pr.u.grid(), dg, rep.r_prime) / den;
    const double hu = norms(pr.u).h1_alpha, hv = norms(pr.v).h1_alpha;
    rep.max_h1 = std::max({rep.max_h1, hu, hv});
    rep.worst_ratio = std::max(rep.worst_ratio, ratio);
    rep.fitted_C = std::max(rep.fitted_C, ratio / (std::pow(hu, p - 1.0) + std::pow(hv, p - 1.0)));
    ++rep.pairs_used;
  }
  return rep;
}

// ---------------------------------------------------------------- families

/// Parameters of one random member: a sum of three complex Gaussians plus a free charge.
struct RandomMember {
  double amp[3];
  double width[3];
  double phase[3];
  cplx q;
  double h1_fraction;  // of the declared bound, used when rescaling
};

inline std::vector<RandomMember> random_family(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<RandomMember> out(count);
  for (auto& m : out) {
    for (int k = 0; k < 3; ++k) {
      m.amp[k] = 2.0 * unit(rng) - 1.0;
      m.width[k] = 0.3 * std::pow(10.0, unit(rng));  // log-uniform in [0.3, 3]
      m.phase[k] = 2.0 * pi * unit(rng);
    }
    const double rq = 0.5 * std::sqrt(unit(rng)), tq = 2.0 * pi * unit(rng);
    m.q = std::polar(rq, tq);
    m.h1_fraction = 0.2 + 0.8 * unit(rng);
  }
  return out;
}

/// The member on the kernel's grid; h1_bound > 0 rescales it to h1_fraction * h1_bound.
inline DecomposedState realize(const RandomMember& m, const WorkspacePtr& ws, double h1_bound = 0.0) {
  Field phi = sample(ws->grid(), [](double) { return 0.0; });
  for (std::size_t j = 0; j < phi.size(); ++j) {
    const double r = ws->grid().node(j);
    for (int k = 0; k < 3; ++k) {
      const double t = r / m.width[k];
      phi[j] += std::polar(m.amp[k] * std::exp(-t * t), m.phase[k]);
    }
  }
  DecomposedState s = make_state(ws, std::move(phi), m.q);
  if (h1_bound > 0.0) s = (m.h1_fraction * h1_bound / norms(s).h1_alpha) * s;
  return s;
}

/// u = 1 on r <= 1/2, C^2 decay to 0 at r = 1.
inline Field hardy_bump(const RadialGrid& grid) {
  return sample(grid, [](double r) { return detail::theta(2.0 * r); });
}

inline Field concentrating_gaussian(const RadialGrid& grid, double sigma) {
  return sample(grid, [&](double r) { return std::exp(-(r / sigma) * (r / sigma)); });
}

// ---------------------------------------------------------------- grid honesty

struct RefinedValue {
  double coarse = 0.0;
  double fine = 0.0;
  bool flagged = false;  // relative difference above 10%

  double relative_change() const { return std::abs(fine - coarse) / std::max(std::abs(fine), std::abs(coarse)); }
};

inline constexpr double refinement_flag_threshold = 0.1;

/// Evaluates fn on n and 2 n points over the same radius.
inline RefinedValue refine(const std::function<double(const GridPtr&)>& fn, std::size_t n, double r_max) {
  RefinedValue v;
  v.coarse = fn(make_grid(n, r_max));
  v.fine = fn(make_grid(2 * n, r_max));
  v.flagged = !(v.relative_change() <= refinement_flag_threshold);
  return v;
}

// ---------------------------------------------------------------- singularity signature

struct LogFit {
  std::vector<double> h;
  std::vector<double> value;
  double a = 0.0;
  double b = 0.0;             // slope against log(1/h)
  double max_residual = 0.0;  // largest |value - fit|
};

/// Least-squares value = a + b log(1/h).
inline LogFit fit_log(std::vector<double> h, std::vector<double> value) {
  const std::size_t n = h.size();
  if (n < 2 || value.size() != n) fail(ErrorKind::parameter, "fit_log: needs two or more matching samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(1.0 / h[i]);
    sx += x;
    sy += value[i];
    sxx += x * x;
    sxy += x * value[i];
  }
  LogFit f;
  f.b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.a = (sy - f.b * sx) / n;
  for (std::size_t i = 0; i < n; ++i)
    f.max_residual = std::max(f.max_residual, std::abs(value[i] - f.a - f.b * std::log(1.0 / h[i])));
  f.h = std::move(h);
  f.value = std::move(value);
  return f;
}

/// Squared discrete H^1 norm of the sampled continuum G^lambda for each n.
inline LogFit green_h1_growth(double lambda, const std::vector<std::size_t>& ns, double r_max) {
  std::vector<double> h, v;
  for (std::size_t n : ns) {
    const auto grid = make_grid(n, r_max);
    const GreenParams gp{0.0, cplx{lambda, 0.0}};
    const Field g = sample(*grid, [&](double r) { return green_value(gp, r).real(); });
    h.push_back(grid->spacing());
    v.push_back(norm_sq(*grid, g) + dirichlet_form(*grid, g));
  }
  return fit_log(std::move(h), std::move(v));
}

/// Discrete H^1 norm of cut * G^lambda with cut(r) = r^2 theta(r): quadratic at 0, zero past r = 2.
inline double cutoff_green_h1(double lambda, std::size_t n, double r_max) {
  const auto grid = make_grid(n, r_max);
  const GreenParams gp{0.0, cplx{lambda, 0.0}};
  const Field f = sample(*grid, [&](double r) { return r * r * detail::theta(r) * green_value(gp, r).real(); });
  return h1_norm(*grid, f);
}

}  // namespace nlsdelta
