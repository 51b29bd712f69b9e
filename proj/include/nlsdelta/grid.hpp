#pragma once

// Staggered radial mesh on [0, r_max] for radial functions on R^2, with the
// quadrature and finite-difference primitives every other module builds on.

#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nlsdelta/errors.hpp"
#include "nlsdelta/specfun.hpp"

namespace nlsdelta {

using Field = std::vector<cplx>;
using RealField = std::vector<double>;

/// Nodes r_j = (j + 1/2) h, weights w_j = 2 pi r_j h. No node sits at the origin.
class RadialGrid {
public:
  RadialGrid(std::size_t n_points, double r_max) : n_(n_points), r_max_(r_max) {
    if (n_points == 0) fail(ErrorKind::parameter, "RadialGrid: n_points must be positive");
    if (!(r_max > 0.0) || !std::isfinite(r_max)) fail(ErrorKind::parameter, "RadialGrid: r_max must be positive");
    h_ = r_max / double(n_points);
    nodes_.resize(n_);
    weights_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      nodes_[j] = (double(j) + 0.5) * h_;
      weights_[j] = 2.0 * pi * nodes_[j] * h_;
    }
  }

  std::size_t size() const noexcept { return n_; }
  double r_max() const noexcept { return r_max_; }
  double spacing() const noexcept { return h_; }
  double node(std::size_t j) const { return nodes_[j]; }
  /// Cell edge r_{j+1/2} = (j + 1) h; edge(-1) would be the origin.
  double edge(std::size_t j) const { return double(j + 1) * h_; }
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }

  bool operator==(const RadialGrid& other) const noexcept { return n_ == other.n_ && r_max_ == other.r_max_; }

private:
  std::size_t n_;
  double r_max_;
  double h_;
  RealField nodes_;
  RealField weights_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

inline GridPtr make_grid(std::size_t n_points, double r_max) {
  return std::make_shared<const RadialGrid>(n_points, r_max);
}

inline void check_shape(const RadialGrid& grid, std::size_t n, const char* who) {
  if (n != grid.size())
    fail(ErrorKind::shape, std::string(who) + ": field has " + std::to_string(n) + " values, grid has " +
                               std::to_string(grid.size()));
}

/// |z|^e, with a multiplication fast path for small integer exponents.
inline double abs_pow(cplx z, double e) {
  const double a2 = std::norm(z);
  if (e >= 0.0 && e <= 32.0 && e == std::floor(e)) {
    const int k = static_cast<int>(e);
    double r = (k % 2 == 1) ? std::sqrt(a2) : 1.0;
    for (int i = 0; i < k / 2; ++i) r *= a2;
    return r;
  }
  return std::pow(a2, 0.5 * e);
}

/// Sum_j w_j f_j, the midpoint rule for \int_{R^2} f dx.
inline cplx quadrature(const RadialGrid& grid, std::span<const cplx> values) {
  check_shape(grid, values.size(), "quadrature");
  cplx s{0.0, 0.0};
  const auto w = grid.weights();
  for (std::size_t j = 0; j < values.size(); ++j) s += w[j] * values[j];
  return s;
}

inline double quadrature(const RadialGrid& grid, std::span<const double> values) {
  check_shape(grid, values.size(), "quadrature");
  double s = 0.0;
  const auto w = grid.weights();
  for (std::size_t j = 0; j < values.size(); ++j) s += w[j] * values[j];
  return s;
}

/// <a, b> = Sum_j w_j conj(a_j) b_j.
inline cplx inner(const RadialGrid& grid, std::span<const cplx> a, std::span<const cplx> b) {
  check_shape(grid, a.size(), "inner");
  check_shape(grid, b.size(), "inner");
  cplx s{0.0, 0.0};
  const auto w = grid.weights();
  for (std::size_t j = 0; j < a.size(); ++j) s += w[j] * std::conj(a[j]) * b[j];
  return s;
}

inline double norm_sq(const RadialGrid& grid, std::span<const cplx> a) {
  check_shape(grid, a.size(), "norm_sq");
  double s = 0.0;
  const auto w = grid.weights();
  for (std::size_t j = 0; j < a.size(); ++j) s += w[j] * std::norm(a[j]);
  return s;
}

/// (Sum_j w_j |f_j|^p)^{1/p}.
inline double lp_norm(const RadialGrid& grid, std::span<const cplx> a, double p) {
  check_shape(grid, a.size(), "lp_norm");
  double s = 0.0;
  const auto w = grid.weights();
  for (std::size_t j = 0; j < a.size(); ++j) s += w[j] * abs_pow(a[j], p);
  return std::pow(s, 1.0 / p);
}

/// Dirichlet form Sum_edges 2 pi r_{j+1/2} |f_{j+1} - f_j|^2 / h with f_N = 0.
/// Equals <f, -Delta_h f> exactly, so it is the discrete ||grad f||^2.
inline double dirichlet_form(const RadialGrid& grid, std::span<const cplx> f) {
  check_shape(grid, f.size(), "dirichlet_form");
  const std::size_t n = f.size();
  const double h = grid.spacing();
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const cplx next = j + 1 < n ? f[j + 1] : cplx{0.0, 0.0};
    s += grid.edge(j) * std::norm(next - f[j]);
  }
  return 2.0 * pi * s / h;
}

/// Flux-form radial Laplacian f'' + f'/r. The origin flux vanishes (even
/// reflection) and f = 0 beyond r_max.
inline Field laplacian(const RadialGrid& grid, std::span<const cplx> f) {
  check_shape(grid, f.size(), "laplacian");
  const std::size_t n = f.size();
  const double h2 = grid.spacing() * grid.spacing();
  Field out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx next = j + 1 < n ? f[j + 1] : cplx{0.0, 0.0};
    const double right = grid.edge(j);
    cplx flux = right * (next - f[j]);
    if (j > 0) flux -= grid.edge(j - 1) * (f[j] - f[j - 1]);
    out[j] = flux / (grid.node(j) * h2);
  }
  return out;
}

/// Centered first derivative with ghost f_{-1} = f_0 and f_N = 0.
inline Field radial_derivative(const RadialGrid& grid, std::span<const cplx> f) {
  check_shape(grid, f.size(), "radial_derivative");
  const std::size_t n = f.size();
  const double h = grid.spacing();
  Field out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx prev = j > 0 ? f[j - 1] : f[0];
    const cplx next = j + 1 < n ? f[j + 1] : cplx{0.0, 0.0};
    out[j] = (next - prev) / (2.0 * h);
  }
  return out;
}

/// Weights of the quadratic extrapolation through the first three nodes to r = 0.
inline constexpr std::array<double, 3> origin_weights{15.0 / 8.0, -10.0 / 8.0, 3.0 / 8.0};

/// Value at r = 0 of the quadratic through (r_0, f_0), (r_1, f_1), (r_2, f_2).
inline cplx phi_at_origin(std::span<const cplx> phi) {
  if (phi.size() < 3) fail(ErrorKind::grid_too_small, "phi_at_origin: needs at least 3 nodes");
  return origin_weights[0] * phi[0] + origin_weights[1] * phi[1] + origin_weights[2] * phi[2];
}

template <class Fn>
Field sample(const RadialGrid& grid, Fn&& fn) {
  Field out(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) out[j] = cplx(fn(grid.node(j)));
  return out;
}

}  // namespace nlsdelta
