#pragma once

// Macdonald functions K_0, K_1 on the principal branch and the continuum
// Green function G^z(r) = K_0(sqrt(z) r) / (2 pi) of the 2D point interaction.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>

#include "nlsdelta/errors.hpp"

namespace nlsdelta {

using cplx = std::complex<double>;

/// Euler-Mascheroni constant, 20 significant digits.
inline constexpr double euler_gamma = 0.57721566490153286061;

inline constexpr double pi = std::numbers::pi;

namespace detail {

// |z| <= 2: ascending series for I_0, I_1, K_0; K_1 from the Wronskian
// I_0 K_1 + I_1 K_0 = 1/z.
inline std::pair<cplx, cplx> bessel_k01_series(cplx z) {
  const cplx t = 0.25 * z * z;
  cplx term{1.0, 0.0};
  cplx i0 = term;
  cplx k0_tail{0.0, 0.0};
  cplx i1_sum = term;  // sum t^k / (k! (k+1)!)
  cplx i1_term = term;
  double harmonic = 0.0;
  for (int k = 1; k < 60; ++k) {
    term *= t / (double(k) * double(k));
    harmonic += 1.0 / k;
    i0 += term;
    k0_tail += term * harmonic;
    i1_term *= t / (double(k) * double(k + 1));
    i1_sum += i1_term;
    if (std::abs(term) < 1e-18 * std::abs(i0) && std::abs(i1_term) < 1e-18 * std::abs(i1_sum)) break;
  }
  const cplx i1 = 0.5 * z * i1_sum;
  const cplx k0 = -(std::log(0.5 * z) + euler_gamma) * i0 + k0_tail;
  const cplx k1 = (1.0 / z - i1 * k0) / i0;
  return {k0, k1};
}

// Steed's continued fraction CF2 (Temme's normalisation) at order 0; valid for
// complex z off the negative axis, fast for |z| >= 2.
inline std::pair<cplx, cplx> bessel_k01_cf2(cplx z) {
  constexpr double eps = 1e-17;
  cplx b = 2.0 * (1.0 + z);
  cplx d = 1.0 / b;
  cplx h = d;
  cplx delh = d;
  cplx q1{0.0, 0.0};
  cplx q2{1.0, 0.0};
  const double a1 = 0.25;
  cplx q{a1, 0.0};
  cplx c{a1, 0.0};
  double a = -a1;
  cplx s = 1.0 + q * delh;
  for (int i = 1; i < 10000; ++i) {
    a -= 2.0 * i;
    c = -a * c / (i + 1.0);
    const cplx qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const cplx dels = q * delh;
    s += dels;
    if (std::abs(dels) < eps * std::abs(s)) break;
  }
  h *= a1;
  const cplx k0 = std::sqrt(pi / (2.0 * z)) * std::exp(-z) / s;
  const cplx k1 = k0 * (z + 0.5 - h) / z;
  return {k0, k1};
}

// Large-argument Hankel expansion; at least 8 terms, stops at the smallest term.
inline cplx bessel_k_asymptotic(int order, cplx z) {
  const double mu = 4.0 * order * order;
  cplx sum{1.0, 0.0};
  cplx term{1.0, 0.0};
  double last = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (8.0 * k) / z;
    const double mag = std::abs(term);
    if (k >= 8 && (mag > last || mag < 1e-18 * std::abs(sum))) break;
    sum += term;
    last = mag;
  }
  return std::sqrt(pi / (2.0 * z)) * std::exp(-z) * sum;
}

inline constexpr double series_radius = 2.0;
inline constexpr double asymptotic_radius = 25.0;

}  // namespace detail

/// Both K_0(z) and K_1(z); Re z must be positive.
inline std::pair<cplx, cplx> bessel_k01(cplx z) {
  if (!(z.real() > 0.0)) fail(ErrorKind::domain, "bessel_k: argument must have positive real part");
  const double m = std::abs(z);
  if (m <= detail::series_radius) return detail::bessel_k01_series(z);
  if (m <= detail::asymptotic_radius) return detail::bessel_k01_cf2(z);
  return {detail::bessel_k_asymptotic(0, z), detail::bessel_k_asymptotic(1, z)};
}

inline cplx bessel_k(int order, cplx z) {
  if (order != 0 && order != 1)
    fail(ErrorKind::unsupported_order, "bessel_k: only orders 0 and 1 are supported, got " + std::to_string(order));
  const auto [k0, k1] = bessel_k01(z);
  return order == 0 ? k0 : k1;
}

inline double bessel_k(int order, double x) { return bessel_k(order, cplx{x, 0.0}).real(); }

/// A shift is admissible when it avoids the spectrum of -Delta, i.e. z is not in (-inf, 0].
inline bool admissible_shift(cplx z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag()) && !(z.imag() == 0.0 && z.real() <= 0.0);
}

struct GreenParams {
  double alpha = 0.0;
  cplx shift{1.0, 0.0};
};

namespace detail {
inline cplx checked_root(cplx shift, const char* who) {
  if (!admissible_shift(shift)) fail(ErrorKind::domain, std::string(who) + ": shift on the branch cut (-inf, 0]");
  return std::sqrt(shift);
}
inline void check_radius(double r, const char* who) {
  if (!(r > 0.0)) fail(ErrorKind::domain, std::string(who) + ": evaluation requires r > 0");
}
}  // namespace detail

/// G^z(r) = K_0(sqrt(z) r) / (2 pi).
inline cplx green_value(const GreenParams& params, double r) {
  detail::check_radius(r, "green_value");
  const cplx k = detail::checked_root(params.shift, "green_value");
  return bessel_k(0, k * r) / (2.0 * pi);
}

/// dG^z/dr = -sqrt(z) K_1(sqrt(z) r) / (2 pi).
inline cplx green_grad(const GreenParams& params, double r) {
  detail::check_radius(r, "green_grad");
  const cplx k = detail::checked_root(params.shift, "green_grad");
  return -k * bessel_k(1, k * r) / (2.0 * pi);
}

/// G, G', G'', G''' at radius r, from K_0'' = K_0 + K_1/x and (z - Delta) G = 0 off the origin.
struct GreenJet {
  cplx g, d1, d2, d3;
};

inline GreenJet green_jet(const GreenParams& params, double r) {
  detail::check_radius(r, "green_jet");
  const cplx k = detail::checked_root(params.shift, "green_jet");
  const auto [k0, k1] = bessel_k01(k * r);
  GreenJet jet;
  jet.g = k0 / (2.0 * pi);
  jet.d1 = -k * k1 / (2.0 * pi);
  jet.d2 = params.shift * jet.g - jet.d1 / r;
  jet.d3 = params.shift * jet.d1 - jet.d2 / r + jet.d1 / (r * r);
  return jet;
}

/// Gamma^z_alpha = alpha + gamma/(2 pi) + log(sqrt(z)/2)/(2 pi), principal log.
inline cplx gamma_coeff(double alpha, cplx shift) {
  const cplx k = detail::checked_root(shift, "gamma_coeff");
  return alpha + euler_gamma / (2.0 * pi) + std::log(0.5 * k) / (2.0 * pi);
}

inline double gamma_coeff(double alpha, double lambda) { return gamma_coeff(alpha, cplx{lambda, 0.0}).real(); }

/// The single negative eigenvalue e_alpha = -4 exp(-2 (2 pi alpha + gamma)).
inline double eigenvalue_alpha(double alpha) {
  return -4.0 * std::exp(-2.0 * (2.0 * pi * alpha + euler_gamma));
}

}  // namespace nlsdelta
