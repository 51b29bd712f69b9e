#pragma once

// Independent reference computations used by the tests. Nothing here calls the
// library's numerics.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr double euler_gamma = 0.5772156649015328606065;

/// K_nu(z) = Int_0^inf exp(-z cosh t) cosh(nu t) dt, Re z > 0, by the trapezoid
/// rule (spectrally accurate for this entire, rapidly decaying integrand).
inline cplx bessel_k(int nu, cplx z, double step = 2e-3) {
  const double tmax = std::acosh(745.0 / z.real() + 1.0);
  const long n = long(std::ceil(tmax / step));
  const double h = tmax / double(n);
  cplx sum = 0.5 * std::exp(-z);
  for (long i = 1; i <= n; ++i) {
    const double t = i * h;
    sum += std::exp(-z * std::cosh(t)) * std::cosh(nu * t);
  }
  return sum * h;
}

/// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, long n) {
  if (n % 2) ++n;
  const double h = (b - a) / double(n);
  double s = f(a) + f(b);
  for (long i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Int_0^inf f(r) dr for f with at most a logarithmic singularity at 0 and
/// exponential decay, via r = exp(s).
inline double half_line(const std::function<double(double)>& f, double r_hi, double s_lo = -40.0, long n = 200000) {
  return simpson([&](double s) { const double r = std::exp(s); return f(r) * r; }, s_lo, std::log(r_hi), n);
}

/// Flux-form radial Laplacian on the staggered mesh r_j = (j + 1/2) h, zero
/// flux at the origin and f = 0 past the last node.
inline std::vector<cplx> laplacian(const std::vector<cplx>& f, double h) {
  const std::size_t n = f.size();
  std::vector<cplx> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double rj = (j + 0.5) * h;
    const double rp = (j + 1.0) * h, rm = double(j) * h;
    const cplx fp = j + 1 < n ? f[j + 1] : cplx{};
    const cplx fm = j > 0 ? f[j - 1] : f[j];
    out[j] = (rp * (fp - f[j]) - rm * (f[j] - fm)) / (rj * h * h);
  }
  return out;
}

}  // namespace oracle
