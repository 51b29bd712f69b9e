#include <gtest/gtest.h>

#include <cmath>

#include "nlsdelta/errors.hpp"
#include "nlsdelta/specfun.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace nlsdelta;

using testing_support::kind_of;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(BesselK, K0AtOneMatchesReferenceValue) {
  EXPECT_NEAR(bessel_k(0, 1.0), 0.42102443824070834, 1e-15);
  EXPECT_NEAR(bessel_k(0, 1.0), oracle::bessel_k(0, 1.0).real(), 1e-14);
}

TEST(BesselK, RealAxisMatchesIntegralOracle) {
  for (double x : {1e-6, 1e-4, 0.01, 0.3, 1.0, 1.9, 2.1, 5.0, 12.0, 24.0, 26.0, 35.0, 50.0})
    for (int nu : {0, 1}) {
      const double ref = oracle::bessel_k(nu, x).real();
      EXPECT_LE(std::abs(bessel_k(nu, x) - ref) / ref, 1e-10) << "nu=" << nu << " x=" << x;
    }
}

TEST(BesselK, ComplexArgumentsMatchIntegralOracle) {
  for (double re : {0.5, 2.0, 4.5, 7.0, 10.0})
    for (double im : {-10.0, -5.0, 0.0, 5.0, 10.0})
      for (int nu : {0, 1}) {
        const cplx z{re, im};
        EXPECT_LE(rel(bessel_k(nu, z), oracle::bessel_k(nu, z, 5e-4)), 1e-8) << "nu=" << nu << " z=" << z;
      }
}

TEST(BesselK, SmallArgumentLogLaw) {
  for (double z : {1e-4, 1e-6}) {
    const double res = bessel_k(0, z) + std::log(z / 2.0) + oracle::euler_gamma;
    EXPECT_LE(std::abs(res), 2.0 * z * z * std::abs(std::log(z))) << z;
  }
}

TEST(BesselK, LargeArgumentAsymptotics) {
  // sqrt(2x/pi) e^x K_0(x) = 1 - 1/(8x) + 9/(128x^2) - ...
  for (double x : {10.0, 30.0, 100.0}) {
    const double scaled = bessel_k(0, x) * std::sqrt(2.0 * x / oracle::pi) * std::exp(x);
    EXPECT_NEAR(scaled, 1.0 - 1.0 / (8.0 * x) + 9.0 / (128.0 * x * x), 0.1 / (x * x * x)) << x;
    EXPECT_NEAR(scaled, 1.0, 0.15 / x) << x;
  }
}

TEST(BesselK, DerivativeOfK0IsMinusK1) {
  for (double x = 0.1; x <= 20.0; x += 0.37) {
    const double h = 1e-4 * x;
    const double fd = (bessel_k(0, x + h) - bessel_k(0, x - h)) / (2.0 * h);
    EXPECT_LE(std::abs(fd + bessel_k(1, x)) / bessel_k(1, x), 1e-6) << x;
  }
}

TEST(BesselK, RejectsBadArguments) {
  EXPECT_EQ(kind_of([] { bessel_k(0, cplx{0.0, 1.0}); }), ErrorKind::domain);
  EXPECT_EQ(kind_of([] { bessel_k(1, -2.0); }), ErrorKind::domain);
  EXPECT_EQ(kind_of([] { bessel_k(2, 1.0); }), ErrorKind::unsupported_order);
}

TEST(Green, ValueAtUnitShiftAndRadius) {
  const double ref = oracle::bessel_k(0, 1.0).real() / (2.0 * oracle::pi);
  EXPECT_NEAR(green_value({0.0, 1.0}, 1.0).real(), ref, 1e-15);
  EXPECT_NEAR(ref, 0.0670081205, 1e-10);
  EXPECT_EQ(green_value({0.0, 1.0}, 1.0).imag(), 0.0);
}

TEST(Green, ScalingIdentity) {
  for (double lambda : {0.3, 4.0, 17.0})
    for (double r : {0.01, 0.7, 3.0}) {
      const cplx a = green_value({0.0, lambda}, r);
      const cplx b = green_value({0.0, 1.0}, std::sqrt(lambda) * r);
      EXPECT_LE(rel(a, b), 1e-15) << lambda << " " << r;
    }
}

TEST(Green, SquaredNormIsOneOverFourPiLambda) {
  for (double lambda : {0.5, 1.0, 4.0}) {
    const GreenParams gp{0.0, lambda};
    const double tail_start = 80.0 / std::sqrt(lambda);
    const double integral = 2.0 * oracle::pi * oracle::half_line([&](double r) {
      const double g = green_value(gp, r).real();
      return g * g * r;
    }, tail_start);
    const double expected = 1.0 / (4.0 * oracle::pi * lambda);
    EXPECT_LE(std::abs(integral - expected) / expected, 1e-6) << lambda;
  }
}

TEST(Green, GradientMatchesFiniteDifferences) {
  const GreenParams gp{0.0, 1.0};
  double prev_err = 0.0;
  for (double h : {1e-2, 5e-3}) {
    const double fd = (green_value(gp, 1.0 + h).real() - green_value(gp, 1.0 - h).real()) / (2.0 * h);
    const double err = std::abs(fd - green_grad(gp, 1.0).real());
    EXPECT_LE(err, 0.1 * h * h);
    if (prev_err > 0.0) {
      EXPECT_NEAR(prev_err / err, 4.0, 0.1);
    }
    prev_err = err;
  }
}

TEST(Green, GradientNearOriginAndFarField) {
  const GreenParams gp{0.0, 1.0};
  for (double r : {1e-4, 1e-6}) EXPECT_NEAR(r * green_grad(gp, r).real(), -1.0 / (2.0 * oracle::pi), 1e-6);
  EXPECT_LT(green_grad(gp, 10.0).real(), 0.0);
}

TEST(Green, JetSatisfiesRadialEquation) {
  const GreenParams gp{0.0, cplx{2.0, -3.0}};
  for (double r : {0.05, 0.8, 4.0}) {
    const GreenJet j = green_jet(gp, r);
    const double h = 1e-4 * r;
    const cplx fd2 = (green_grad(gp, r + h) - green_grad(gp, r - h)) / (2.0 * h);
    const GreenJet jp = green_jet(gp, r + h), jm = green_jet(gp, r - h);
    const cplx fd3 = (jp.d2 - jm.d2) / (2.0 * h);
    EXPECT_LE(rel(j.d2, fd2), 1e-6) << r;
    EXPECT_LE(rel(j.d3, fd3), 1e-6) << r;
    EXPECT_LE(std::abs(j.d2 + j.d1 / r - gp.shift * j.g), 1e-12 * std::abs(gp.shift * j.g)) << r;
  }
}

TEST(Green, SmallRadiusConstant) {
  const double lambda = 3.0;
  const double limit = -oracle::euler_gamma / (2.0 * oracle::pi) - std::log(std::sqrt(lambda) / 2.0) / (2.0 * oracle::pi);
  for (double r : {1e-3, 1e-5}) {
    const double v = green_value({0.0, lambda}, r).real() + std::log(r) / (2.0 * oracle::pi);
    EXPECT_LE(std::abs(v - limit), 2.0 * r * r * std::abs(std::log(r)) * lambda) << r;
  }
  // The same constant is -(Gamma - alpha) for any alpha.
  EXPECT_NEAR(limit, -(gamma_coeff(0.7, lambda) - 0.7), 1e-15);
}

TEST(Green, ExponentialDecay) {
  EXPECT_NEAR(green_value({0.0, 1.0}, 20.0).real() * std::exp(20.0) * std::sqrt(2.0 * 20.0 / oracle::pi) * 2.0 * oracle::pi,
              1.0, 0.02);
}

TEST(Green, RejectsOriginAndBranchCut) {
  EXPECT_EQ(kind_of([] { green_value({0.0, 1.0}, 0.0); }), ErrorKind::domain);
  EXPECT_EQ(kind_of([] { green_grad({0.0, 1.0}, -1.0); }), ErrorKind::domain);
  EXPECT_EQ(kind_of([] { green_value({0.0, -1.0}, 1.0); }), ErrorKind::domain);
  EXPECT_EQ(kind_of([] { green_value({0.0, 0.0}, 1.0); }), ErrorKind::domain);
}

TEST(Green, NegativeRealPartShiftOffTheCutIsAdmissible) {
  const cplx z{-1.0, 2.0};
  const cplx v = green_value({0.0, z}, 0.5);
  EXPECT_LE(rel(v, oracle::bessel_k(0, std::sqrt(z) * 0.5) / (2.0 * oracle::pi)), 1e-10);
}

TEST(GammaCoeff, ValueAtFour) {
  EXPECT_NEAR(gamma_coeff(0.0, 4.0), oracle::euler_gamma / (2.0 * oracle::pi), 1e-16);
  EXPECT_NEAR(gamma_coeff(0.0, 4.0), 0.0918667263, 1e-10);
}

TEST(GammaCoeff, VanishesAtTheEigenvalue) {
  for (double alpha : {-0.2, 0.0, 0.5}) EXPECT_LE(std::abs(gamma_coeff(alpha, -eigenvalue_alpha(alpha))), 1e-12) << alpha;
}

TEST(GammaCoeff, StrictlyIncreasingInLambda) {
  double prev = gamma_coeff(0.3, 1e-3);
  for (double lambda = 2e-3; lambda < 1e3; lambda *= 1.7) {
    const double g = gamma_coeff(0.3, lambda);
    EXPECT_GT(g, prev);
    prev = g;
  }
}

TEST(GammaCoeff, ComplexShiftUsesPrincipalLog) {
  const cplx z{0.0, -2000.0};
  const cplx expected = 0.1 + oracle::euler_gamma / (2.0 * oracle::pi) + std::log(std::sqrt(z) / 2.0) / (2.0 * oracle::pi);
  EXPECT_LE(std::abs(gamma_coeff(0.1, z) - expected), 1e-15);
  EXPECT_EQ(kind_of([] { gamma_coeff(0.0, cplx{-3.0, 0.0}); }), ErrorKind::domain);
}

TEST(Eigenvalue, ClosedForm) {
  const double ref = -4.0 * std::exp(-2.0 * oracle::euler_gamma);
  EXPECT_NEAR(eigenvalue_alpha(0.0), ref, 1e-15);
  EXPECT_NEAR(eigenvalue_alpha(0.0), -1.26097, 5e-5);
}

TEST(Eigenvalue, IncreasesTowardZero) {
  double prev = eigenvalue_alpha(0.0);
  for (double alpha : {1.0, 2.0, 4.0}) {
    const double e = eigenvalue_alpha(alpha);
    EXPECT_LT(e, 0.0);
    EXPECT_GT(e, prev);
    prev = e;
  }
  EXPECT_GT(eigenvalue_alpha(4.0), -1e-10);
}
