#include <gtest/gtest.h>

#include <cmath>

#include "nlsdelta/evolution.hpp"
#include "nlsdelta/initial_data.hpp"
#include "nlsdelta/virial.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace nlsdelta;
using testing_support::kind_of;

namespace {

ModelPtr model(std::size_t n, double r_max, double alpha = 0.0) { return make_model(make_grid(n, r_max), alpha); }

// Independent copy of the smoothstep cut-off profile.
double theta_oracle(double t) {
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  const double s = t - 1.0;
  return 1.0 - 10.0 * s * s * s + 15.0 * s * s * s * s - 6.0 * s * s * s * s * s;
}

double theta_prime_oracle(double t) { return oracle::simpson(theta_oracle, 0.0, t, 4000); }

double theta_big_oracle(double t) { return oracle::simpson(theta_prime_oracle, 0.0, t, 400); }

/// Gaussian of amplitude 0.5 and width sigma, charge from one projection at shift 50.
DecomposedState projected_gaussian(const WorkspacePtr& ws, double sigma) {
  GaussianParams g;
  g.amplitude = 0.5;
  g.sigma = sigma;
  g.projection_shift = 50.0;
  return gaussian_data(ws, g);
}

}  // namespace

TEST(Cutoff, QuadraticCore) {
  for (double R : {1.0, 5.0, 10.0}) {
    const CutoffValues c = cutoff_eval(R, R / 2.0);
    EXPECT_NEAR(c.eta, R * R / 8.0, 1e-14 * R * R);
    EXPECT_EQ(c.d2, 1.0);
    EXPECT_NEAR(c.lap, 2.0, 1e-15);
    EXPECT_EQ(c.d3, 0.0);
  }
  EXPECT_EQ(cutoff_eval(3.0, 0.0).lap, 2.0);
  EXPECT_EQ(cutoff_eval(3.0, 0.0).eta, 0.0);
}

TEST(Cutoff, FlatTail) {
  const double R = 4.0;
  const CutoffValues c = cutoff_eval(R, 3.0 * R);
  EXPECT_EQ(c.d2, 0.0);
  const double slope = oracle::simpson(theta_oracle, 0.0, 2.0, 4000);
  EXPECT_GT(slope, 1.0);
  EXPECT_LT(slope, 2.0);
  EXPECT_NEAR(c.d1, slope * R, 1e-12);
  EXPECT_NEAR(cutoff_slope_limit, slope, 1e-12);
}

TEST(Cutoff, ClosedFormsMatchQuadrature) {
  const double R = 2.0;
  for (double t : {0.3, 1.0, 1.2, 1.5, 1.9, 2.0, 2.7}) {
    const CutoffValues c = cutoff_eval(R, t * R);
    EXPECT_NEAR(c.d2, theta_oracle(t), 1e-14) << t;
    EXPECT_NEAR(c.d1 / R, theta_prime_oracle(t), 1e-12) << t;
    EXPECT_NEAR(c.eta / (R * R), theta_big_oracle(t), 1e-10) << t;
  }
}

TEST(Cutoff, DerivativesAreConsistent) {
  const double R = 3.0, h = 1e-5;
  for (double r = 0.5; r < 7.0; r += 0.37) {
    const CutoffValues c = cutoff_eval(R, r);
    EXPECT_NEAR((cutoff_eval(R, r + h).eta - cutoff_eval(R, r - h).eta) / (2 * h), c.d1, 1e-8) << r;
    EXPECT_NEAR((cutoff_eval(R, r + h).d1 - cutoff_eval(R, r - h).d1) / (2 * h), c.d2, 1e-8) << r;
    EXPECT_NEAR((cutoff_eval(R, r + h).d2 - cutoff_eval(R, r - h).d2) / (2 * h), c.d3, 1e-7) << r;
    EXPECT_NEAR(c.lap, c.d2 + c.d1 / r, 1e-14) << r;
  }
}

TEST(Cutoff, GlobalBounds) {
  const double R = 2.5;
  for (int k = 0; k <= 10000; ++k) {
    const double r = 8.0 * R * k / 10000.0;
    const CutoffValues c = cutoff_eval(R, r);
    ASSERT_LE(c.d2, 1.0 + 1e-15) << r;
    ASSERT_LE(c.lap, 2.0 + 1e-15) << r;
    ASSERT_GE(c.d2, 0.0) << r;
  }
}

TEST(Cutoff, InvalidArguments) {
  EXPECT_EQ(kind_of([] { cutoff_eval(0.0, 1.0); }), ErrorKind::parameter);
  EXPECT_EQ(kind_of([] { cutoff_eval(1.0, -1.0); }), ErrorKind::domain);
}

TEST(Virial, CompactStateSeesTheQuadraticWeight) {
  const auto m = model(8192, 4.0);
  const auto& g = m->grid();
  const Field phi = sample(g, [](double r) { return r < 1.0 ? std::pow(1.0 - r * r, 3) : 0.0; });
  const auto s = make_state(make_workspace(m, 2.0), phi, 0.0);
  double direct = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j)
    direct += 2.0 * oracle::pi * g.node(j) * g.spacing() * 0.5 * g.node(j) * g.node(j) * std::norm(phi[j]);
  EXPECT_NEAR(virial_V(s, 2.0), direct, 1e-8 * direct);
  // Continuum value pi/2 * B(2, 7) = pi / 112.
  EXPECT_NEAR(virial_V(s, 2.0), oracle::pi / 112.0, 1e-6);
}

TEST(Virial, RealStateHasNoMomentum) {
  const auto m = model(2048, 30.0);
  const auto s = projected_gaussian(make_workspace(m, 2.5), 1.0);
  EXPECT_EQ(virial_Vprime(s, 7.5), 0.0);
}

TEST(Virial, MomentumMatchesFiniteDifferencesOfV) {
  // Linear flow of a Gaussian carrying a small charge.
  SimConfig cfg;
  cfg.nonlinear_coeff = 0.0;
  cfg.dt = 1e-3;
  cfg.n_points = 4096;
  cfg.r_max = 40.0;
  const auto m = model(cfg.n_points, cfg.r_max);
  Stepper st(m, cfg);
  DecomposedState u = change_lambda(projected_gaussian(st.reference(), 1.0), st.reference());
  const double R = 10.0;
  std::vector<double> V{virial_V(u, R)}, Vp{virial_Vprime(u, R)};
  for (int k = 0; k < 1000; ++k) {
    u = st.step(u, cfg.dt);
    V.push_back(virial_V(u, R));
    Vp.push_back(virial_Vprime(u, R));
  }
  double scale = 0.0;
  for (double v : Vp) scale = std::max(scale, std::abs(v));
  ASSERT_GT(scale, 0.0);
  for (int k = 100; k < 1000; k += 100) {
    const double fd = (V[k + 1] - V[k - 1]) / (2.0 * cfg.dt);
    EXPECT_LE(std::abs(fd - Vp[k]), 1e-3 * scale) << "t=" << k * cfg.dt;
  }
}

TEST(VirialSecond, RemainderVanishesForCompactRegularStates) {
  const auto m = model(4096, 8.0);
  const Field phi = sample(m->grid(), [](double r) { return r < 1.0 ? r * r * std::pow(1.0 - r * r, 4) : 0.0; });
  const auto s = make_state(make_workspace(m, 2.0), phi, 0.0);
  ASSERT_LE(domain_defect(s), default_domain_tol);
  const VirialBreakdown b = virial_Vsecond(s, 2.0, 4.0);
  EXPECT_EQ(b.rem_p1, 0.0);
  EXPECT_EQ(b.rem_uHu, 0.0);
  EXPECT_EQ(b.rem_grad, 0.0);
  EXPECT_EQ(b.rem_cross, 0.0);
  EXPECT_EQ(b.rem_GG, 0.0);
  EXPECT_EQ(b.total, b.four_P);
  EXPECT_NEAR(b.four_P, 4.0 * pohozaev(s, 4.0), 1e-14);
}

TEST(VirialSecond, Additivity) {
  const auto m = model(4096, 40.0);
  const auto s = projected_gaussian(make_workspace(m, 2.5), 5.0);
  for (double R : {5.0, 10.0}) {
    const VirialBreakdown b = virial_Vsecond(s, R, 4.0);
    EXPECT_NEAR(b.total, b.four_P + b.remainder(), 1e-12 * (1.0 + std::abs(b.total)));
  }
}

TEST(VirialSecond, RemainderDecaysWithTheCutoffRadius) {
  const auto m = model(8192, 80.0);
  const auto s = projected_gaussian(make_workspace(m, default_lambda_ref(0.0)), 6.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double R : {10.0, 20.0, 40.0}) {
    const double rem = std::abs(virial_Vsecond(s, R, 4.0).remainder());
    EXPECT_LT(rem, prev) << R;
    prev = rem;
  }
  EXPECT_LT(prev, 1e-12);
}

TEST(VirialSecond, FocusingOnlyAndDomainChecked) {
  const auto m = model(512, 20.0);
  const auto ws = make_workspace(m, 2.5);
  const auto s = projected_gaussian(ws, 1.0);
  EXPECT_EQ(kind_of([&] { virial_Vsecond(s, 5.0, 4.0, Sign::defocusing); }), ErrorKind::inapplicable_sign);
  const auto off = make_state(ws, s.phi, 0.0);
  EXPECT_EQ(kind_of([&] { virial_Vsecond(off, 5.0, 4.0); }), ErrorKind::not_in_domain);
}

TEST(VirialSecond, FiniteDifferenceClosureOnAShortRun) {
  SimConfig cfg;
  cfg.p = 4.0;
  cfg.t_end = 0.3;
  cfg.n_points = 2048;
  cfg.r_max = 40.0;
  cfg.monitor_every = 10;
  const auto m = model(cfg.n_points, cfg.r_max);
  const auto u0 = projected_gaussian(make_workspace(m, cfg.resolved_lambda_ref()), 1.0);
  const RunResult res = run(cfg, u0);
  ASSERT_FALSE(res.blowup);
  const auto fd = virial_fd_second(res.series);
  int checked = 0;
  for (std::size_t k = 1; k + 1 < res.series.size(); ++k) {
    const double total = res.series[k].Vsecond_analytic;
    EXPECT_LE(std::abs(fd[k] - total), 5e-2 * (1.0 + std::abs(total))) << res.series[k].t;
    ++checked;
  }
  EXPECT_GE(checked, 10);
}

class Certificate : public ::testing::Test {
protected:
  static void SetUpTestSuite() {
    m_ = model(4096, 40.0, 0.5);
    ws_ = make_workspace(m_, default_lambda_ref(0.5));
    ground_ = new GroundStateReport(solve_ground_state(m_, 2.0, 4.0));
  }
  static void TearDownTestSuite() { delete ground_; }
  static inline ModelPtr m_;
  static inline WorkspacePtr ws_;
  static inline GroundStateReport* ground_ = nullptr;
};

TEST_F(Certificate, GroundStateItselfFails) {
  ASSERT_TRUE(ground_->converged);
  const auto c = blowup_certificate(ground_->state, *ground_, 4.0);
  EXPECT_FALSE(c.holds);
  EXPECT_NEAR(c.margin_action, 0.0, 1e-14);
  EXPECT_NEAR(c.margin_pohozaev, 0.0, 1e-2);
}

TEST_F(Certificate, SlightlyAboveTheGroundState) {
  const auto v = change_lambda(ground_->state, ws_);
  const auto c = blowup_certificate(1.1 * v, *ground_, 4.0);
  EXPECT_GT(c.margin_action, 0.0);
  EXPECT_GT(c.margin_pohozaev, 0.0);
  EXPECT_GE(c.margin_energy, 0.0);
  EXPECT_TRUE(c.hypothesis_applicable);
  EXPECT_TRUE(c.holds);
  EXPECT_NEAR(c.pohozaev_bound, -c.delta, 1e-15);
  EXPECT_NEAR(c.c2, 0.5 * c.delta, 1e-15);
}

TEST_F(Certificate, PohozaevAlongTheRay) {
  // P(c v) = c^2 (F + |q|^2 / 4 pi) - c^{p+1} (p-1)/(p+1) ||v||^{p+1}.
  const auto& v = ground_->state;
  const double F = quadratic_form(v), L = power_integral(v, 4.0), q2 = std::norm(v.q);
  for (double c : {0.9, 1.0, 1.05, 1.3}) {
    const double expected = c * c * (F + q2 / (4.0 * oracle::pi)) - std::pow(c, 5.0) * 3.0 / 5.0 * L;
    EXPECT_NEAR(pohozaev(c * v, 4.0), expected, 1e-10 * (1.0 + std::abs(expected))) << c;
  }
}

TEST_F(Certificate, PowerOutsideTheBlowupRangeIsFlagged) {
  const auto c = blowup_certificate(1.1 * ground_->state, *ground_, 3.0);
  EXPECT_FALSE(c.hypothesis_applicable);
  EXPECT_FALSE(c.holds);
}

TEST_F(Certificate, UnconvergedReferenceIsRejected) {
  GroundStateReport bad = *ground_;
  bad.converged = false;
  EXPECT_EQ(kind_of([&] { blowup_certificate(ground_->state, bad, 4.0); }), ErrorKind::unusable_reference);
}

TEST_F(Certificate, ScaledGroundDataSearch) {
  ScaledGroundParams sp;
  const auto r = scaled_ground_data(ws_, *ground_, sp);
  EXPECT_TRUE(r.certificate.holds);
  EXPECT_GT(r.c, 1.0);
  EXPECT_NEAR(r.c, 0.5 * (1.0 + r.c_energy_zero), 1e-12);
  EXPECT_NEAR(energy(r.c_energy_zero * change_lambda(ground_->state, ws_), 4.0, Sign::focusing), 0.0, 1e-10);
  sp.c = 1.02;
  EXPECT_EQ(scaled_ground_data(ws_, *ground_, sp).c, 1.02);
  sp.c = 1.5;  // E < 0 here, so the search falls back to the midpoint
  EXPECT_NEAR(scaled_ground_data(ws_, *ground_, sp).c, r.c, 1e-12);
}

TEST(CertificateSearch, UnsatisfiableWhenTheEnergyIsNegativeOnTheRay) {
  // At alpha = 0 the ground state itself has E < 0, so no c > 1 works.
  const auto m = model(4096, 40.0);
  const auto ws = make_workspace(m, default_lambda_ref(0.0));
  EXPECT_EQ(kind_of([&] { scaled_ground_data(ws, ScaledGroundParams{}); }), ErrorKind::certificate_unsatisfiable);
}
