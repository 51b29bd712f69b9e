#include <gtest/gtest.h>

#include <cmath>

#include "nlsdelta/inequalities.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace nlsdelta;
using testing_support::kind_of;

namespace {

std::vector<StatePair> kato_pairs(const WorkspacePtr& ws, double bound, std::uint64_t seed) {
  const auto fam = random_family(200, seed);
  std::vector<StatePair> out;
  for (std::size_t k = 0; k < 100; ++k) out.push_back({realize(fam[2 * k], ws, bound), realize(fam[2 * k + 1], ws, bound)});
  return out;
}

/// |a_{k+1} - a_k| for a sequence.
std::vector<double> increments(const std::vector<double>& a) {
  std::vector<double> d;
  for (std::size_t k = 1; k < a.size(); ++k) d.push_back(std::abs(a[k] - a[k - 1]));
  return d;
}

}  // namespace

TEST(LogHardy, BumpIntegralHasClosedForm) {
  const auto g = make_grid(4096, 2.0);
  const double expected = 2.0 * oracle::pi / (3.0 * std::pow(std::log(2.0), 3));
  EXPECT_NEAR(log_hardy_integral(*g, hardy_bump(*g), 2.0, 4.0), expected, 1e-3);
}

TEST(LogHardy, ConcentratingGaussiansStayBounded) {
  const auto g = make_grid(16384, 4.0);
  std::vector<double> ratios;
  for (double sigma : {1.0, 0.1, 0.01}) ratios.push_back(log_hardy_ratio(*g, concentrating_gaussian(*g, sigma), 2.0, 4.0));
  for (double r : ratios) {
    EXPECT_TRUE(std::isfinite(r));
    EXPECT_GT(r, 0.0);
  }
  // The weight only sees |log r|^{-4} near the origin, so concentration lowers the ratio.
  EXPECT_LT(ratios[1], ratios[0]);
  EXPECT_LT(ratios[2], ratios[1]);
}

TEST(LogHardy, HypothesisGate) {
  const auto g = make_grid(256, 2.0);
  const Field u = hardy_bump(*g);
  EXPECT_EQ(kind_of([&] { log_hardy_ratio(*g, u, 2.0, 2.0); }), ErrorKind::hypothesis_violated);
  EXPECT_EQ(kind_of([&] { log_hardy_ratio(*g, u, 2.0, 3.0); }), ErrorKind::hypothesis_violated);
  EXPECT_EQ(kind_of([&] { log_hardy_ratio(*g, u, 1.0, 4.0); }), ErrorKind::hypothesis_violated);
  EXPECT_EQ(kind_of([&] { log_hardy_ratio(*g, u, 2.0, INFINITY); }), ErrorKind::hypothesis_violated);
  EXPECT_NO_THROW(log_hardy_ratio(*g, u, 2.0, 3.5));
  EXPECT_EQ(kind_of([&] { log_hardy_ratio(*g, Field(g->size()), 2.0, 4.0); }), ErrorKind::parameter);
}

TEST(Ratios, ScaleAndPhaseInvariant) {
  const auto m = make_model(make_grid(2048, 20.0), 0.0);
  const auto s = realize(random_family(1, 5).front(), make_workspace(m, 2.0));
  const auto t = cplx{2.0, 0.0} * s;
  const auto w = std::polar(1.0, 1.1) * s;
  const auto& g = m->grid();
  const Field u = total_field(s), ut = total_field(t), uw = total_field(w);
  for (const auto& other : {t, w}) {
    EXPECT_NEAR(sobolev_ratio(other, 4.0), sobolev_ratio(s, 4.0), 1e-12 * sobolev_ratio(s, 4.0));
    EXPECT_NEAR(gagliardo_nirenberg_ratio(other, 3.0), gagliardo_nirenberg_ratio(s, 3.0), 1e-12);
  }
  for (const auto& other : {ut, uw}) {
    EXPECT_NEAR(strauss_ratio(g, other, 0.1), strauss_ratio(g, u, 0.1), 1e-12);
    EXPECT_NEAR(log_hardy_ratio(g, other, 2.0, 4.0), log_hardy_ratio(g, u, 2.0, 4.0), 1e-12);
  }
}

TEST(Ratios, ParameterErrors) {
  const auto m = make_model(make_grid(256, 20.0), 0.0);
  const auto ws = make_workspace(m, 2.0);
  const auto s = realize(random_family(1, 5).front(), ws);
  EXPECT_EQ(kind_of([&] { sobolev_ratio(s, 1.5); }), ErrorKind::parameter);
  EXPECT_EQ(kind_of([&] { sobolev_ratio(zero_state(ws), 4.0); }), ErrorKind::parameter);
  EXPECT_EQ(kind_of([&] { strauss_ratio(m->grid(), total_field(s), 0.0); }), ErrorKind::parameter);
  EXPECT_EQ(kind_of([&] { gagliardo_nirenberg_ratio(zero_state(ws), 3.0); }), ErrorKind::parameter);
}

TEST(Sobolev, FamilyMaximumIsGridStable) {
  const auto fam = random_family(50, 11);
  const auto v = refine(
      [&](const GridPtr& g) {
        const auto ws = make_workspace(make_model(g, 0.0), default_lambda_ref(0.0));
        double worst = 0.0;
        for (const auto& mem : fam) worst = std::max(worst, sobolev_ratio(realize(mem, ws), 4.0));
        return worst;
      },
      2048, 30.0);
  EXPECT_TRUE(std::isfinite(v.fine));
  EXPECT_FALSE(v.flagged);
  EXPECT_LE(v.relative_change(), 0.2);
}

TEST(Strauss, GaussianHasClosedFormAtEveryScale) {
  // sup r^{1/2} e^{-r^2} sits at r = 1/2; M = pi/2 and ||u'||^2 = pi, both scaled alike.
  const double expected = std::exp(-0.25) / std::sqrt(2.0) / std::pow(oracle::pi * oracle::pi / 2.0, 0.25);
  const auto g = make_grid(16384, 4.0);
  for (double sigma : {1.0, 0.1, 0.01})
    EXPECT_NEAR(strauss_ratio(*g, concentrating_gaussian(*g, sigma), g->spacing()), expected, 1e-3) << sigma;
}

TEST(Kato, IdenticalPairsAreSkipped) {
  const auto ws = make_workspace(make_model(make_grid(512, 20.0), 0.0), 2.0);
  const auto fam = random_family(2, 1);
  const auto a = realize(fam[0], ws), b = realize(fam[1], ws);
  const auto rep = kato_lipschitz_check({{a, a}, {a, b}, {b, b}}, 3.0, 0.5);
  EXPECT_EQ(rep.pairs_skipped, 2);
  EXPECT_EQ(rep.pairs_used, 1);
  EXPECT_TRUE(std::isfinite(rep.worst_ratio));
  EXPECT_GT(rep.worst_ratio, 0.0);
  EXPECT_NEAR(rep.r_prime, 2.0 - 0.5, 1e-15);
}

TEST(Kato, EpsilonMustLieInTheUnitInterval) {
  const auto ws = make_workspace(make_model(make_grid(64, 10.0), 0.0), 2.0);
  const auto a = realize(random_family(1, 1).front(), ws);
  for (double eps : {0.0, 1.0, -0.1, 1.5})
    EXPECT_EQ(kind_of([&] { kato_lipschitz_check({{a, a}}, 3.0, eps); }), ErrorKind::parameter) << eps;
}

TEST(Kato, OneConstantFitsBothGrids) {
  const double bound = 5.0, p = 3.0;
  std::vector<KatoReport> reps;
  for (std::size_t n : {1024, 2048}) {
    const auto ws = make_workspace(make_model(make_grid(n, 20.0), 0.0), default_lambda_ref(0.0));
    reps.push_back(kato_lipschitz_check(kato_pairs(ws, bound, 7), p, 0.5));
    EXPECT_EQ(reps.back().pairs_used, 100);
  }
  EXPECT_LE(std::abs(reps[0].fitted_C - reps[1].fitted_C), refinement_flag_threshold * reps[1].fitted_C);
  const double C = std::max(reps[0].fitted_C, reps[1].fitted_C);
  for (const auto& r : reps) EXPECT_LE(r.worst_ratio, C * 2.0 * std::pow(bound, p - 1.0));
}

TEST(Kato, SingularNonlinearityIsCauchyInH) {
  // q != 0 puts |log r|^p into g(u); its L^{2 - eps} norm must still converge.
  const auto mem = random_family(1, 3).front();
  ASSERT_GT(std::abs(mem.q), 0.0);
  std::vector<double> vals;
  for (std::size_t n : {1024, 2048, 4096, 8192, 16384}) {
    const auto s = realize(mem, make_workspace(make_model(make_grid(n, 20.0), 0.0), 2.0));
    vals.push_back(nonlinearity_lr_norm(s, 3.0, 1.5));
    EXPECT_TRUE(std::isfinite(vals.back()));
  }
  const auto d = increments(vals);
  for (std::size_t k = 1; k < d.size(); ++k) EXPECT_LT(d[k], 0.5 * d[k - 1]) << k;
  EXPECT_LT(d.back(), 1e-5 * vals.back());
}

TEST(GridHonesty, RefineFlagsLargeChanges) {
  const auto stable = refine([](const GridPtr& g) { return g->r_max(); }, 64, 3.0);
  EXPECT_FALSE(stable.flagged);
  EXPECT_EQ(stable.relative_change(), 0.0);
  const auto drifting = refine([](const GridPtr& g) { return double(g->size()); }, 64, 3.0);
  EXPECT_TRUE(drifting.flagged);
  EXPECT_NEAR(drifting.relative_change(), 0.5, 1e-15);
  const auto nan = refine([](const GridPtr&) { return std::nan(""); }, 64, 3.0);
  EXPECT_TRUE(nan.flagged);
}

TEST(LogFitting, RecoversExactData) {
  std::vector<double> h{0.1, 0.05, 0.025, 0.0125}, v;
  for (double x : h) v.push_back(0.3 + 0.7 * std::log(1.0 / x));
  const auto f = fit_log(h, v);
  EXPECT_NEAR(f.a, 0.3, 1e-12);
  EXPECT_NEAR(f.b, 0.7, 1e-12);
  EXPECT_LE(f.max_residual, 1e-12);
  EXPECT_EQ(kind_of([] { fit_log({0.1}, {1.0}); }), ErrorKind::parameter);
  EXPECT_EQ(kind_of([] { fit_log({0.1, 0.2}, {1.0}); }), ErrorKind::parameter);
}

TEST(GreenSignature, H1NormGrowsLikeLogOverTwoPi) {
  const auto f = green_h1_growth(2.0, {1024, 2048, 4096, 8192}, 20.0);
  EXPECT_NEAR(f.b, 1.0 / (2.0 * oracle::pi), 0.05 / (2.0 * oracle::pi));
  EXPECT_LE(f.max_residual, 1e-3);
}

TEST(GreenSignature, CutoffRemovesTheDivergence) {
  std::vector<double> vals;
  for (std::size_t n : {1024, 2048, 4096, 8192}) vals.push_back(cutoff_green_h1(2.0, n, 20.0));
  const auto d = increments(vals);
  for (std::size_t k = 1; k < d.size(); ++k) EXPECT_LT(d[k], 0.5 * d[k - 1]) << k;
  EXPECT_LT(d.back(), 1e-5 * vals.back());
}

TEST(CubicThreshold, TwiceTheInverseFourthPower) {
  EXPECT_DOUBLE_EQ(cubic_mass_threshold(1.0), 2.0);
  EXPECT_DOUBLE_EQ(cubic_mass_threshold(2.0), 0.125);
}
