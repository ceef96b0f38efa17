#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sobrig/sobolev.hpp"

using namespace sobrig;

namespace {

struct Fixture {
  SobolevParams params = SobolevParams::make(4, 2.0);
  QuadratureConfig cfg;
  double K = oracle::sharp_constant(4, 2.0);
  double Kp = std::pow(K, -2.0);
  TalentiProfile base = make_profile(params, 1.0, cfg);
  ModelManifold euclid = ModelManifold::build(4, CurvatureProfile::zero(), 50.0, 1e-3);
  ModelManifold cone = ModelManifold::conical(4, 0.8, 50.0, 1e-3);
  ModelManifold rational = ModelManifold::build(4, CurvatureProfile::rational_decay(0.1), 50.0, 1e-3);
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST(RadialFunction, DerivativeSpotCheck) {
  const auto& f = fx();
  const std::vector<double> ts = log_grid(1e-2, 1e2, 30);
  EXPECT_LT(derivative_mismatch(RadialFunction::talenti(f.base), ts), 1e-6);
  const RadialFunction bumped = RadialFunction::perturbed(f.base, Bump{0.7, 0.3, 0.8});
  EXPECT_LT(derivative_mismatch(bumped, ts), 1e-6);
  EXPECT_GT(bumped(1.0), 0.0);
  EXPECT_THROW(RadialFunction::perturbed(f.base, Bump{-1.0, 0.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(RadialFunction::perturbed(f.base, Bump{0.1, 0.0, 0.0}), std::invalid_argument);
}

TEST(Quotients, EuclideanAttainsSharpConstant) {
  const auto& f = fx();
  for (double lam : {0.5, 1.0, 5.0, 100.0}) {
    const Quotients q = evaluate_quotients(RadialFunction::talenti(f.base.with_lambda(lam)),
                                           f.euclid, f.params, f.cfg);
    EXPECT_NEAR(q.mass, 1.0, 1e-8);
    EXPECT_LT(oracle::rel(q.energy, f.Kp), 1e-6);
    EXPECT_LT(oracle::rel(q.plain, f.Kp), 1e-6);
    EXPECT_LT(oracle::rel(q.sobolev, f.Kp), 1e-6);
  }
}

TEST(Quotients, Homogeneity) {
  const auto& f = fx();
  const RadialFunction u = RadialFunction::talenti(f.base);
  for (const ModelManifold* M : {&f.euclid, &f.rational}) {
    const Quotients q = evaluate_quotients(u, *M, f.params, f.cfg);
    for (double c : {0.5, 2.0, 10.0}) {
      const Quotients qc = evaluate_quotients(u.scaled(c), *M, f.params, f.cfg);
      EXPECT_LT(oracle::rel(qc.sobolev, q.sobolev), 1e-10);
      EXPECT_LT(oracle::rel(qc.plain, std::pow(c, 2.0 - 4.0) * q.plain), 1e-10);
    }
  }
}

TEST(Quotients, RicciNonnegativeReverseBound) {
  const auto& f = fx();
  for (double lam : {0.5, 1.0, 5.0}) {
    const RadialFunction u = RadialFunction::talenti(f.base.with_lambda(lam));
    const Quotients q = evaluate_quotients(u, f.cone, f.params, f.cfg);
    EXPECT_LE(q.plain, f.Kp * (1 + 1e-6));
    EXPECT_LE(q.mass, 1.0);
  }
}

TEST(Quotients, FiniteMomentMassBound) {
  const auto& f = fx();
  for (double lam : {0.5, 1.0, 5.0}) {
    const double mass = mass_pstar(RadialFunction::talenti(f.base.with_lambda(lam)), f.rational,
                                   f.params, f.cfg);
    EXPECT_GT(mass, 1.0);
    EXPECT_LE(mass, std::exp(0.3));
  }
}

TEST(Quotients, RationalEnergyTwoResolutions) {
  const auto& f = fx();
  const RadialFunction u = RadialFunction::talenti(f.base);
  const double coarse = gradient_energy(u, f.rational, 2.0, f.cfg);
  const ModelManifold fine =
      ModelManifold::build(4, CurvatureProfile::rational_decay(0.1), 50.0, 2.5e-4);
  const double refined = gradient_energy(u, fine, 2.0, f.cfg.tightened(0.01));
  EXPECT_LT(oracle::rel(coarse, refined), 1e-9);
}

TEST(Quotients, MonotoneRefinement) {
  const auto& f = fx();
  const RadialFunction u = RadialFunction::talenti(f.base.with_lambda(3.0));
  for (const ModelManifold* M : {&f.euclid, &f.cone, &f.rational}) {
    const double a = quotient_sobolev(u, *M, f.params, f.cfg);
    const double b = quotient_sobolev(u, *M, f.params, f.cfg.tightened(0.5));
    EXPECT_LT(oracle::rel(a, b), f.cfg.rel_tol * 10);
  }
}

TEST(Quotients, RandomCompetitorsNeverBeatEuclideanBound) {
  const auto& f = fx();
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> amp(-0.8, 3.0);
  std::uniform_real_distribution<double> mu(-3.0, 3.0);
  std::uniform_real_distribution<double> sig(0.1, 3.0);
  std::uniform_real_distribution<double> loglam(-2.0, 3.0);
  for (int i = 0; i < 12; ++i) {
    const RadialFunction u = RadialFunction::perturbed(
        f.base.with_lambda(std::pow(10.0, loglam(rng))), Bump{amp(rng), mu(rng), sig(rng)});
    EXPECT_GE(quotient_sobolev(u, f.euclid, f.params, f.cfg), f.Kp * (1 - 1e-6));
  }
}

TEST(Quotients, CustomCompactFunctionHasZeroTailContribution) {
  const auto& f = fx();
  // u = 1 on [0, 1], smooth decay to a small floor after it.
  const RadialFunction u = RadialFunction::custom(
      [](double t) { return t <= 1.0 ? 1.0 : std::exp(-std::pow(t - 1.0, 3)); },
      [](double t) { return t <= 1.0 ? 0.0 : -3.0 * std::pow(t - 1.0, 2) * std::exp(-std::pow(t - 1.0, 3)); },
      50.0, 1.0);
  const double flat = f.euclid.integrate_range(
      [&](double t) { return std::pow(std::abs(u.deriv(t)), 2.0); }, 0.0, 1.0, f.cfg);
  EXPECT_EQ(flat, 0.0);
  const DecayReport d = verify_decay_conditions(u, f.euclid, f.params, {{10.0, 100.0}}, f.cfg);
  EXPECT_TRUE(d.averages_decreasing);
  EXPECT_LT(d.averages.back().second, d.averages.front().second);
}

TEST(Decay, EuclideanBubble) {
  const auto& f = fx();
  const std::vector<double> R{10.0, 100.0, 1000.0};
  const DecayReport d =
      verify_decay_conditions(RadialFunction::talenti(f.base), f.euclid, f.params, R, f.cfg);
  EXPECT_TRUE(d.l1_finite);
  EXPECT_TRUE(d.averages_decreasing);
  const DecayReport r =
      verify_decay_conditions(RadialFunction::talenti(f.base), f.rational, f.params, R, f.cfg);
  EXPECT_TRUE(r.l1_finite);
}

TEST(Estimator, EuclideanRecoversK) {
  const auto& f = fx();
  const RadialEstimate e = estimate_radial_constant(f.euclid, f.params, f.cfg);
  EXPECT_LT(oracle::rel(e.C_est, f.K), 1e-4);
  EXPECT_GE(e.min_quotient, f.Kp * (1 - 1e-6));
  double lo = INFINITY, hi = 0.0;
  for (const auto& [lam, q] : e.scan) {
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  EXPECT_LT((hi - lo) / lo, 1e-8);
}

TEST(Estimator, ConeNeverBelowK) {
  const auto& f = fx();
  const RadialEstimate e = estimate_radial_constant(f.cone, f.params, f.cfg);
  EXPECT_GE(e.C_est, f.K * (1 - 1e-6));
  // The radial infimum escapes to large lambda where V/V_E -> c^{m-1}.
  EXPECT_NEAR(std::pow(f.K / e.C_est, 4), std::pow(0.8, 3), 1e-4);
}

TEST(Estimator, DeterministicAcrossRuns) {
  const auto& f = fx();
  EstimatorOptions opts;
  opts.log10_lambda_lo = -1.0;
  opts.log10_lambda_hi = 2.0;
  const RadialEstimate a = estimate_radial_constant(f.rational, f.params, f.cfg, opts, Exec::serial);
  const RadialEstimate b =
      estimate_radial_constant(f.rational, f.params, f.cfg, opts, Exec::parallel);
  EXPECT_EQ(a.C_est, b.C_est);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Estimator, RefusesBoundedGrowth) {
  const auto& f = fx();
  const ModelManifold flat = ModelManifold::conical(4, 0.0, 500.0, 1e-2);
  EXPECT_LT(window_growth_ratio(flat), 1e-6);
  try {
    estimate_radial_constant(flat, f.params, f.cfg);
    FAIL() << "estimator ran on a bounded model";
  } catch (const SobolevUnsupported& e) {
    EXPECT_NE(std::string(e.what()).find("Sobolev inequality unsupported"), std::string::npos);
  }
}
