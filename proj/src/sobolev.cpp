#include "sobrig/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sobrig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGrowthFloor = 1e-6;

EndpointHints energy_hints_on(const RadialFunction& u, int m, double p) {
  EndpointHints h;
  const double k = p * (u.decay_order() + 1.0) - (m - 1);
  if (k > 1.0) h.decay_power = k;
  if (u.kind() != RadialFunction::Kind::custom) {
    const double q = p / (p - 1.0);
    h.power_at_zero = q + m - 1;
  }
  return h;
}

EndpointHints mass_hints_on(const RadialFunction& u, int m, double p_star) {
  EndpointHints h;
  const double k = p_star * u.decay_order() - (m - 1);
  if (k > 1.0) h.decay_power = k;
  if (u.kind() != RadialFunction::Kind::custom) h.power_at_zero = m - 1;
  return h;
}

}  // namespace

double Bump::value(double t) const {
  if (!(t > 0.0)) return 1.0;
  const double z = (std::log(t) - mu) / sigma;
  return 1.0 + a * std::exp(-z * z);
}

double Bump::deriv(double t) const {
  if (!(t > 0.0)) return 0.0;
  const double z = (std::log(t) - mu) / sigma;
  return a * std::exp(-z * z) * (-2.0 * z / sigma) / t;
}

RadialFunction RadialFunction::talenti(const TalentiProfile& profile) {
  RadialFunction u;
  u.kind_ = Kind::talenti;
  u.profile_ = profile;
  const SobolevParams& s = profile.params;
  u.decay_order_ = (s.dim() - s.p()) / (s.p() - 1.0);
  u.scale_ = profile.scale();
  return u;
}

RadialFunction RadialFunction::perturbed(const TalentiProfile& profile, const Bump& bump) {
  if (!(bump.a > -1.0)) throw std::invalid_argument("bump amplitude must exceed -1");
  if (!(bump.sigma > 0.0)) throw std::invalid_argument("bump width must be positive");
  RadialFunction u = talenti(profile);
  u.kind_ = Kind::perturbed_talenti;
  u.bump_ = bump;
  return u;
}

RadialFunction RadialFunction::custom(RealFn u, RealFn du, double decay_order, double scale) {
  if (!u || !du) throw std::invalid_argument("custom radial function needs u and u'");
  if (!(scale > 0.0)) throw std::invalid_argument("custom radial function scale must be > 0");
  RadialFunction f;
  f.kind_ = Kind::custom;
  f.u_ = std::move(u);
  f.du_ = std::move(du);
  f.decay_order_ = decay_order;
  f.scale_ = scale;
  return f;
}

double RadialFunction::operator()(double t) const {
  switch (kind_) {
    case Kind::talenti:
      return multiplier_ * profile_->phi(t);
    case Kind::perturbed_talenti:
      return multiplier_ * profile_->phi(t) * bump_->value(t);
    case Kind::custom:
      return multiplier_ * u_(t);
  }
  return 0.0;
}

double RadialFunction::deriv(double t) const {
  switch (kind_) {
    case Kind::talenti:
      return multiplier_ * profile_->phi_prime(t);
    case Kind::perturbed_talenti:
      return multiplier_ * (profile_->phi_prime(t) * bump_->value(t) +
                            profile_->phi(t) * bump_->deriv(t));
    case Kind::custom:
      return multiplier_ * du_(t);
  }
  return 0.0;
}

RadialFunction RadialFunction::scaled(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("scaling factor must be positive");
  RadialFunction out = *this;
  out.multiplier_ *= c;
  return out;
}

double derivative_mismatch(const RadialFunction& u, std::span<const double> ts) {
  double worst = 0.0;
  for (double t : ts) {
    const double h = 1e-5 * std::max(t, 1e-3);
    const double fd = (u(t + h) - u(t - h)) / (2.0 * h);
    const double d = u.deriv(t);
    worst = std::max(worst, std::abs(d - fd) / std::max(std::abs(d), 1e-300));
  }
  return worst;
}

double gradient_energy(const RadialFunction& u, const ModelManifold& M, double p,
                       const QuadratureConfig& cfg) {
  return M.integrate([&](double t) { return std::pow(std::abs(u.deriv(t)), p); }, u.scale(), cfg,
                     energy_hints_on(u, M.m(), p));
}

double mass_pstar(const RadialFunction& u, const ModelManifold& M, const SobolevParams& params,
                  const QuadratureConfig& cfg) {
  const double ps = params.p_star();
  return M.integrate([&](double t) { return std::pow(u(t), ps); }, u.scale(), cfg,
                     mass_hints_on(u, M.m(), ps));
}

Quotients evaluate_quotients(const RadialFunction& u, const ModelManifold& M,
                             const SobolevParams& params, const QuadratureConfig& cfg) {
  Quotients q;
  q.energy = gradient_energy(u, M, params.p(), cfg);
  q.mass = mass_pstar(u, M, params, cfg);
  if (!(q.mass > 0.0)) throw std::domain_error("quotient of a function with zero mass");
  q.plain = q.energy / q.mass;
  q.sobolev = q.energy / std::pow(q.mass, params.p() / params.p_star());
  return q;
}

double quotient_plain(const RadialFunction& u, const ModelManifold& M, const SobolevParams& params,
                      const QuadratureConfig& cfg) {
  return evaluate_quotients(u, M, params, cfg).plain;
}

double quotient_sobolev(const RadialFunction& u, const ModelManifold& M,
                        const SobolevParams& params, const QuadratureConfig& cfg) {
  return evaluate_quotients(u, M, params, cfg).sobolev;
}

DecayReport verify_decay_conditions(const RadialFunction& u, const ModelManifold& M,
                                    const SobolevParams& params, std::span<const double> R_grid,
                                    const QuadratureConfig& cfg) {
  const double p = params.p();
  const int m = M.m();
  DecayReport report;
  const auto core = [&](double t) { return u(t) * std::pow(std::abs(u.deriv(t)), p - 1.0); };
  EndpointHints hints;
  const double k = u.decay_order() + (u.decay_order() + 1.0) * (p - 1.0) - (m - 2);
  if (k > 1.0) hints.decay_power = k;
  try {
    report.weighted_l1 = M.integrate(
        [&](double t) { return t > 0.0 ? core(t) / t : 0.0; }, u.scale(), cfg, hints);
    report.l1_finite = std::isfinite(report.weighted_l1);
  } catch (const std::exception& e) {
    report.weighted_l1 = kInf;
    report.l1_issue = e.what();
  }
  report.averages_decreasing = true;
  for (double R : R_grid) {
    if (!(R > 0.0)) throw std::invalid_argument("R grid must be positive");
    const double avg = M.integrate_range(core, 0.0, R, cfg) / R;
    if (!report.averages.empty() && !(avg < report.averages.back().second)) {
      report.averages_decreasing = false;
    }
    report.averages.emplace_back(R, avg);
  }
  return report;
}

double window_growth_ratio(const ModelManifold& M) {
  const double t_max = M.t_max();
  double worst = kInf;
  for (double t : log_grid(std::min(1e-3, 0.5 * t_max), t_max, 200)) {
    worst = std::min(worst, M.volume_ratio(t));
  }
  return worst;
}

RadialEstimate estimate_radial_constant(const ModelManifold& M, const SobolevParams& params,
                                        const QuadratureConfig& cfg, const EstimatorOptions& opts,
                                        Exec exec) {
  if (params.m() != M.m()) throw std::invalid_argument("exponent dimension differs from model");
  const double growth = window_growth_ratio(M);
  if (growth < kGrowthFloor) {
    throw SobolevUnsupported("Sobolev inequality unsupported: V/V_E falls to " +
                             std::to_string(growth) + " on the window");
  }
  const TalentiProfile base = make_profile(params, 1.0, cfg);
  const double lo = std::log(std::pow(10.0, opts.log10_lambda_lo));
  const double hi = std::log(std::pow(10.0, opts.log10_lambda_hi));

  RadialEstimate est;
  const auto n_scan = static_cast<std::size_t>(
      std::llround((opts.log10_lambda_hi - opts.log10_lambda_lo) / opts.log10_lambda_step)) + 1;
  std::vector<double> lambdas(n_scan);
  for (std::size_t i = 0; i < n_scan; ++i) {
    lambdas[i] = std::pow(10.0, opts.log10_lambda_lo + opts.log10_lambda_step * i);
  }
  const std::vector<double> scan_q = map_grid(
      lambdas,
      [&](double lam) {
        return quotient_sobolev(RadialFunction::talenti(base.with_lambda(lam)), M, params, cfg);
      },
      exec);
  std::size_t best = 0;
  for (std::size_t i = 0; i < n_scan; ++i) {
    est.scan.emplace_back(lambdas[i], scan_q[i]);
    if (scan_q[i] < scan_q[best]) best = i;
  }

  constexpr double kAmpLo = -0.9;
  constexpr double kAmpHi = 10.0;
  constexpr double kLogSigmaBound = 3.0;
  int failures = 0;
  const auto objective = [&](std::span<const double> x) {
    if (x[0] < lo || x[0] > hi || x[1] < kAmpLo || x[1] > kAmpHi ||
        std::abs(x[3]) > kLogSigmaBound) {
      return kInf;
    }
    const Bump bump{x[1], x[2], std::exp(x[3])};
    try {
      return quotient_sobolev(RadialFunction::perturbed(base.with_lambda(std::exp(x[0])), bump), M,
                              params, cfg);
    } catch (const ConvergenceError&) {
      ++failures;
      return kInf;
    }
  };
  const double l0 = std::log(lambdas[best]);
  const double mu0 = std::log(base.with_lambda(lambdas[best]).scale());
  const std::vector<double> x0{l0, 0.0, mu0, 0.0};
  // Initial steps point into the feasible box.
  const std::vector<double> steps{l0 + 1.0 > hi ? -1.0 : 1.0, 0.5, 1.0, 0.5};
  const NelderMeadResult nm = minimize_nelder_mead(objective, x0, steps, opts.simplex);

  est.iterations = nm.iterations;
  est.evaluations = nm.evaluations + static_cast<int>(n_scan);
  est.converged = nm.converged;
  est.failed_evaluations = failures;
  if (nm.fx <= scan_q[best]) {
    est.min_quotient = nm.fx;
    est.lambda = std::exp(nm.x[0]);
    est.bump = Bump{nm.x[1], nm.x[2], std::exp(nm.x[3])};
  } else {
    est.min_quotient = scan_q[best];
    est.lambda = lambdas[best];
    est.bump = Bump{0.0, mu0, 1.0};
  }
  if (!(est.min_quotient > 0.0) || !std::isfinite(est.min_quotient)) {
    throw std::domain_error("degenerate radial quotient");
  }
  est.C_est = std::pow(est.min_quotient, -1.0 / params.p());
  return est;
}

}  // namespace sobrig
