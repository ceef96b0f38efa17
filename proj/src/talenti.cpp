#include "sobrig/talenti.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace sobrig {

SobolevParams::SobolevParams(int m, double p)
    : m_(m), p_(p), p_star_(static_cast<double>(m) * p / (static_cast<double>(m) - p)) {}

SobolevParams SobolevParams::make(int m, double p) {
  if (m < 2 || !std::isfinite(p) || !(p > 1.0) || !(p < static_cast<double>(m))) {
    std::ostringstream os;
    os << "invalid exponents (m=" << m << ", p=" << p << "): constraint m > p > 1 violated";
    throw std::invalid_argument(os.str());
  }
  return SobolevParams(m, p);
}

double unit_ball_volume(int m) {
  const double half = 0.5 * static_cast<double>(m);
  return std::pow(std::numbers::pi, half) / gamma_fn(half + 1.0);
}

double unit_sphere_area(int m) {
  const double half = 0.5 * static_cast<double>(m);
  return 2.0 * std::pow(std::numbers::pi, half) / gamma_fn(half);
}

// ---------------------------------------------------------------------------
// Profile evaluation
// ---------------------------------------------------------------------------

namespace {

// beta * lambda^((m-p)/p^2), the t-independent prefactor of phi.
double amplitude(const TalentiProfile& u) {
  const double p = u.params.p();
  return u.beta * std::pow(u.lambda, (u.params.dim() - p) / (p * p));
}

double exponent_e(const SobolevParams& params) { return (params.dim() - params.p()) / params.p(); }

}  // namespace

double TalentiProfile::phi(double t) const {
  if (t < 0.0) throw std::domain_error("phi: t must be >= 0");
  const double base = lambda + std::pow(t, params.q());
  return amplitude(*this) * std::pow(base, -exponent_e(params));
}

double TalentiProfile::phi_prime(double t) const {
  if (t < 0.0) throw std::domain_error("phi_prime: t must be >= 0");
  const double q = params.q();
  const double e = exponent_e(params);
  const double base = lambda + std::pow(t, q);
  return -amplitude(*this) * e * q * std::pow(t, q - 1.0) * std::pow(base, -e - 1.0);
}

double TalentiProfile::phi_second(double t) const {
  if (!(t > 0.0)) throw std::domain_error("phi_second: t must be > 0");
  const double q = params.q();
  const double e = exponent_e(params);
  const double tq = std::pow(t, q);
  const double base = lambda + tq;
  const double first = (q - 1.0) * std::pow(t, q - 2.0) * std::pow(base, -e - 1.0);
  const double second = (e + 1.0) * q * std::pow(t, 2.0 * q - 2.0) * std::pow(base, -e - 2.0);
  return -amplitude(*this) * e * q * (first - second);
}

double TalentiProfile::density(double t) const {
  if (t < 0.0) throw std::domain_error("density: t must be >= 0");
  const double m = params.dim();
  const double p = params.p();
  const double q = params.q();
  const double base = lambda + std::pow(t, q);
  const double ratio = std::pow(std::pow(lambda, 1.0 / p) / base, m);
  return omega_m * (m * p / (p - 1.0)) * std::pow(beta, params.p_star()) * ratio *
         std::pow(t, q - 1.0 + m) / base;
}

double TalentiProfile::scale() const { return std::pow(lambda, 1.0 / params.q()); }

TalentiProfile TalentiProfile::with_lambda(double new_lambda) const {
  if (!(new_lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  TalentiProfile out = *this;
  out.lambda = new_lambda;
  return out;
}

// ---------------------------------------------------------------------------
// Normalisation and sharp constant
// ---------------------------------------------------------------------------

QuadratureConfig talenti_config(const QuadratureConfig& cfg, double scale) {
  return cfg.with_tail_split(std::max(1.0, scale));
}

EndpointHints mass_hints(const SobolevParams& params) {
  return {std::nullopt, params.dim() / (params.p() - 1.0) + 1.0};
}

EndpointHints energy_hints(const SobolevParams& params) {
  return {std::nullopt, (params.dim() - 1.0) / (params.p() - 1.0)};
}

double unnormalized_mass(const SobolevParams& params, double lambda, const QuadratureConfig& cfg) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  const double m = params.dim();
  const double q = params.q();
  const double root = std::pow(lambda, 1.0 / params.p());
  const RealFn f = [=](double t) {
    return std::pow(root / (lambda + std::pow(t, q)), m) * std::pow(t, m - 1.0);
  };
  const double scale = std::pow(lambda, 1.0 / q);
  return unit_sphere_area(params.m()) *
         integrate_semi_infinite(f, talenti_config(cfg, scale), mass_hints(params));
}

double normalize_beta(const SobolevParams& params, const QuadratureConfig& cfg) {
  const double at_one = unnormalized_mass(params, 1.0, cfg);
  const double at_ten = unnormalized_mass(params, 10.0, cfg);
  if (std::abs(at_one / at_ten - 1.0) > 1e-8) {
    std::ostringstream os;
    os.precision(12);
    os << "normalize_beta: lambda-invariance check failed (" << at_one << " vs " << at_ten << ")";
    throw ConvergenceError(os.str());
  }
  return std::pow(at_one, -1.0 / params.p_star());
}

TalentiProfile make_profile(const SobolevParams& params, double lambda, double beta) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  return TalentiProfile{params, lambda, beta, unit_ball_volume(params.m()),
                        unit_sphere_area(params.m())};
}

TalentiProfile make_profile(const SobolevParams& params, double lambda, const QuadratureConfig& cfg) {
  return make_profile(params, lambda, normalize_beta(params, cfg));
}

double euclidean_mass(const TalentiProfile& u, const QuadratureConfig& cfg) {
  const double ps = u.params.p_star();
  const double m = u.params.dim();
  const RealFn f = [&u, ps, m](double t) { return std::pow(u.phi(t), ps) * std::pow(t, m - 1.0); };
  return u.omega_sphere * integrate_semi_infinite(f, talenti_config(cfg, u.scale()), mass_hints(u.params));
}

double euclidean_energy(const TalentiProfile& u, const QuadratureConfig& cfg) {
  const double p = u.params.p();
  const double m = u.params.dim();
  const RealFn f = [&u, p, m](double t) {
    return std::pow(std::abs(u.phi_prime(t)), p) * std::pow(t, m - 1.0);
  };
  return u.omega_sphere *
         integrate_semi_infinite(f, talenti_config(cfg, u.scale()), energy_hints(u.params));
}

double sharp_constant_at(const SobolevParams& params, double beta, double lambda,
                         const QuadratureConfig& cfg) {
  const double energy = euclidean_energy(make_profile(params, lambda, beta), cfg);
  return std::pow(energy, -1.0 / params.p());
}

double sharp_constant(const SobolevParams& params, const QuadratureConfig& cfg) {
  const double beta = normalize_beta(params, cfg);
  const double K = sharp_constant_at(params, beta, 1.0, cfg);
  for (double lambda : {0.5, 5.0, 20.0}) {
    const double other = sharp_constant_at(params, beta, lambda, cfg);
    if (std::abs(other / K - 1.0) > 1e-6) {
      std::ostringstream os;
      os.precision(12);
      os << "sharp_constant: scaling self-test failed at lambda=" << lambda << " (" << other
         << " vs " << K << ")";
      throw ConvergenceError(os.str());
    }
  }
  return K;
}

double yamabe_residual(const TalentiProfile& u, double K, double t) {
  if (!(t > 0.0)) throw std::domain_error("yamabe_residual: t must be > 0");
  const double m = u.params.dim();
  const double p = u.params.p();
  const double d1 = u.phi_prime(t);
  const double d2 = u.phi_second(t);
  const double reaction = std::pow(K, -p) * std::pow(u.phi(t), u.params.p_star() - 1.0);
  const double operator_part =
      std::pow(std::abs(d1), p - 2.0) * ((p - 1.0) * d2 + (m - 1.0) / t * d1);
  return (operator_part + reaction) / reaction;
}

std::vector<double> yamabe_residuals(const TalentiProfile& profile, double K,
                                     std::span<const double> ts, Exec exec) {
  return map_grid(ts, [&](double t) { return yamabe_residual(profile, K, t); }, exec);
}

}  // namespace sobrig
