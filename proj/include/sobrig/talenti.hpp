#pragma once

// Euclidean extremal theory: the Bliss-Aubin-Talenti profiles
//
//   phi_lambda(t) = beta * lambda^((m-p)/p^2) / (lambda + t^(p/(p-1)))^(m/p - 1),
//
// their normalisation beta(m,p), the sharp constant K(m,p) and the radial
// Yamabe-type identity they satisfy.

#include <span>
#include <vector>

#include "sobrig/kernels.hpp"
#include "sobrig/numerics.hpp"

namespace sobrig {

/// Exponent data (m, p, p*). Construct through make(); p* is always derived.
class SobolevParams {
 public:
  /// Throws std::invalid_argument unless m >= 2 and m > p > 1.
  static SobolevParams make(int m, double p);

  int m() const { return m_; }
  double p() const { return p_; }
  double p_star() const { return p_star_; }
  /// Conjugate exponent q = p / (p - 1); the profile depends on t through t^q.
  double q() const { return p_ / (p_ - 1.0); }
  double dim() const { return static_cast<double>(m_); }

  bool operator==(const SobolevParams&) const = default;

 private:
  SobolevParams(int m, double p);
  int m_;
  double p_;
  double p_star_;
};

/// Volume of the unit m-ball.
double unit_ball_volume(int m);
/// Area of the unit (m-1)-sphere, m * unit_ball_volume(m).
double unit_sphere_area(int m);

/// One member of the extremal family. Immutable value type.
struct TalentiProfile {
  SobolevParams params;
  double lambda;
  double beta;
  double omega_m;
  double omega_sphere;

  double phi(double t) const;
  double phi_prime(double t) const;
  /// Requires t > 0.
  double phi_second(double t) const;
  /// V(B_t) d/dt(-phi^{p*}), the mass density of the lambda -> inf argument.
  double density(double t) const;
  /// Natural length scale lambda^(1/q) of the bubble.
  double scale() const;

  TalentiProfile with_lambda(double new_lambda) const;
};

/// Tail split max(1, scale) used for every Talenti-type integral.
QuadratureConfig talenti_config(const QuadratureConfig& cfg, double scale);

/// omega_sphere * int_0^inf (phi/beta)^{p*} t^{m-1} dt at the given lambda.
double unnormalized_mass(const SobolevParams& params, double lambda, const QuadratureConfig& cfg);

/// beta such that the profile has unit L^{p*} mass; computed at lambda = 1 and
/// cross-checked at lambda = 10 (relative agreement 1e-8, else ConvergenceError).
double normalize_beta(const SobolevParams& params, const QuadratureConfig& cfg);

TalentiProfile make_profile(const SobolevParams& params, double lambda, const QuadratureConfig& cfg);
/// Profile from an already known beta (no quadrature).
TalentiProfile make_profile(const SobolevParams& params, double lambda, double beta);

/// int_{R^m} phi_lambda^{p*} dx.
double euclidean_mass(const TalentiProfile& profile, const QuadratureConfig& cfg);
/// int_{R^m} |grad phi_lambda|^p dx, i.e. K^{-p}.
double euclidean_energy(const TalentiProfile& profile, const QuadratureConfig& cfg);

/// K(m,p) evaluated at a given lambda for a given beta.
double sharp_constant_at(const SobolevParams& params, double beta, double lambda,
                         const QuadratureConfig& cfg);

/// K(m,p) at lambda = 1, self-checked at lambda in {0.5, 5, 20} to 1e-6.
double sharp_constant(const SobolevParams& params, const QuadratureConfig& cfg);

/// Relative residual of
///   |phi'|^{p-2} ((p-1) phi'' + (m-1)/t phi') + K^{-p} phi^{p*-1} = 0,
/// divided by K^{-p} phi^{p*-1}(t). Requires t > 0.
double yamabe_residual(const TalentiProfile& profile, double K, double t);

std::vector<double> yamabe_residuals(const TalentiProfile& profile, double K,
                                     std::span<const double> ts, Exec exec = Exec::parallel);

/// Decay exponents of the integrands used above (f ~ t^-k at infinity).
EndpointHints mass_hints(const SobolevParams& params);
EndpointHints energy_hints(const SobolevParams& params);

}  // namespace sobrig
