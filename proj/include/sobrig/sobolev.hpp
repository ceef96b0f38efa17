#pragma once

// Radial Sobolev functionals on model manifolds and a deterministic search
// for the best radial constant.

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sobrig/kernels.hpp"
#include "sobrig/model_manifold.hpp"
#include "sobrig/numerics.hpp"
#include "sobrig/talenti.hpp"

namespace sobrig {

/// Multiplicative bump 1 + a exp(-(ln t - mu)^2 / sigma^2).
struct Bump {
  double a = 0.0;
  double mu = 0.0;
  double sigma = 1.0;

  double value(double t) const;
  double deriv(double t) const;
};

class RadialFunction {
 public:
  enum class Kind { talenti, perturbed_talenti, custom };

  static RadialFunction talenti(const TalentiProfile& profile);
  /// Requires a > -1 and sigma > 0 so that the function stays positive.
  static RadialFunction perturbed(const TalentiProfile& profile, const Bump& bump);
  /// u ~ t^-decay_order at infinity; `scale` is where u varies.
  static RadialFunction custom(RealFn u, RealFn du, double decay_order, double scale = 1.0);

  double operator()(double t) const;
  double deriv(double t) const;
  /// The same function multiplied by c > 0.
  RadialFunction scaled(double c) const;

  Kind kind() const { return kind_; }
  double decay_order() const { return decay_order_; }
  double scale() const { return scale_; }
  double multiplier() const { return multiplier_; }
  const std::optional<TalentiProfile>& profile() const { return profile_; }
  const std::optional<Bump>& bump() const { return bump_; }

 private:
  RadialFunction() = default;

  Kind kind_ = Kind::custom;
  std::optional<TalentiProfile> profile_;
  std::optional<Bump> bump_;
  RealFn u_;
  RealFn du_;
  double decay_order_ = 0.0;
  double scale_ = 1.0;
  double multiplier_ = 1.0;
};

/// max over ts of |u' - central difference| / max(|u'|, tiny).
double derivative_mismatch(const RadialFunction& u, std::span<const double> ts);

/// int |u'|^p A dt over the whole model.
double gradient_energy(const RadialFunction& u, const ModelManifold& M, double p,
                       const QuadratureConfig& cfg);
/// int u^{p*} A dt over the whole model.
double mass_pstar(const RadialFunction& u, const ModelManifold& M, const SobolevParams& params,
                  const QuadratureConfig& cfg);

struct Quotients {
  double energy = 0.0;
  double mass = 0.0;
  /// energy / mass
  double plain = 0.0;
  /// energy / mass^{p/p*}
  double sobolev = 0.0;
};

/// Throws std::domain_error on zero mass.
Quotients evaluate_quotients(const RadialFunction& u, const ModelManifold& M,
                             const SobolevParams& params, const QuadratureConfig& cfg);
double quotient_plain(const RadialFunction& u, const ModelManifold& M, const SobolevParams& params,
                      const QuadratureConfig& cfg);
double quotient_sobolev(const RadialFunction& u, const ModelManifold& M,
                        const SobolevParams& params, const QuadratureConfig& cfg);

struct DecayReport {
  /// int t^-1 u |u'|^{p-1} A dt, +inf if the tail could not be certified.
  double weighted_l1 = 0.0;
  bool l1_finite = false;
  std::string l1_issue;
  /// (R, R^-1 int_0^R u |u'|^{p-1} A dt)
  std::vector<std::pair<double, double>> averages;
  bool averages_decreasing = false;
};

DecayReport verify_decay_conditions(const RadialFunction& u, const ModelManifold& M,
                                    const SobolevParams& params, std::span<const double> R_grid,
                                    const QuadratureConfig& cfg);

/// The model's volume growth is too weak for a Sobolev inequality.
class SobolevUnsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// min over log-spaced window points of V/V_E; the estimator refuses below 1e-6.
double window_growth_ratio(const ModelManifold& M);

struct RadialEstimate {
  /// Witness bound: C_est <= C_M.
  double C_est = 0.0;
  double min_quotient = 0.0;
  double lambda = 1.0;
  Bump bump;
  /// lambda scan (lambda, sobolev quotient) before the simplex search.
  std::vector<std::pair<double, double>> scan;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  /// Simplex points whose quadrature failed and were treated as infeasible.
  int failed_evaluations = 0;
};

struct EstimatorOptions {
  double log10_lambda_lo = -6.0;
  double log10_lambda_hi = 8.0;
  double log10_lambda_step = 0.5;
  NelderMeadOptions simplex;
};

RadialEstimate estimate_radial_constant(const ModelManifold& M, const SobolevParams& params,
                                        const QuadratureConfig& cfg,
                                        const EstimatorOptions& opts = {},
                                        Exec exec = Exec::parallel);

}  // namespace sobrig
