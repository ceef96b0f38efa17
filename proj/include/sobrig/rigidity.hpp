#pragma once

// Rigidity constants and the volume-comparison checks built from them.
//
//   C2    = (m-1)^2 p/(m-p) ((m-p)/(p-1))^{p-1} beta^{-p^2/(m-p)} (e^b - 1) e^{b(m-1)} / gamma
//   C3    = [(C_M/K)^p + C_M^p C2]^{m/p}
//   C_hat = C3^{-1} e^{-b(m-1)}
//
// C1 is the lambda-dependent quantity that C2 bounds; it is computed by
// quadrature over the model.

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sobrig/checks.hpp"
#include "sobrig/kernels.hpp"
#include "sobrig/model_manifold.hpp"
#include "sobrig/numerics.hpp"
#include "sobrig/talenti.hpp"

namespace sobrig {

/// inf over t_grid of V(B_t)/V_E(t), capped at 1.
double gamma_lower_bound(const ModelManifold& M, std::span<const double> t_grid,
                         Exec exec = Exec::parallel);
/// 200 log-spaced points on [1e-3, t_max].
std::vector<double> default_gamma_grid(double t_max);

double c1(const SobolevParams& params, double beta, double lambda, double b,
          const ModelManifold& M, const QuadratureConfig& cfg);
/// Throws std::invalid_argument unless gamma > 0 and b >= 0.
double c2(const SobolevParams& params, double beta, double b, double gamma);
/// Throws std::invalid_argument if C_M < K (relative 1e-12) or C2 < 0.
double c3(const SobolevParams& params, double C_M, double K, double C2);
double c_hat(double C3, double b, const SobolevParams& params);

struct VProfile {
  std::vector<std::pair<double, double>> values;
  bool nonincreasing = true;
  /// Largest step-to-step increase (<= 0 when strictly monotone).
  double max_increase = 0.0;
  /// First grid point where v drops from > 0 to <= 0.
  std::optional<double> sign_change;
};

/// v(t) = scale V_M(t) / V_comp(t) - 1; the comparison defaults to R^m.
VProfile v_profile(const ModelManifold& M, const ModelManifold* comparison, double scale,
                   std::span<const double> t_grid, double step_slack = 1e-9);

struct MassEscapeRow {
  double lambda;
  double head;
  double tail;
  double sum;
};

struct MassEscapeReport {
  double T = 1.0;
  double threshold = 0.01;
  std::vector<MassEscapeRow> rows;
  bool sums_ok = false;
  bool head_monotone = false;
  bool final_below_threshold = false;
  /// head(lambda0) = threshold, by bisection in log lambda.
  std::optional<double> lambda0;
  bool pass() const { return sums_ok && head_monotone && final_below_threshold; }
};

/// Splits the unit mass of phi_lambda at T. Requires T > 0, an increasing grid with min >= 10.
MassEscapeReport mass_escape_experiment(const SobolevParams& params, double T,
                                        std::span<const double> lambda_grid,
                                        const QuadratureConfig& cfg, double threshold = 0.01,
                                        double sum_tol = 1e-6, Exec exec = Exec::parallel);

enum class Mode { theorem1, theorem2 };
const char* to_string(Mode mode);

struct RatioRow {
  double t;
  double ratio;
  double lower;
  double upper;
  bool pass;
  double v;
};

struct RigidityReport {
  SobolevParams params = SobolevParams::make(2, 1.5);
  std::string model;
  Mode mode = Mode::theorem1;
  double K = 0.0;
  double C_M = 0.0;
  std::string C_M_source;
  double b = 0.0;
  double gamma = 1.0;
  std::string gamma_source;
  std::optional<double> C1;
  double C2 = 0.0;
  double C3 = 1.0;
  double C_hat = 1.0;
  std::vector<RatioRow> ratio_table;
  VProfile v;
  bool consistent = false;
  std::string verdict_details;
  std::vector<std::pair<std::string, std::string>> notes;
};

struct TheoremOptions {
  std::string C_M_source = "value";
  /// Required in theorem2 mode.
  std::optional<double> gamma;
  std::string gamma_source = "value";
  double rel_tol = 1e-8;
  /// Lower limit on v at the end of the grid.
  double v_final_floor = -1e-4;
  /// lambda used for the C1 <= C2 cross-check (theorem2 only).
  double c1_lambda = 1.0;
};

/// theorem1 mode needs b = 0 and radial Ricci >= 0 on the grid; theorem2
/// mode needs finite b. Both need C_M >= K. Hypothesis violations
/// throw std::invalid_argument; failed inequalities are reported.
RigidityReport verify_theorem(const ModelManifold& M, const SobolevParams& params, double C_M,
                              double K, Mode mode, std::span<const double> t_grid, const QuadratureConfig& cfg,
                              const TheoremOptions& opts = {}, Exec exec = Exec::parallel);

}  // namespace sobrig
