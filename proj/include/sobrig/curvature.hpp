#pragma once

// Radial curvature bounds G(t) >= 0 with Ric >= -(m-1) G(r), together with
// the first moment b = int_0^inf t G(t) dt.

#include <cmath>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sobrig/numerics.hpp"

namespace sobrig {

class CurvatureProfile {
 public:
  enum class Kind { zero, constant_cutoff, rational_decay, tabulated };

  static CurvatureProfile zero();
  /// G = a on [0, t_cut], linear ramp to 0 on [t_cut, t_cut + 1], 0 afterwards.
  /// t_cut = inf gives G == a, whose moment is infinite.
  static CurvatureProfile constant_cutoff(double a, double t_cut);
  /// G(t) = 2 b0 / (1 + t^2)^2, moment exactly b0.
  static CurvatureProfile rational_decay(double b0);
  /// Piecewise-linear G through (grid, values), continued as
  /// G_n (t_n / t)^tail_power beyond the last node. Requires grid[0] = 0 and
  /// tail_power > 2.
  static CurvatureProfile tabulated(std::vector<double> grid, std::vector<double> values,
                                    double tail_power);
  /// Two-column "t G" table with a `# tail_power=<q>` directive line.
  static CurvatureProfile from_table_file(const std::filesystem::path& path);

  double operator()(double t) const;
  Kind kind() const { return kind_; }
  /// b = int_0^inf t G(t) dt; +inf when the integrability condition fails.
  double moment() const { return moment_; }
  bool finite_moment() const { return std::isfinite(moment_); }
  /// int_T^inf t G(t) dt.
  double tail_moment(double T) const;
  std::string describe() const;
  /// Abscissae where G is not smooth.
  std::vector<double> breakpoints() const;
  double tail_power() const { return tail_power_; }

 private:
  CurvatureProfile() = default;
  double head_moment_table(double T) const;

  Kind kind_ = Kind::zero;
  double a_ = 0.0;
  double t_cut_ = 0.0;
  double b0_ = 0.0;
  std::vector<double> grid_;
  std::vector<double> values_;
  double tail_power_ = 0.0;
  std::string source_;
  double moment_ = 0.0;
};

/// b recomputed by quadrature of t G(t); an independent check on moment().
double quadrature_moment(const CurvatureProfile& profile, const QuadratureConfig& cfg);

}  // namespace sobrig
