#pragma once

// Rotationally symmetric model manifolds ds^2 + h(s)^2 dtheta^2 over the
// round (m-1)-sphere. Two families:
//   * M_h with h'' = G h, h(0) = 0, h'(0) = 1 for a curvature bound G >= 0;
//   * cones h(t) = c t + (1 - c)(1 - e^-t), 0 <= c <= 1, which have Ric >= 0.
// All geometry is radial: A(t) = omega h(t)^(m-1), V(t) = int_0^t A.

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sobrig/checks.hpp"
#include "sobrig/curvature.hpp"
#include "sobrig/kernels.hpp"
#include "sobrig/numerics.hpp"

namespace sobrig {

/// An integral over the whole model could not be certified beyond the window.
class TailBoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModelManifold {
 public:
  static ModelManifold build(int m, const CurvatureProfile& profile, double t_max, double step,
                             Exec exec = Exec::parallel);
  static ModelManifold conical(int m, double c, double t_max, double step,
                               Exec exec = Exec::parallel);

  int m() const { return m_; }
  /// Lower curvature bound: Ric >= -(m-1) G. Cones report the zero profile.
  const CurvatureProfile& profile() const { return profile_; }
  double b() const { return profile_.moment(); }
  double t_max() const { return warping_.t_max; }
  double omega_sphere() const { return omega_sphere_; }
  const IvpSolution& warping() const { return warping_; }
  bool is_cone() const { return cone_.has_value(); }
  bool is_euclidean() const;
  std::string describe() const;

  // Window quantities, 0 <= t <= t_max (std::out_of_range otherwise).
  double h(double t) const { return warping_.value(t); }
  double h_prime(double t) const { return warping_.deriv(t); }
  /// From the ODE identity G h, or the closed form for cones.
  double h_second(double t) const;
  double area(double t) const;
  double volume(double t) const;
  /// -(m-1) h''/h, t > 0.
  double radial_ricci(double t) const;
  /// Delta r = (m-1) h'/h, t > 0.
  double laplacian_radial(double t) const;
  double euclidean_area(double t) const;
  double euclidean_volume(double t) const;
  double volume_ratio(double t) const { return volume(t) / euclidean_volume(t); }

  // Whole-model quantities on [0, inf). Beyond t_max the warping function is
  // continued on a geometric grid up to far_end() and linearly afterwards.
  bool has_extension() const { return extension_ok_; }
  double far_end() const { return far_end_; }
  /// Relative bound on the error of the linear continuation past far_end().
  double far_tail_relative_bound() const;
  double extended_h(double t) const;
  double extended_area(double t) const;

  /// int_0^inf f(t) A(t) dt. `scale` is the length scale of f; hints describe f*A.
  /// Throws TailBoundError when the continuation cannot be certified.
  double integrate(const RealFn& f, double scale, const QuadratureConfig& cfg,
                   const EndpointHints& hints = {}) const;
  /// int_a^b f(t) A(t) dt on the extended domain.
  double integrate_range(const RealFn& f, double a, double b, const QuadratureConfig& cfg) const;

 private:
  ModelManifold() = default;
  void finish(Exec exec);
  void build_extension();

  int m_ = 0;
  CurvatureProfile profile_ = CurvatureProfile::zero();
  std::optional<double> cone_;
  double omega_sphere_ = 0.0;
  IvpSolution warping_;
  std::vector<double> cumulative_volume_;

  bool extension_ok_ = false;
  std::string extension_issue_;
  double far_end_ = 0.0;
  std::vector<double> outer_grid_;
  std::vector<double> outer_h_;
  std::vector<double> outer_dh_;
  std::vector<double> outer_ddh_;
};

/// Build from a spec string: zero | const:<a>:<t_cut> | rational:<b0> |
/// table:<path> | cone:<c>. Throws std::invalid_argument on bad specs.
ModelManifold build_model_from_spec(std::string_view spec, int m, double t_max, double step,
                                    Exec exec = Exec::parallel);
CurvatureProfile parse_profile(std::string_view spec);

struct VolumeChainOptions {
  /// Use this moment in the upper chains instead of the model's own b.
  std::optional<double> b_claim;
  /// Plays the role of B_t in the area-ratio monotonicity check.
  const ModelManifold* inner = nullptr;
  double rel_slack = 1e-8;
};

/// Comparison chains on the grid. For G-built models:
///   V(B_t) <= V(B^h_t), A(B_t) <= A(B^h_t)      (Euclidean balls below),
///   A(B^h_t) <= e^{b(m-1)} A(B_t), V(B^h_t) <= e^{bm} V(B_t),
///   Delta r <= (m-1) e^b / t.
/// Cones only get the upper chains (with b = 0). Failures are reported.
std::vector<CheckRow> verify_volume_chain(const ModelManifold& model,
                                          std::span<const double> t_grid,
                                          const VolumeChainOptions& opts = {},
                                          Exec exec = Exec::parallel);

}  // namespace sobrig
