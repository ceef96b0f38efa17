#pragma once

// Deterministic numerical kernels: adaptive quadrature on finite and
// semi-infinite intervals, a checked Gamma function, a fixed-step RK4 integrator
// for the warping equation h'' = G h, quintic Hermite interpolation and a
// deterministic Nelder-Mead minimiser.

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sobrig {

using RealFn = std::function<double(double)>;

/// Adaptive quadrature exhausted its subdivision budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ODE integration produced a non-finite state or an unreasonable step count.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadratureConfig {
  double abs_tol = 1e-14;
  double rel_tol = 1e-11;
  int max_depth = 48;
  /// Start of the algebraic tail map t = tail_split / (1 - s).
  double tail_split = 1.0;

  void validate() const;
  QuadratureConfig with_tail_split(double t) const {
    QuadratureConfig c = *this;
    c.tail_split = t;
    return c;
  }
  QuadratureConfig tightened(double factor) const {
    QuadratureConfig c = *this;
    c.abs_tol *= factor;
    c.rel_tol *= factor;
    return c;
  }
};

/// Leading-order behaviour of an integrand at the ends of [0, inf).
/// With `power_at_zero = k` the integrators assume f(t) ~ c t^k near 0 (k > -1)
/// and replace [0, 1e-8] by its analytic contribution. With `decay_power = k`
/// they assume f(t) ~ c t^-k at infinity (k > 1) and add the analytic
/// remainder beyond the last transformed abscissa. Without a decay power the
/// integrand must decay faster than t^-2.
struct EndpointHints {
  std::optional<double> power_at_zero;
  std::optional<double> decay_power;
};

/// Euler Gamma function for x > 0; throws std::domain_error otherwise.
double gamma_fn(double x);

double integrate_finite(const RealFn& f, double a, double b, const QuadratureConfig& cfg);

/// Integral over [0, inf): [0, tail_split] by adaptive Simpson on geometric
/// panels, [tail_split, inf) through t = tail_split / (1 - s).
double integrate_semi_infinite(const RealFn& f, const QuadratureConfig& cfg,
                               const EndpointHints& hints = {});

/// Integral over [a, inf) for a > 0, transformed directly from a.
double integrate_tail(const RealFn& f, double a, const QuadratureConfig& cfg,
                      const EndpointHints& hints = {});

// ---------------------------------------------------------------------------
// Warping-function IVP
// ---------------------------------------------------------------------------

struct IvpSolution {
  std::vector<double> grid;
  std::vector<double> values;   // h(t_i)
  std::vector<double> derivs;   // h'(t_i)
  std::vector<double> seconds;  // h''(t_i) = G(t_i) h(t_i)
  double step = 0.0;
  double t_max = 0.0;
  /// max |h_step - h_step/2| over the coarse nodes.
  double error_estimate = 0.0;

  std::size_t interval(double t) const;
  double value(double t) const;
  double deriv(double t) const;
};

/// Classic RK4 for h'' = G h, h(t0) = h0, h'(t0) = h1 on an arbitrary
/// strictly increasing grid. Returns (h, h') at every grid point.
void rk4_linear_second_order(const RealFn& G, std::span<const double> grid, double h0, double h1,
                             std::vector<double>& h, std::vector<double>& dh);

/// Nodes i*step for i < n and t_max as the last node.
std::vector<double> uniform_grid(double t_max, double step);

/// h'' - G h = 0, h(0) = 0, h'(0) = 1 on [0, t_max] with fixed step.
IvpSolution solve_h_ivp(const RealFn& G, double t_max, double step);

/// Quintic Hermite interpolant through (y, y', y'') at both ends of [t0, t1].
struct HermiteValue {
  double value;
  double deriv;
};
HermiteValue hermite5(double t, double t0, double t1, double y0, double d0, double s0, double y1,
                      double d1, double s1);

// ---------------------------------------------------------------------------
// Nelder-Mead
// ---------------------------------------------------------------------------

struct NelderMeadOptions {
  double diameter_tol = 1e-6;
  int max_iterations = 500;
};

struct NelderMeadResult {
  std::vector<double> x;
  double fx = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Deterministic simplex search. The initial simplex is x0 plus x0 + steps[i] e_i.
/// Infeasible points may be signalled by returning +inf.
NelderMeadResult minimize_nelder_mead(const std::function<double(std::span<const double>)>& f,
                                      std::vector<double> x0, std::span<const double> steps,
                                      const NelderMeadOptions& opts = {});

/// n points log-spaced on [lo, hi], endpoints included.
std::vector<double> log_grid(double lo, double hi, std::size_t n);
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

}  // namespace sobrig
