#pragma once

// Independent reference values for the tests. Nothing here calls into the
// library: Beta-function reductions use std::tgamma, integrals use plain
// composite rules, ODEs a separate RK4 loop.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline double beta_fn(double a, double b) {
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

inline double sphere_area(int m) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m);
}

inline double ball_volume(int m) { return sphere_area(m) / m; }

/// beta^{-p*} = omega (1/q) B(m/q, m/p).
inline double talenti_beta(int m, double p) {
  const double q = p / (p - 1.0);
  const double ps = m * p / (m - p);
  return std::pow(sphere_area(m) / q * beta_fn(m / q, m / p), -1.0 / ps);
}

/// K^{-p} = beta^p e^p q^p omega (1/q) B(m/q + 1, m/p - 1), e = (m-p)/p.
inline double sharp_constant(int m, double p) {
  const double q = p / (p - 1.0);
  const double e = (m - p) / p;
  const double beta = talenti_beta(m, p);
  const double kp = std::pow(beta * e * q, p) * sphere_area(m) / q * beta_fn(m / q + 1.0, m / p - 1.0);
  return std::pow(kp, -1.0 / p);
}

struct Frozen {
  int m;
  double p;
  double beta;
  double K;
};

/// High-precision values (50-digit arithmetic, Beta reductions), frozen.
inline const std::vector<Frozen>& frozen_constants() {
  static const std::vector<Frozen> table = {
      {4, 2.0, 0.8830044174485630, 0.3121892056977780},
      {3, 2.0, 0.8602540138280996, 0.4272605428625267},
      {6, 3.0, 0.9945163776010667, 0.4176707062015940},
      {4, 1.5, 0.8508827181399232, 0.2106485591186771},
      {3, 1.5, 0.7815926417967720, 0.2605308805989240},
      {3, 2.5, 0.9249278307585648, 0.8432638599385208},
      {6, 1.5, 1.391075866368175, 0.1625306486664222},
      {6, 2.0, 1.246141073285066, 0.2278651897947799},
      {4, 3.0, 0.9138777581121429, 0.7632456238196516},
  };
  return table;
}

/// Composite trapezoid with n panels.
inline double trapezoid(const std::function<double(double)>& f, double a, double b, long n) {
  const double h = (b - a) / static_cast<double>(n);
  double s = 0.5 * (f(a) + f(b));
  for (long i = 1; i < n; ++i) s += f(a + h * static_cast<double>(i));
  return s * h;
}

/// Composite Simpson with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, long n) {
  if (n % 2) ++n;
  const double h = (b - a) / static_cast<double>(n);
  double s = f(a) + f(b);
  for (long i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
  return s * h / 3.0;
}

/// h'' = G h, h(0) = 0, h'(0) = 1 by fixed-step RK4; returns h at t_end.
inline double warping_rk4(const std::function<double(double)>& G, double t_end, long n) {
  const double dt = t_end / static_cast<double>(n);
  double y = 0.0;
  double v = 1.0;
  for (long i = 0; i < n; ++i) {
    const double t = dt * static_cast<double>(i);
    const double k1y = v, k1v = G(t) * y;
    const double k2y = v + 0.5 * dt * k1v, k2v = G(t + 0.5 * dt) * (y + 0.5 * dt * k1y);
    const double k3y = v + 0.5 * dt * k2v, k3v = G(t + 0.5 * dt) * (y + 0.5 * dt * k2y);
    const double k4y = v + dt * k3v, k4v = G(t + dt) * (y + dt * k3y);
    y += dt / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
    v += dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
  }
  return y;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace oracle
