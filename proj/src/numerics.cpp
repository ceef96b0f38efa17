#include "sobrig/numerics.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace sobrig {

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw std::invalid_argument("quadrature tolerances must be positive");
  }
  if (max_depth < 1) throw std::invalid_argument("quadrature max_depth must be >= 1");
  if (!(tail_split > 0.0)) throw std::invalid_argument("quadrature tail_split must be positive");
}

// ---------------------------------------------------------------------------
// Gamma
// ---------------------------------------------------------------------------

double gamma_fn(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("gamma_fn: argument must be positive and finite");
  }
  return std::tgamma(x);
}

// ---------------------------------------------------------------------------
// Adaptive Simpson
// ---------------------------------------------------------------------------

namespace {

constexpr int kMinDepth = 3;
constexpr int kCoarsePanels = 8;
constexpr int kGeometricPanels = 20;
constexpr double kOpenZero = 1e-8;

std::string describe_point(double t) {
  std::ostringstream os;
  os.precision(17);
  os << t;
  return os.str();
}

class Simpson {
 public:
  Simpson(const RealFn& f, int max_depth) : f_(f), max_depth_(max_depth) {}

  double eval(double t) const {
    const double v = f_(t);
    if (!std::isfinite(v)) {
      throw std::domain_error("non-finite integrand value at t=" + describe_point(t));
    }
    return v;
  }

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double eps,
                 int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    if (!(a < lm && lm < m && m < rm && rm < b)) {
      exhausted_ = true;
      return whole;
    }
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double sum = left + right;
    const double delta = sum - whole;
    const bool resolved = std::abs(delta) <= 15.0 * eps ||
                          std::abs(delta) <= 64.0 * DBL_EPSILON * std::abs(sum);
    if (depth >= std::min(kMinDepth, max_depth_) && resolved) return sum + delta / 15.0;
    if (depth >= max_depth_) {
      exhausted_ = true;
      return sum + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * eps, depth + 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * eps, depth + 1);
  }

  bool exhausted() const { return exhausted_; }

 private:
  const RealFn& f_;
  int max_depth_;
  bool exhausted_ = false;
};

// abs_floor lets a piece of a larger integral be resolved relative to the whole.
double adaptive_simpson(const RealFn& f, double a, double b, const QuadratureConfig& cfg,
                        double abs_floor) {
  if (a == b) return 0.0;
  Simpson simpson(f, cfg.max_depth);
  constexpr int n = kCoarsePanels;
  std::array<double, 2 * n + 1> fx{};
  std::array<double, 2 * n + 1> tx{};
  const double width = (b - a) / n;
  for (int i = 0; i <= 2 * n; ++i) {
    tx[i] = (i == 2 * n) ? b : a + 0.5 * width * i;
    fx[i] = simpson.eval(tx[i]);
  }
  double coarse = 0.0;
  std::array<double, n> panel{};
  for (int i = 0; i < n; ++i) {
    panel[i] = (tx[2 * i + 2] - tx[2 * i]) / 6.0 * (fx[2 * i] + 4.0 * fx[2 * i + 1] + fx[2 * i + 2]);
    coarse += panel[i];
  }
  const double eps = std::max({cfg.abs_tol, abs_floor, cfg.rel_tol * std::abs(coarse)});
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    total += simpson.recurse(tx[2 * i], tx[2 * i + 2], fx[2 * i], fx[2 * i + 1], fx[2 * i + 2],
                             panel[i], eps / n, 1);
  }
  if (simpson.exhausted()) {
    throw ConvergenceError("adaptive quadrature did not converge on [" + describe_point(a) + ", " +
                           describe_point(b) + "] within max_depth=" +
                           std::to_string(cfg.max_depth));
  }
  return total;
}

// [0, T] on geometric panels T 2^-k so that narrow features near 0 are seen.
double integrate_geometric_head(const RealFn& f, double T, const QuadratureConfig& cfg,
                                const EndpointHints& hints) {
  double start = 0.0;
  double total = 0.0;
  if (hints.power_at_zero) {
    const double k = *hints.power_at_zero;
    if (!(k > -1.0)) throw std::invalid_argument("power_at_zero must exceed -1");
    start = std::min(kOpenZero, T * std::ldexp(1.0, -kGeometricPanels - 1));
    total += f(start) * start / (k + 1.0);
  }
  std::vector<double> breaks;
  breaks.push_back(start);
  for (int k = kGeometricPanels; k >= 1; --k) {
    const double t = T * std::ldexp(1.0, -k);
    if (t > start) breaks.push_back(t);
  }
  breaks.push_back(T);
  // Resolve panels against the running magnitude, largest panels last.
  std::vector<double> pieces(breaks.size() - 1);
  double magnitude = 0.0;
  for (std::size_t i = breaks.size() - 1; i-- > 0;) {
    pieces[i] = adaptive_simpson(f, breaks[i], breaks[i + 1], cfg, cfg.rel_tol * magnitude);
    magnitude += std::abs(pieces[i]);
  }
  for (double piece : pieces) total += piece;
  return total;
}

}  // namespace

double integrate_finite(const RealFn& f, double a, double b, const QuadratureConfig& cfg) {
  cfg.validate();
  if (!(a <= b)) throw std::invalid_argument("integrate_finite requires a <= b");
  return adaptive_simpson(f, a, b, cfg, 0.0);
}

double integrate_tail(const RealFn& f, double a, const QuadratureConfig& cfg,
                      const EndpointHints& hints) {
  cfg.validate();
  if (!(a > 0.0)) throw std::invalid_argument("integrate_tail requires a > 0");
  const RealFn g = [&f, a](double s) {
    if (s >= 1.0) return 0.0;
    const double one_minus = 1.0 - s;
    const double t = a / one_minus;
    return f(t) * a / (one_minus * one_minus);
  };
  // Panels [1 - 2^-j, 1 - 2^-(j+1)] cover t in [a 2^j, a 2^(j+1)].
  std::vector<double> pieces;
  double magnitude = 0.0;
  for (int j = 0; j < kGeometricPanels; ++j) {
    const double lo = 1.0 - std::ldexp(1.0, -j);
    const double hi = 1.0 - std::ldexp(1.0, -j - 1);
    pieces.push_back(adaptive_simpson(g, lo, hi, cfg, cfg.rel_tol * magnitude));
    magnitude += std::abs(pieces.back());
  }
  const double last = 1.0 - std::ldexp(1.0, -kGeometricPanels);
  if (hints.decay_power) {
    const double k = *hints.decay_power;
    if (!(k > 1.0)) throw std::invalid_argument("decay_power must exceed 1");
    const double t_end = a / (1.0 - last);
    pieces.push_back(f(t_end) * t_end / (k - 1.0));
    if (!std::isfinite(pieces.back())) {
      throw std::domain_error("non-finite tail remainder at t=" + describe_point(t_end));
    }
  } else {
    pieces.push_back(adaptive_simpson(g, last, 1.0, cfg, cfg.rel_tol * magnitude));
  }
  return std::accumulate(pieces.begin(), pieces.end(), 0.0);
}

double integrate_semi_infinite(const RealFn& f, const QuadratureConfig& cfg,
                               const EndpointHints& hints) {
  cfg.validate();
  const double T = cfg.tail_split;
  const double head = integrate_geometric_head(f, T, cfg, hints);
  QuadratureConfig tail_cfg = cfg;
  tail_cfg.abs_tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(head));
  return head + integrate_tail(f, T, tail_cfg, hints);
}

// ---------------------------------------------------------------------------
// RK4 for h'' = G h
// ---------------------------------------------------------------------------

namespace {

// Kahan-compensated accumulator; keeps h(t) = t exact to rounding when G = 0.
struct Compensated {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

void rk4_linear_second_order(const RealFn& G, std::span<const double> grid, double h0, double h1,
                             std::vector<double>& h, std::vector<double>& dh) {
  h.assign(grid.size(), 0.0);
  dh.assign(grid.size(), 0.0);
  if (grid.empty()) return;
  Compensated y{h0, 0.0};
  Compensated v{h1, 0.0};
  h[0] = h0;
  dh[0] = h1;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double t = grid[i];
    const double dt = grid[i + 1] - t;
    const double y0 = y.sum;
    const double v0 = v.sum;
    const double g0 = G(t);
    const double gm = G(t + 0.5 * dt);
    const double g1 = G(grid[i + 1]);
    const double k1y = v0;
    const double k1v = g0 * y0;
    const double k2y = v0 + 0.5 * dt * k1v;
    const double k2v = gm * (y0 + 0.5 * dt * k1y);
    const double k3y = v0 + 0.5 * dt * k2v;
    const double k3v = gm * (y0 + 0.5 * dt * k2y);
    const double k4y = v0 + dt * k3v;
    const double k4v = g1 * (y0 + dt * k3y);
    y.add(dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y));
    v.add(dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v));
    if (!std::isfinite(y.sum) || !std::isfinite(v.sum)) {
      throw IntegrationError("warping function became non-finite at t=" +
                             describe_point(grid[i + 1]));
    }
    h[i + 1] = y.sum;
    dh[i + 1] = v.sum;
  }
}

namespace {

constexpr double kMaxSteps = 2e7;

}  // namespace

std::vector<double> uniform_grid(double t_max, double step) {
  const double raw = t_max / step;
  if (raw > kMaxSteps) {
    throw IntegrationError("step count overflow: t_max/step exceeds " +
                           describe_point(kMaxSteps));
  }
  auto n = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  n = std::max<std::size_t>(n, 1);
  std::vector<double> grid(n + 1);
  for (std::size_t i = 0; i < n; ++i) grid[i] = static_cast<double>(i) * step;
  grid[n] = t_max;
  return grid;
}

IvpSolution solve_h_ivp(const RealFn& G, double t_max, double step) {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("t_max must be > 0");
  if (!(step > 0.0)) throw std::invalid_argument("step must be > 0");
  IvpSolution sol;
  sol.step = step;
  sol.t_max = t_max;
  sol.grid = uniform_grid(t_max, step);
  rk4_linear_second_order(G, sol.grid, 0.0, 1.0, sol.values, sol.derivs);
  sol.seconds.resize(sol.grid.size());
  for (std::size_t i = 0; i < sol.grid.size(); ++i) sol.seconds[i] = G(sol.grid[i]) * sol.values[i];

  // Half-step refinement pass, used only for the error report.
  const std::vector<double> fine = uniform_grid(t_max, 0.5 * step);
  std::vector<double> fh;
  std::vector<double> fdh;
  rk4_linear_second_order(G, fine, 0.0, 1.0, fh, fdh);
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < sol.grid.size(); ++i) {
    if (2 * i < fine.size()) err = std::max(err, std::abs(sol.values[i] - fh[2 * i]));
  }
  err = std::max(err, std::abs(sol.values.back() - fh.back()));
  sol.error_estimate = err;
  return sol;
}

std::size_t IvpSolution::interval(double t) const {
  if (!(t >= 0.0) || t > t_max * (1.0 + 1e-14)) {
    throw std::out_of_range("t=" + describe_point(t) + " outside the solved window [0, " +
                            describe_point(t_max) + "]");
  }
  const std::size_t last = grid.size() - 2;
  auto i = static_cast<std::size_t>(std::min(std::floor(t / step), static_cast<double>(last)));
  while (i > 0 && t < grid[i]) --i;
  while (i < last && t > grid[i + 1]) ++i;
  return i;
}

HermiteValue hermite5(double t, double t0, double t1, double y0, double d0, double s0, double y1,
                      double d1, double s1) {
  const double w = t1 - t0;
  const double s = (t - t0) / w;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double s4 = s3 * s;
  const double s5 = s4 * s;
  const double H0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
  const double H1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
  const double H2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
  const double H3 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
  const double H4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
  const double H5 = 0.5 * s3 - s4 + 0.5 * s5;
  const double D0 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
  const double D1 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
  const double D2 = s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4;
  const double D3 = -D0;
  const double D4 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
  const double D5 = 1.5 * s2 - 4.0 * s3 + 2.5 * s4;
  const double w2 = w * w;
  HermiteValue out{};
  out.value = y0 * H0 + w * d0 * H1 + w2 * s0 * H2 + y1 * H3 + w * d1 * H4 + w2 * s1 * H5;
  out.deriv = (y0 * D0 + y1 * D3) / w + d0 * D1 + d1 * D4 + w * (s0 * D2 + s1 * D5);
  return out;
}

double IvpSolution::value(double t) const {
  const std::size_t i = interval(t);
  return hermite5(t, grid[i], grid[i + 1], values[i], derivs[i], seconds[i], values[i + 1],
                  derivs[i + 1], seconds[i + 1])
      .value;
}

double IvpSolution::deriv(double t) const {
  const std::size_t i = interval(t);
  return hermite5(t, grid[i], grid[i + 1], values[i], derivs[i], seconds[i], values[i + 1],
                  derivs[i + 1], seconds[i + 1])
      .deriv;
}

// ---------------------------------------------------------------------------
// Nelder-Mead
// ---------------------------------------------------------------------------

NelderMeadResult minimize_nelder_mead(const std::function<double(std::span<const double>)>& f,
                                      std::vector<double> x0, std::span<const double> steps,
                                      const NelderMeadOptions& opts) {
  const std::size_t n = x0.size();
  if (n == 0 || steps.size() != n) throw std::invalid_argument("nelder-mead: bad dimensions");
  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  NelderMeadResult result;
  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += steps[i];
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  auto point = [n](const std::vector<double>& c, const std::vector<double>& x, double coef) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = c[k] + coef * (x[k] - c[k]);
    return out;
  };

  for (result.iterations = 0; result.iterations < opts.max_iterations; ++result.iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double d = simplex[i][k] - simplex[best][k];
        d2 += d * d;
      }
      diameter = std::max(diameter, std::sqrt(d2));
    }
    if (diameter < opts.diameter_tol) {
      result.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[order[i]][k] / static_cast<double>(n);
    }

    const auto xr = point(centroid, simplex[worst], -kReflect);
    const double fr = eval(xr);
    if (fr < fv[best]) {
      const auto xe = point(centroid, xr, kExpand);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        fv[worst] = fe;
      } else {
        simplex[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      simplex[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    bool shrink = false;
    if (fr < fv[worst]) {
      const auto xc = point(centroid, xr, kContract);
      const double fc = eval(xc);
      if (fc <= fr) {
        simplex[worst] = xc;
        fv[worst] = fc;
      } else {
        shrink = true;
      }
    } else {
      const auto xc = point(centroid, simplex[worst], kContract);
      const double fc = eval(xc);
      if (fc < fv[worst]) {
        simplex[worst] = xc;
        fv[worst] = fc;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == best) continue;
        simplex[i] = point(simplex[best], simplex[i], kShrink);
        fv[i] = eval(simplex[i]);
      }
    }
  }

  const auto best_it = std::min_element(fv.begin(), fv.end());
  const auto best = static_cast<std::size_t>(best_it - fv.begin());
  result.x = simplex[best];
  result.fx = fv[best];
  return result;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 2) throw std::invalid_argument("log_grid: bad range");
  std::vector<double> out(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  if (!(hi >= lo) || n < 2) throw std::invalid_argument("linear_grid: bad range");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back() = hi;
  return out;
}

}  // namespace sobrig
