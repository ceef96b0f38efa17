#include "sobrig/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sobrig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

// (m-1) ((m-p)/(p-1))^{p-1} beta^{-p^2/(m-p)}, shared by C1 and C2.
double common_factor(const SobolevParams& s, double beta) {
  const double m = s.dim();
  const double p = s.p();
  return (m - 1.0) * std::pow((m - p) / (p - 1.0), p - 1.0) * std::pow(beta, -p * p / (m - p));
}

}  // namespace

double gamma_lower_bound(const ModelManifold& M, std::span<const double> t_grid, Exec exec) {
  const std::vector<double> ratios =
      map_grid(t_grid, [&](double t) { return M.volume_ratio(t); }, exec);
  double g = 1.0;
  for (double r : ratios) g = std::min(g, r);
  return g;
}

std::vector<double> default_gamma_grid(double t_max) {
  return log_grid(std::min(1e-3, 0.5 * t_max), t_max, 200);
}

double c1(const SobolevParams& params, double beta, double lambda, double b,
          const ModelManifold& M, const QuadratureConfig& cfg) {
  if (!(b >= 0.0) || !std::isfinite(b)) throw std::invalid_argument("c1 requires finite b >= 0");
  if (!(lambda > 0.0)) throw std::invalid_argument("c1 requires lambda > 0");
  if (b == 0.0) return 0.0;
  const int m = params.m();
  const double q = params.q();
  const double scale = std::pow(lambda, 1.0 / q);
  const auto weight = [&](double power) {
    return M.integrate([&, power](double t) { return std::pow(lambda + std::pow(t, q), -power); },
                       scale, cfg,
                       EndpointHints{static_cast<double>(m - 1), q * power - (m - 1)});
  };
  const double num_int = weight(m - 1.0);
  const double den_int = weight(static_cast<double>(m));
  return common_factor(params, beta) * std::expm1(b) * num_int / (lambda * den_int);
}

double c2(const SobolevParams& params, double beta, double b, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (!(b >= 0.0)) throw std::invalid_argument("b must be nonnegative");
  if (b == 0.0) return 0.0;
  const double m = params.dim();
  const double p = params.p();
  return (m - 1.0) * p / (m - p) * common_factor(params, beta) * std::expm1(b) *
         std::exp(b * (m - 1.0)) / gamma;
}

double c3(const SobolevParams& params, double C_M, double K, double C2) {
  if (!(K > 0.0)) throw std::invalid_argument("K must be positive");
  if (C_M < K * (1.0 - 1e-12)) {
    throw std::invalid_argument("inconsistent input: C_M=" + num(C_M) + " < K(m,p)=" + num(K) +
                                " violates C_M >= K(m,p)");
  }
  if (!(C2 >= 0.0)) throw std::invalid_argument("C2 must be nonnegative");
  const double p = params.p();
  return std::pow(std::pow(C_M / K, p) + std::pow(C_M, p) * C2, params.dim() / p);
}

double c_hat(double C3, double b, const SobolevParams& params) {
  if (!(C3 > 0.0)) throw std::invalid_argument("C3 must be positive");
  return 1.0 / C3 * std::exp(-b * (params.dim() - 1.0));
}

VProfile v_profile(const ModelManifold& M, const ModelManifold* comparison, double scale,
                   std::span<const double> t_grid, double step_slack) {
  if (!(scale > 0.0)) throw std::invalid_argument("v_profile scale must be positive");
  VProfile out;
  out.max_increase = -kInf;
  for (double t : t_grid) {
    const double ref = comparison ? comparison->volume(t) : M.euclidean_volume(t);
    const double v = scale * M.volume(t) / ref - 1.0;
    if (!out.values.empty()) {
      const double prev = out.values.back().second;
      out.max_increase = std::max(out.max_increase, v - prev);
      if (v > prev + step_slack) out.nonincreasing = false;
      if (!out.sign_change && prev > 0.0 && v <= 0.0) out.sign_change = t;
    }
    out.values.emplace_back(t, v);
  }
  if (out.values.size() < 2) out.max_increase = 0.0;
  return out;
}

MassEscapeReport mass_escape_experiment(const SobolevParams& params, double T,
                                        std::span<const double> lambda_grid,
                                        const QuadratureConfig& cfg, double threshold,
                                        double sum_tol, Exec exec) {
  if (!(T > 0.0)) throw std::invalid_argument("split point T must be positive");
  if (lambda_grid.empty()) throw std::invalid_argument("lambda grid is empty");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] >= 10.0)) {
      throw std::invalid_argument("mass escape needs lambda >= 10, got " + num(lambda_grid[i]));
    }
    if (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1])) {
      throw std::invalid_argument("lambda grid must be increasing");
    }
  }
  const double beta = normalize_beta(params, cfg);
  const double decay = params.dim() / (params.p() - 1.0) + 1.0;
  const auto head_of = [&](double lam) {
    const TalentiProfile prof = make_profile(params, lam, beta);
    return integrate_finite([&](double t) { return prof.density(t); }, 0.0, T, cfg);
  };

  MassEscapeReport rep;
  rep.T = T;
  rep.threshold = threshold;
  rep.rows = map_indexed<MassEscapeRow>(
      lambda_grid.size(),
      [&](std::size_t i) {
        const double lam = lambda_grid[i];
        const TalentiProfile prof = make_profile(params, lam, beta);
        const double head = head_of(lam);
        const double tail = integrate_tail([&](double t) { return prof.density(t); }, T, cfg,
                                           EndpointHints{std::nullopt, decay});
        return MassEscapeRow{lam, head, tail, head + tail};
      },
      exec);

  rep.sums_ok = true;
  rep.head_monotone = true;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    if (!(std::abs(rep.rows[i].sum - 1.0) <= sum_tol)) rep.sums_ok = false;
    if (i > 0 && rep.rows[i].head > rep.rows[i - 1].head) rep.head_monotone = false;
  }
  rep.final_below_threshold = rep.rows.back().head <= threshold;

  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    if (rep.rows[i].head > threshold) continue;
    if (i == 0) {
      rep.lambda0 = rep.rows[0].lambda;
      break;
    }
    double lo = std::log(rep.rows[i - 1].lambda);
    double hi = std::log(rep.rows[i].lambda);
    for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
      const double mid = 0.5 * (lo + hi);
      (head_of(std::exp(mid)) > threshold ? lo : hi) = mid;
    }
    rep.lambda0 = std::exp(hi);
    break;
  }
  return rep;
}

const char* to_string(Mode mode) { return mode == Mode::theorem1 ? "theorem1" : "theorem2"; }

RigidityReport verify_theorem(const ModelManifold& M, const SobolevParams& params, double C_M,
                              double K, Mode mode, std::span<const double> t_grid,
                              const QuadratureConfig& cfg, const TheoremOptions& opts, Exec exec) {
  if (params.m() != M.m()) throw std::invalid_argument("exponent dimension differs from model");
  if (t_grid.empty()) throw std::invalid_argument("empty t grid");
  const int m = M.m();
  RigidityReport rep;
  rep.params = params;
  rep.model = M.describe();
  rep.mode = mode;
  rep.K = K;
  rep.C_M = C_M;
  rep.C_M_source = opts.C_M_source;
  rep.b = M.is_cone() ? 0.0 : M.b();
  const double b = rep.b;

  const ModelManifold* comparison = nullptr;
  double v_scale = 1.0;
  double lower = 0.0;
  double upper = 0.0;
  if (mode == Mode::theorem1) {
    if (b != 0.0) {
      throw std::invalid_argument("theorem1 mode needs b = 0, model has b=" + num(b));
    }
    for (double t : t_grid) {
      if (t > 0.0 && M.radial_ricci(t) < -1e-12) {
        throw std::invalid_argument("theorem1 mode needs radial Ricci >= 0; fails at t=" + num(t));
      }
    }
    rep.gamma = opts.gamma.value_or(1.0);
    rep.gamma_source = opts.gamma ? opts.gamma_source : "unused";
    rep.C2 = 0.0;
    rep.C3 = c3(params, C_M, K, 0.0);
    rep.C_hat = c_hat(rep.C3, 0.0, params);
    lower = std::pow(K / C_M, m);
    upper = 1.0;
    v_scale = std::pow(C_M / K, m);
  } else {
    if (!std::isfinite(b)) throw std::invalid_argument("theorem2 mode needs a finite moment b");
    if (!opts.gamma) throw std::invalid_argument("theorem2 mode needs gamma");
    rep.gamma = *opts.gamma;
    rep.gamma_source = opts.gamma_source;
    const double beta = normalize_beta(params, cfg);
    rep.C2 = c2(params, beta, b, rep.gamma);
    rep.C3 = c3(params, C_M, K, rep.C2);
    rep.C_hat = c_hat(rep.C3, b, params);
    rep.C1 = c1(params, beta, opts.c1_lambda, b, M, cfg);
    lower = rep.C_hat;
    upper = std::exp(m * b);
    comparison = &M;
    v_scale = rep.C3 * std::exp(b * (m - 1));
  }

  rep.v = v_profile(M, comparison, v_scale, t_grid);
  const std::vector<double> ratios =
      map_grid(t_grid, [&](double t) { return M.volume_ratio(t); }, exec);
  const double tol = opts.rel_tol;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double r = ratios[i];
    const bool ok = std::isfinite(r) && r >= lower * (1.0 - tol) && r <= upper * (1.0 + tol);
    rep.ratio_table.push_back(RatioRow{t_grid[i], r, lower, upper, ok, rep.v.values[i].second});
  }

  std::string detail;
  for (const auto& row : rep.ratio_table) {
    if (!row.pass) {
      detail = "volume ratio outside [lower, upper] at t=" + num(row.t) + ": lower=" +
               num(row.lower) + " ratio=" + num(row.ratio) + " upper=" + num(row.upper);
      break;
    }
  }
  if (detail.empty() && !rep.v.nonincreasing) {
    detail = "v is not non-increasing: largest step increase " + num(rep.v.max_increase);
  }
  const double v_final = rep.v.values.back().second;
  if (detail.empty() && v_final < opts.v_final_floor) {
    detail = "v(t_max) < 0: v(" + num(rep.v.values.back().first) + ")=" + num(v_final) +
             " below " + num(opts.v_final_floor);
  }
  if (detail.empty() && rep.C1 && !(*rep.C1 <= rep.C2 * (1.0 + tol))) {
    detail = "C1 <= C2 fails: C1=" + num(*rep.C1) + " C2=" + num(rep.C2);
  }
  rep.consistent = detail.empty();
  rep.verdict_details = rep.consistent ? "all checks hold on the grid" : detail;

  if (rep.C_M_source == "estimate") {
    rep.notes.emplace_back("C_M_direction",
                           "C_M is a radial witness C_est <= C_M; the upper chain does not depend "
                           "on C_M, the lower bound computed with C_est is the stricter one");
  }
  if (rep.gamma_source == "empirical") {
    rep.notes.emplace_back("gamma_direction",
                           "gamma is the infimum of V/V_E over the window, capped at 1");
  }
  rep.notes.emplace_back("diffeomorphism_threshold",
                         "not computable here; depends on external convergence theory");
  rep.notes.emplace_back("b0_eps0", "not computable here; depends on external convergence theory");
  if (rep.v.sign_change) rep.notes.emplace_back("T0", num(*rep.v.sign_change));
  return rep;
}

}  // namespace sobrig
