#include "sobrig/model_manifold.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "sobrig/talenti.hpp"

namespace sobrig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kOuterRatio = 1.02;
constexpr double kFarFactor = 1e6;

// Five-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 5> kGlNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                            0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGlWeights = {0.2369268850561891, 0.4786286704993665,
                                              0.5688888888888889, 0.4786286704993665,
                                              0.2369268850561891};

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

template <class F>
double gauss5(F&& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t k = 0; k < kGlNodes.size(); ++k) s += kGlWeights[k] * f(mid + half * kGlNodes[k]);
  return s * half;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

double parse_number(std::string_view text, std::string_view what) {
  const std::string s(text);
  if (s == "inf") return kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad number '" + s + "' in " + std::string(what));
  }
}

}  // namespace

ModelManifold ModelManifold::build(int m, const CurvatureProfile& profile, double t_max,
                                   double step, Exec exec) {
  if (m < 2) throw std::invalid_argument("model dimension must be >= 2");
  ModelManifold model;
  model.m_ = m;
  model.profile_ = profile;
  model.omega_sphere_ = unit_sphere_area(m);
  const CurvatureProfile g = profile;
  model.warping_ = solve_h_ivp([&g](double t) { return g(t); }, t_max, step);
  const auto& w = model.warping_;
  for (std::size_t i = 1; i < w.grid.size(); ++i) {
    if (!(w.values[i] > 0.0)) {
      throw std::domain_error("warping function is not positive at t=" + fmt(w.grid[i]) +
                              "; the window exceeds the model");
    }
  }
  model.finish(exec);
  return model;
}

ModelManifold ModelManifold::conical(int m, double c, double t_max, double step, Exec exec) {
  if (m < 2) throw std::invalid_argument("model dimension must be >= 2");
  if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("cone parameter c must lie in [0, 1]");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("t_max must be > 0");
  if (!(step > 0.0)) throw std::invalid_argument("step must be > 0");
  ModelManifold model;
  model.m_ = m;
  model.cone_ = c;
  model.omega_sphere_ = unit_sphere_area(m);
  IvpSolution& w = model.warping_;
  w.step = step;
  w.t_max = t_max;
  w.grid = uniform_grid(t_max, step);
  const std::size_t n = w.grid.size();
  w.values.resize(n);
  w.derivs.resize(n);
  w.seconds.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = w.grid[i];
    const double e = std::exp(-t);
    w.values[i] = c * t - (1.0 - c) * std::expm1(-t);
    w.derivs[i] = c + (1.0 - c) * e;
    w.seconds[i] = -(1.0 - c) * e;
  }
  model.finish(exec);
  return model;
}

bool ModelManifold::is_euclidean() const {
  if (cone_) return *cone_ == 1.0;
  return profile_.kind() == CurvatureProfile::Kind::zero;
}

std::string ModelManifold::describe() const {
  if (cone_) return "cone:" + fmt(*cone_);
  return profile_.describe();
}

double ModelManifold::h_second(double t) const {
  if (cone_) {
    warping_.interval(t);
    return -(1.0 - *cone_) * std::exp(-t);
  }
  return profile_(t) * h(t);
}

double ModelManifold::area(double t) const { return omega_sphere_ * ipow(h(t), m_ - 1); }

double ModelManifold::volume(double t) const {
  const std::size_t i = warping_.interval(t);
  const auto& w = warping_;
  auto a = [&](double s) {
    const double hv = hermite5(s, w.grid[i], w.grid[i + 1], w.values[i], w.derivs[i],
                               w.seconds[i], w.values[i + 1], w.derivs[i + 1], w.seconds[i + 1])
                          .value;
    return omega_sphere_ * ipow(hv, m_ - 1);
  };
  return cumulative_volume_[i] + gauss5(a, w.grid[i], t);
}

double ModelManifold::radial_ricci(double t) const {
  if (!(t > 0.0)) throw std::out_of_range("radial_ricci requires t > 0");
  return -(m_ - 1) * h_second(t) / h(t);
}

double ModelManifold::laplacian_radial(double t) const {
  if (!(t > 0.0)) throw std::out_of_range("laplacian_radial requires t > 0");
  return (m_ - 1) * h_prime(t) / h(t);
}

double ModelManifold::euclidean_area(double t) const {
  return omega_sphere_ * ipow(t, m_ - 1);
}

double ModelManifold::euclidean_volume(double t) const {
  return omega_sphere_ * ipow(t, m_) / m_;
}

void ModelManifold::finish(Exec exec) {
  const auto& w = warping_;
  const std::size_t n = w.grid.size() - 1;
  const std::vector<double> pieces = map_indexed<double>(
      n,
      [&](std::size_t i) {
        auto a = [&](double s) {
          const double hv = hermite5(s, w.grid[i], w.grid[i + 1], w.values[i], w.derivs[i],
                                     w.seconds[i], w.values[i + 1], w.derivs[i + 1],
                                     w.seconds[i + 1])
                                .value;
          return omega_sphere_ * ipow(hv, m_ - 1);
        };
        return gauss5(a, w.grid[i], w.grid[i + 1]);
      },
      exec);
  cumulative_volume_.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) cumulative_volume_[i + 1] = cumulative_volume_[i] + pieces[i];
  build_extension();
}

void ModelManifold::build_extension() {
  const double t0 = warping_.t_max;
  if (cone_) {
    extension_ok_ = true;
    far_end_ = kInf;
    return;
  }
  if (!profile_.finite_moment()) {
    extension_ok_ = false;
    extension_issue_ = "curvature profile " + profile_.describe() +
                       " has infinite moment; integrals over the model diverge";
    return;
  }
  far_end_ = t0 * kFarFactor;
  // Uniform steps until G is smooth, geometric afterwards.
  double smooth_from = t0;
  for (double bp : profile_.breakpoints()) smooth_from = std::max(smooth_from, bp);
  smooth_from = std::min(smooth_from, far_end_);
  outer_grid_.clear();
  outer_grid_.push_back(t0);
  const double step = warping_.step;
  while (outer_grid_.back() < smooth_from) {
    outer_grid_.push_back(std::min(smooth_from, outer_grid_.back() + step));
  }
  while (outer_grid_.back() < far_end_) {
    const double next = outer_grid_.back() * kOuterRatio;
    outer_grid_.push_back(next * kOuterRatio > far_end_ ? far_end_ : next);
  }
  const CurvatureProfile& g = profile_;
  try {
    rk4_linear_second_order([&g](double t) { return g(t); }, outer_grid_, warping_.values.back(),
                            warping_.derivs.back(), outer_h_, outer_dh_);
  } catch (const IntegrationError& e) {
    extension_ok_ = false;
    extension_issue_ = std::string("continuation beyond the window failed: ") + e.what();
    return;
  }
  outer_ddh_.resize(outer_grid_.size());
  for (std::size_t i = 0; i < outer_grid_.size(); ++i) {
    outer_ddh_[i] = g(outer_grid_[i]) * outer_h_[i];
  }
  for (double v : outer_h_) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      extension_ok_ = false;
      extension_issue_ = "continuation beyond the window lost positivity or overflowed";
      return;
    }
  }
  extension_ok_ = true;
}

double ModelManifold::far_tail_relative_bound() const {
  if (!extension_ok_) return kInf;
  if (cone_) return 0.0;
  return std::expm1((m_ - 1) * profile_.tail_moment(far_end_));
}

double ModelManifold::extended_h(double t) const {
  if (t <= warping_.t_max) return h(t);
  if (cone_) return *cone_ * t - (1.0 - *cone_) * std::expm1(-t);
  if (!extension_ok_) throw TailBoundError(extension_issue_);
  if (t >= far_end_) return outer_h_.back() + outer_dh_.back() * (t - far_end_);
  const auto it = std::upper_bound(outer_grid_.begin(), outer_grid_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - outer_grid_.begin()) - 1;
  return hermite5(t, outer_grid_[i], outer_grid_[i + 1], outer_h_[i], outer_dh_[i], outer_ddh_[i],
                  outer_h_[i + 1], outer_dh_[i + 1], outer_ddh_[i + 1])
      .value;
}

double ModelManifold::extended_area(double t) const {
  return omega_sphere_ * ipow(extended_h(t), m_ - 1);
}

double ModelManifold::integrate(const RealFn& f, double scale, const QuadratureConfig& cfg,
                                const EndpointHints& hints) const {
  if (!extension_ok_) throw TailBoundError(extension_issue_);
  const RealFn g = [&](double t) { return f(t) * extended_area(t); };
  const double total = integrate_semi_infinite(g, cfg.with_tail_split(std::max(1.0, scale)), hints);
  const double bound = far_tail_relative_bound() * std::abs(total);
  if (bound > cfg.abs_tol + cfg.rel_tol * std::abs(total)) {
    throw TailBoundError("tail beyond t=" + fmt(far_end_) + " bounded by " + fmt(bound) +
                         ", above the requested tolerance");
  }
  return total;
}

double ModelManifold::integrate_range(const RealFn& f, double a, double b,
                                      const QuadratureConfig& cfg) const {
  if (!(a >= 0.0 && a <= b)) throw std::invalid_argument("integrate_range requires 0 <= a <= b");
  if (a == b) return 0.0;
  const RealFn g = [&](double t) { return f(t) * extended_area(t); };
  // Geometric panels toward a so that features at small t are resolved.
  std::vector<double> breaks{b};
  const double floor = std::max(a, b * std::ldexp(1.0, -30));
  while (breaks.back() * 0.5 > floor) breaks.push_back(breaks.back() * 0.5);
  breaks.push_back(a);
  double total = 0.0;
  for (std::size_t i = breaks.size() - 1; i > 0; --i) {
    total += integrate_finite(g, breaks[i], breaks[i - 1], cfg);
  }
  return total;
}

CurvatureProfile parse_profile(std::string_view spec) {
  if (spec == "zero") return CurvatureProfile::zero();
  if (spec.starts_with("rational:")) {
    return CurvatureProfile::rational_decay(parse_number(spec.substr(9), "rational spec"));
  }
  if (spec.starts_with("const:")) {
    const std::string_view rest = spec.substr(6);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) {
      throw std::invalid_argument("const spec must be const:<a>:<t_cut>");
    }
    return CurvatureProfile::constant_cutoff(parse_number(rest.substr(0, colon), "const spec"),
                                             parse_number(rest.substr(colon + 1), "const spec"));
  }
  if (spec.starts_with("table:")) {
    return CurvatureProfile::from_table_file(std::string(spec.substr(6)));
  }
  throw std::invalid_argument("unknown curvature spec '" + std::string(spec) +
                              "' (expected zero, const:<a>:<t_cut>, rational:<b0>, "
                              "table:<path> or cone:<c>)");
}

ModelManifold build_model_from_spec(std::string_view spec, int m, double t_max, double step,
                                    Exec exec) {
  if (spec.starts_with("cone:")) {
    return ModelManifold::conical(m, parse_number(spec.substr(5), "cone spec"), t_max, step, exec);
  }
  return ModelManifold::build(m, parse_profile(spec), t_max, step, exec);
}

std::vector<CheckRow> verify_volume_chain(const ModelManifold& model,
                                          std::span<const double> t_grid,
                                          const VolumeChainOptions& opts, Exec exec) {
  const int m = model.m();
  const double b = model.is_cone() ? 0.0 : opts.b_claim.value_or(model.b());
  const double s = opts.rel_slack;
  const double area_factor = std::isfinite(b) ? std::exp(b * (m - 1)) : kInf;
  const double volume_factor = std::isfinite(b) ? std::exp(b * m) : kInf;
  const double lap_factor = std::isfinite(b) ? (m - 1) * std::exp(b) : kInf;
  const ModelManifold* inner = opts.inner;

  const auto per_t = map_indexed<std::vector<CheckRow>>(
      t_grid.size(),
      [&](std::size_t k) {
        const double t = t_grid[k];
        const double A = model.area(t);
        const double V = model.volume(t);
        const double AE = model.euclidean_area(t);
        const double VE = model.euclidean_volume(t);
        std::vector<CheckRow> rows;
        if (!model.is_cone()) {
          rows.push_back(geq_row("volume_lower", t, V, VE, s));
          rows.push_back(geq_row("area_lower", t, A, AE, s));
        }
        rows.push_back(leq_row("area_upper", t, A, area_factor * AE, s));
        rows.push_back(leq_row("volume_upper", t, V, volume_factor * VE, s));
        if (t > 0.0) rows.push_back(leq_row("laplacian_upper", t, model.laplacian_radial(t),
                                            lap_factor / t, s));
        if (inner != nullptr) {
          rows.push_back(leq_row("inner_area_le_model", t, inner->area(t), A, s));
          rows.push_back(leq_row("inner_volume_le_model", t, inner->volume(t), V, s));
        }
        return rows;
      },
      exec);

  std::vector<CheckRow> out;
  for (const auto& rows : per_t) out.insert(out.end(), rows.begin(), rows.end());
  if (inner != nullptr) {
    double prev = kInf;
    for (double t : t_grid) {
      if (!(t > 0.0)) continue;
      const double ratio = inner->area(t) / model.area(t);
      if (std::isfinite(prev)) out.push_back(leq_row("area_ratio_monotone", t, ratio, prev, s));
      prev = ratio;
    }
  }
  return out;
}

}  // namespace sobrig
