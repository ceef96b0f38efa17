#include "sobrig/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sobrig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

// int_lo^hi t * (linear G from g0 at t0 to g1 at t1) dt, exact (Simpson on a quadratic).
double linear_piece_moment(double t0, double t1, double g0, double g1, double lo, double hi) {
  auto G = [&](double t) { return g0 + (g1 - g0) * (t - t0) / (t1 - t0); };
  const double mid = 0.5 * (lo + hi);
  return (hi - lo) / 6.0 * (lo * G(lo) + 4.0 * mid * G(mid) + hi * G(hi));
}

}  // namespace

CurvatureProfile CurvatureProfile::zero() {
  CurvatureProfile g;
  g.kind_ = Kind::zero;
  g.moment_ = 0.0;
  return g;
}

CurvatureProfile CurvatureProfile::constant_cutoff(double a, double t_cut) {
  if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("const profile: a must be >= 0");
  if (!(t_cut >= 0.0)) throw std::invalid_argument("const profile: t_cut must be >= 0");
  CurvatureProfile g;
  g.kind_ = Kind::constant_cutoff;
  g.a_ = a;
  g.t_cut_ = t_cut;
  if (a == 0.0) {
    g.moment_ = 0.0;
  } else if (std::isinf(t_cut)) {
    g.moment_ = kInf;
  } else {
    g.moment_ = a * (0.5 * t_cut * t_cut + 0.5 * t_cut + 1.0 / 6.0);
  }
  return g;
}

CurvatureProfile CurvatureProfile::rational_decay(double b0) {
  if (!(b0 >= 0.0) || !std::isfinite(b0)) throw std::invalid_argument("rational profile: b0 must be >= 0");
  CurvatureProfile g;
  g.kind_ = Kind::rational_decay;
  g.b0_ = b0;
  g.moment_ = b0;
  return g;
}

CurvatureProfile CurvatureProfile::tabulated(std::vector<double> grid, std::vector<double> values,
                                             double tail_power) {
  if (grid.size() < 2 || grid.size() != values.size()) {
    throw std::invalid_argument("table profile: need at least two (t, G) rows");
  }
  if (grid.front() != 0.0) throw std::invalid_argument("table profile: first abscissa must be 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("table profile: abscissae must increase");
  }
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("table profile: G must be finite and >= 0");
  }
  if (!(tail_power > 2.0) || !std::isfinite(tail_power)) {
    throw std::invalid_argument("table profile: tail_power must exceed 2 for a finite moment");
  }
  CurvatureProfile g;
  g.kind_ = Kind::tabulated;
  g.grid_ = std::move(grid);
  g.values_ = std::move(values);
  g.tail_power_ = tail_power;
  g.source_ = "table";
  g.moment_ = g.head_moment_table(g.grid_.back()) + g.tail_moment(g.grid_.back());
  return g;
}

CurvatureProfile CurvatureProfile::from_table_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open curvature table: " + path.string());
  std::vector<double> grid;
  std::vector<double> values;
  double tail_power = std::numeric_limits<double>::quiet_NaN();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      const auto key = line.find("tail_power=");
      if (key != std::string::npos) {
        try {
          tail_power = std::stod(line.substr(key + 11));
        } catch (const std::exception&) {
          throw std::invalid_argument("curvature table line " + std::to_string(lineno) +
                                      ": bad tail_power directive");
        }
      }
      continue;
    }
    std::istringstream row(line);
    double t = 0.0;
    double G = 0.0;
    std::string extra;
    if (!(row >> t >> G) || (row >> extra)) {
      throw std::invalid_argument("curvature table line " + std::to_string(lineno) +
                                  ": expected two whitespace-separated numbers");
    }
    grid.push_back(t);
    values.push_back(G);
  }
  if (std::isnan(tail_power)) {
    throw std::invalid_argument("curvature table missing '# tail_power=<q>' directive");
  }
  auto g = tabulated(std::move(grid), std::move(values), tail_power);
  g.source_ = "table:" + path.string();
  return g;
}

double CurvatureProfile::operator()(double t) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::constant_cutoff:
      if (t <= t_cut_) return a_;
      if (t <= t_cut_ + 1.0) return a_ * (1.0 - (t - t_cut_));
      return 0.0;
    case Kind::rational_decay: {
      const double d = 1.0 + t * t;
      return 2.0 * b0_ / (d * d);
    }
    case Kind::tabulated: {
      if (t >= grid_.back()) return values_.back() * std::pow(grid_.back() / t, tail_power_);
      const auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
      const auto i = static_cast<std::size_t>(it - grid_.begin()) - 1;
      const double w = (t - grid_[i]) / (grid_[i + 1] - grid_[i]);
      return values_[i] + w * (values_[i + 1] - values_[i]);
    }
  }
  return 0.0;
}

double CurvatureProfile::head_moment_table(double T) const {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < grid_.size() && grid_[i] < T; ++i) {
    const double hi = std::min(T, grid_[i + 1]);
    total += linear_piece_moment(grid_[i], grid_[i + 1], values_[i], values_[i + 1], grid_[i], hi);
  }
  return total;
}

double CurvatureProfile::tail_moment(double T) const {
  if (!(T >= 0.0)) throw std::invalid_argument("tail_moment: T must be >= 0");
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::constant_cutoff: {
      if (a_ == 0.0) return 0.0;
      if (std::isinf(t_cut_)) return kInf;
      const double end = t_cut_ + 1.0;
      if (T >= end) return 0.0;
      double total = 0.0;
      if (T < t_cut_) total += 0.5 * a_ * (t_cut_ * t_cut_ - T * T);
      const double lo = std::max(T, t_cut_);
      // int_lo^end t a (1 - (t - t_cut)) dt = a int_lo^end t (end - t) dt
      auto F = [end](double t) { return 0.5 * end * t * t - t * t * t / 3.0; };
      total += a_ * (F(end) - F(lo));
      return total;
    }
    case Kind::rational_decay:
      return b0_ / (1.0 + T * T);
    case Kind::tabulated: {
      const double tn = grid_.back();
      const double far = values_.back() * std::pow(tn, tail_power_) / (tail_power_ - 2.0);
      if (T >= tn) return far * std::pow(T, 2.0 - tail_power_);
      double total = far * std::pow(tn, 2.0 - tail_power_);
      for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
        if (grid_[i + 1] <= T) continue;
        const double lo = std::max(T, grid_[i]);
        total += linear_piece_moment(grid_[i], grid_[i + 1], values_[i], values_[i + 1], lo,
                                     grid_[i + 1]);
      }
      return total;
    }
  }
  return 0.0;
}

std::string CurvatureProfile::describe() const {
  switch (kind_) {
    case Kind::zero:
      return "zero";
    case Kind::constant_cutoff:
      return "const:" + fmt(a_) + ":" + (std::isinf(t_cut_) ? std::string("inf") : fmt(t_cut_));
    case Kind::rational_decay:
      return "rational:" + fmt(b0_);
    case Kind::tabulated:
      return source_;
  }
  return "unknown";
}

std::vector<double> CurvatureProfile::breakpoints() const {
  switch (kind_) {
    case Kind::constant_cutoff:
      if (std::isinf(t_cut_)) return {};
      return {t_cut_, t_cut_ + 1.0};
    case Kind::tabulated:
      return grid_;
    default:
      return {};
  }
}

double quadrature_moment(const CurvatureProfile& profile, const QuadratureConfig& cfg) {
  if (!profile.finite_moment()) return kInf;
  if (profile.kind() == CurvatureProfile::Kind::zero) return 0.0;
  const RealFn f = [&profile](double t) { return t * profile(t); };
  const std::vector<double> breaks = profile.breakpoints();
  double total = 0.0;
  double lo = 0.0;
  for (double t : breaks) {
    if (t > lo) total += integrate_finite(f, lo, t, cfg);
    lo = std::max(lo, t);
  }
  switch (profile.kind()) {
    case CurvatureProfile::Kind::constant_cutoff:
      return total;
    case CurvatureProfile::Kind::rational_decay:
      return integrate_semi_infinite(f, cfg, EndpointHints{std::nullopt, 3.0});
    case CurvatureProfile::Kind::tabulated:
      return total + integrate_tail(f, lo, cfg, EndpointHints{std::nullopt, profile.tail_power() - 1.0});
    default:
      return total;
  }
}

}  // namespace sobrig
