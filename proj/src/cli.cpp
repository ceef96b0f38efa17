#include "sobrig/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sobrig/model_manifold.hpp"
#include "sobrig/rigidity.hpp"
#include "sobrig/sobolev.hpp"
#include "sobrig/talenti.hpp"

namespace sobrig {

namespace {

// Exact round trip for to_args().
std::string exact(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& s, const std::string& flag) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw UsageError(flag + ": expected a number, got '" + s + "'");
  }
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, "--lambda"));
  if (out.empty()) throw UsageError("--lambda: empty list");
  for (double v : out) {
    if (!(v > 0.0) || !std::isfinite(v)) throw UsageError("--lambda: values must be positive");
  }
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + exact(xs[i]);
  return s;
}

QuadratureConfig base_quadrature() { return QuadratureConfig{}; }

// Standard abscissae inside the window, plus t_max itself.
std::vector<double> chain_grid(double t_max) {
  std::vector<double> ts;
  for (double t : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0}) {
    if (t < t_max) ts.push_back(t);
  }
  ts.push_back(t_max);
  return ts;
}

bool ricci_nonnegative(const ModelManifold& M) {
  return M.is_cone() || M.profile().kind() == CurvatureProfile::Kind::zero;
}

std::vector<CheckRow> model_rows(const ModelManifold& M, double tol) {
  std::vector<CheckRow> rows;
  const int m = M.m();
  rows.push_back(eq_row("h_at_zero", 0.0, M.h(0.0), 0.0, 1e-14));
  rows.push_back(eq_row("h_prime_at_zero", 0.0, M.h_prime(0.0), 1.0, 1e-14));
  const std::vector<double> ts = chain_grid(M.t_max());
  for (double t : ts) {
    if (M.is_cone()) {
      rows.push_back(geq_row("radial_ricci_nonnegative", t, M.radial_ricci(t), 0.0, 0.0));
    } else {
      rows.push_back(eq_row("radial_ricci_identity", t, M.radial_ricci(t), -(m - 1) * M.profile()(t),
                            1e-12));
      rows.push_back(geq_row("h_ge_t", t, M.h(t), t, tol));
    }
  }
  if (!M.is_cone()) {
    // Second differences of the nodal values against G h, away from kinks of G.
    const auto& w = M.warping();
    const double s = w.step;
    const std::vector<double> kinks = M.profile().breakpoints();
    double worst = 0.0;
    double at = 0.0;
    for (std::size_t i = 1; i + 2 < w.grid.size(); ++i) {
      bool near_kink = false;
      for (double k : kinks) near_kink = near_kink || std::abs(w.grid[i] - k) < 2.5 * s;
      if (near_kink) continue;
      const double fd = (w.values[i + 1] - 2.0 * w.values[i] + w.values[i - 1]) / (s * s);
      const double dev = std::abs(fd - w.seconds[i]) / std::max(1.0, w.values[i]);
      if (dev > worst) {
        worst = dev;
        at = w.grid[i];
      }
    }
    double g_sup = 0.0;
    for (std::size_t i = 0; i < w.grid.size(); i += 16) g_sup = std::max(g_sup, M.profile()(w.grid[i]));
    rows.push_back(leq_row("ode_second_difference", at, worst, 10.0 * s * s * (1.0 + g_sup), 0.0));
  }
  VolumeChainOptions opts;
  opts.rel_slack = tol;
  const std::vector<CheckRow> chain = verify_volume_chain(M, ts, opts);
  rows.insert(rows.end(), chain.begin(), chain.end());
  return rows;
}

KeyValues run_header(const RunConfig& cfg) {
  return {{"command", to_string(cfg.command)},
          {"m", std::to_string(cfg.m)},
          {"p", format_number(cfg.p)},
          {"g", cfg.g_spec},
          {"t_max", format_number(cfg.t_max)},
          {"step", format_number(cfg.step)},
          {"tol", format_number(cfg.tol)}};
}

void report_failure(std::span<const CheckRow> rows, std::ostream& err) {
  if (const CheckRow* f = first_failure(rows)) {
    err << "check failed: " << f->name << " at t=" << format_number(f->t)
        << " (lhs=" << format_number(f->lhs) << ", rhs=" << format_number(f->rhs) << ")\n";
  }
}

struct Emitted {
  std::string text;
  int code;
};

Emitted cmd_constants(const RunConfig& cfg, std::ostream& err) {
  const SobolevParams params = SobolevParams::make(cfg.m, cfg.p);
  QuadratureConfig q = base_quadrature();
  q.rel_tol = 1e-12;
  q.abs_tol = 1e-16;
  const double beta = normalize_beta(params, q);
  const double K = sharp_constant_at(params, beta, 1.0, q);
  std::vector<double> lambdas{0.5, 1.0, 5.0, 20.0};
  for (double l : cfg.lambda_list) {
    if (std::find(lambdas.begin(), lambdas.end(), l) == lambdas.end()) lambdas.push_back(l);
  }
  double spread = 0.0;
  for (double l : lambdas) {
    spread = std::max(spread, std::abs(sharp_constant_at(params, beta, l, q) / K - 1.0));
    spread = std::max(spread, std::abs(euclidean_mass(make_profile(params, l, beta), q) - 1.0));
  }
  // The spread alone can be far below what the quadrature certifies.
  const double certified = std::max(spread, q.rel_tol);
  const bool pass = certified <= cfg.tol;
  if (!pass) {
    err << "lambda-invariance: certified error " << format_number(certified) << " (spread "
        << format_number(spread) << ", quadrature rel_tol " << format_number(q.rel_tol)
        << ") exceeds tol " << format_number(cfg.tol) << "\n";
  }
  const KeyValues rows{{"m", std::to_string(cfg.m)},
                       {"p", format_number(cfg.p)},
                       {"p_star", format_number(params.p_star())},
                       {"beta", format_number(beta)},
                       {"K", format_number(K)},
                       {"lambda_spread", format_number(spread)},
                       {"certified_error", format_number(certified)},
                       {"tol", format_number(cfg.tol)},
                       {"omega_m", format_number(unit_ball_volume(cfg.m))},
                       {"omega_sphere", format_number(unit_sphere_area(cfg.m))},
                       {"pass", pass ? "true" : "false"}};
  return {render_table(rows, cfg.output), pass ? 0 : 1};
}

Emitted cmd_model(const RunConfig& cfg, std::ostream& err) {
  const ModelManifold M = build_model_from_spec(cfg.g_spec, cfg.m, cfg.t_max, cfg.step);
  const std::vector<CheckRow> rows = model_rows(M, cfg.tol);
  KeyValues header = run_header(cfg);
  header.emplace_back("b", format_number(M.is_cone() ? 0.0 : M.b()));
  header.emplace_back("h_error_estimate", format_number(M.warping().error_estimate));
  const bool pass = all_pass(rows);
  if (!pass) report_failure(rows, err);
  return {render_checks(rows, header, cfg.output), pass ? 0 : 1};
}

Emitted cmd_verify(const RunConfig& cfg, std::ostream& err) {
  const SobolevParams params = SobolevParams::make(cfg.m, cfg.p);
  const ModelManifold M = build_model_from_spec(cfg.g_spec, cfg.m, cfg.t_max, cfg.step);
  const QuadratureConfig q = base_quadrature();
  std::vector<CheckRow> rows = model_rows(M, cfg.tol);
  const double K = sharp_constant(params, q);
  const double Kp = std::pow(K, -params.p());
  const double beta = normalize_beta(params, q);
  const bool euclid = M.is_euclidean();
  const bool ric_ok = ricci_nonnegative(M);
  const double b = M.is_cone() ? 0.0 : M.b();
  const std::vector<double> fd_grid = log_grid(1e-2, 1e2, 25);
  const std::vector<double> R_grid{10.0, 100.0, 1000.0};

  for (double lam : cfg.lambda_list) {
    const RadialFunction u = RadialFunction::talenti(make_profile(params, lam, beta));
    rows.push_back(leq_row("derivative_fd", lam, derivative_mismatch(u, fd_grid), 1e-6, 0.0));
    const Quotients qs = evaluate_quotients(u, M, params, q);
    if (euclid) {
      rows.push_back(eq_row("mass_unit", lam, qs.mass, 1.0, cfg.tol));
      rows.push_back(eq_row("energy_sharp", lam, qs.energy, Kp, 1e-6));
      rows.push_back(geq_row("quotient_sobolev_lower", lam, qs.sobolev, Kp, 1e-6));
    } else if (ric_ok) {
      rows.push_back(leq_row("mass_le_one", lam, qs.mass, 1.0, cfg.tol));
    } else {
      rows.push_back(leq_row("mass_le_growth", lam, qs.mass, std::exp(b * (cfg.m - 1)), cfg.tol));
    }
    if (ric_ok) rows.push_back(leq_row("quotient_plain_upper", lam, qs.plain, Kp, 1e-6));
    const double q2 = quotient_sobolev(u.scaled(2.0), M, params, q);
    rows.push_back(eq_row("homogeneity_sobolev", lam, q2, qs.sobolev, 1e-10));
    const DecayReport d = verify_decay_conditions(u, M, params, R_grid, q);
    CheckRow l1{"weighted_l1_finite", lam, d.weighted_l1, 0.0, 0.0, d.l1_finite};
    rows.push_back(l1);
    CheckRow avg{"average_decreasing", lam, d.averages.back().second, d.averages.front().second,
                 d.averages.front().second - d.averages.back().second, d.averages_decreasing};
    rows.push_back(avg);
  }
  KeyValues header = run_header(cfg);
  header.emplace_back("K", format_number(K));
  header.emplace_back("b", format_number(b));
  const bool pass = all_pass(rows);
  if (!pass) report_failure(rows, err);
  return {render_checks(rows, header, cfg.output), pass ? 0 : 1};
}

Emitted cmd_rigidity(const RunConfig& cfg, std::ostream& err) {
  const SobolevParams params = SobolevParams::make(cfg.m, cfg.p);
  const ModelManifold M = build_model_from_spec(cfg.g_spec, cfg.m, cfg.t_max, cfg.step);
  const QuadratureConfig q = base_quadrature();
  const double K = sharp_constant(params, q);
  KeyValues extra;
  extra.emplace_back("window_growth_ratio", format_number(window_growth_ratio(M)));

  double C_M = 0.0;
  std::string cm_source = "value";
  if (cfg.c_m) {
    C_M = *cfg.c_m;
  } else {
    cm_source = "estimate";
    const RadialEstimate est = estimate_radial_constant(M, params, q);
    extra.emplace_back("C_est", format_number(est.C_est));
    extra.emplace_back("C_est_lambda", format_number(est.lambda));
    extra.emplace_back("C_est_bump_a", format_number(est.bump.a));
    extra.emplace_back("C_est_iterations", std::to_string(est.iterations));
    extra.emplace_back("C_est_converged", est.converged ? "true" : "false");
    extra.emplace_back("C_est_label", "C_est <= C_M as quotient witnesses");
    C_M = est.C_est;
    if (est.C_est < K) {
      // C_M >= K holds on every manifold; the radial search only approaches K.
      if (est.C_est < K * (1.0 - 1e-6)) {
        extra.emplace_back("C_est_below_K", "true");
      }
      C_M = K;
    }
  }

  TheoremOptions opts;
  opts.C_M_source = cm_source;
  opts.rel_tol = cfg.tol;
  opts.c1_lambda = cfg.lambda_list.front();
  const double b = M.is_cone() ? 0.0 : M.b();
  const Mode mode = (b == 0.0 && ricci_nonnegative(M)) ? Mode::theorem1 : Mode::theorem2;
  if (cfg.gamma) {
    opts.gamma = *cfg.gamma;
    opts.gamma_source = "value";
  } else {
    opts.gamma = gamma_lower_bound(M, default_gamma_grid(M.t_max()));
    opts.gamma_source = "empirical";
  }
  const std::vector<double> grid = log_grid(M.t_max() / 100.0, M.t_max(), 100);
  const RigidityReport rep = verify_theorem(M, params, C_M, K, mode, grid, q, opts);
  if (!rep.consistent) err << "verdict violated: " << rep.verdict_details << "\n";
  return {render_rigidity(rep, extra, cfg.output), rep.consistent ? 0 : 1};
}

Emitted cmd_limits(const RunConfig& cfg, std::ostream& err) {
  const SobolevParams params = SobolevParams::make(cfg.m, cfg.p);
  const MassEscapeReport rep =
      mass_escape_experiment(params, cfg.T, cfg.lambda_list, base_quadrature());
  KeyValues header{{"command", "limits"},
                   {"m", std::to_string(cfg.m)},
                   {"p", format_number(cfg.p)}};
  if (!rep.pass()) {
    err << "mass escape check failed (sums_ok=" << rep.sums_ok
        << ", head_monotone=" << rep.head_monotone
        << ", final_below_threshold=" << rep.final_below_threshold << ")\n";
  }
  return {render_limits(rep, header, cfg.output), rep.pass() ? 0 : 1};
}

}  // namespace

const char* to_string(Command c) {
  switch (c) {
    case Command::constants:
      return "constants";
    case Command::model:
      return "model";
    case Command::verify:
      return "verify";
    case Command::rigidity:
      return "rigidity";
    case Command::limits:
      return "limits";
  }
  return "unknown";
}

std::vector<std::string> RunConfig::to_args() const {
  std::vector<std::string> a{to_string(command),
                             "--m",
                             std::to_string(m),
                             "--p",
                             exact(p),
                             "--lambda",
                             join(lambda_list),
                             "--g",
                             g_spec,
                             "--t-max",
                             exact(t_max),
                             "--step",
                             exact(step),
                             "--tol",
                             exact(tol),
                             "--c-m",
                             c_m ? exact(*c_m) : "estimate",
                             "--gamma",
                             gamma ? exact(*gamma) : "empirical",
                             "--T",
                             exact(T),
                             "--output",
                             output == Format::csv ? "csv" : "json"};
  if (out_path) {
    a.emplace_back("--out");
    a.push_back(*out_path);
  }
  return a;
}

RunConfig parse_run_config(const std::vector<std::string>& args, std::ostream& out) {
  CLI::App app{"Sharp Sobolev constants, model manifolds and volume rigidity checks", "sobrig"};
  app.require_subcommand(1);
  struct Raw {
    int m = 0;
    std::string p;
    std::string lambda = "1";
    std::string g = "zero";
    std::string t_max = "50";
    std::string step = "1e-3";
    std::string tol = "1e-8";
    std::string c_m = "estimate";
    std::string gamma = "empirical";
    std::string T = "1";
    std::string output = "csv";
    std::string out;
  } raw;
  const std::pair<Command, const char*> commands[] = {
      {Command::constants, "Normalisation and sharp constant"},
      {Command::model, "Build a model manifold and check its comparison chains"},
      {Command::verify, "Radial Sobolev checks on a model"},
      {Command::rigidity, "Rigidity constants and volume-ratio verdict"},
      {Command::limits, "Mass escape of the extremal family"}};
  std::vector<std::pair<Command, CLI::App*>> subs;
  for (const auto& [cmd, help] : commands) {
    CLI::App* sub = app.add_subcommand(to_string(cmd), help);
    sub->add_option("--m", raw.m, "Dimension")->required();
    sub->add_option("--p", raw.p, "Exponent")->required();
    sub->add_option("--lambda", raw.lambda, "Comma-separated lambda list");
    sub->add_option("--g", raw.g, "Curvature spec: zero|const:a:t_cut|rational:b0|table:path|cone:c");
    sub->add_option("--t-max", raw.t_max, "Window end");
    sub->add_option("--step", raw.step, "ODE step");
    sub->add_option("--tol", raw.tol, "Check tolerance");
    sub->add_option("--c-m", raw.c_m, "Sobolev constant: value or 'estimate'");
    sub->add_option("--gamma", raw.gamma, "Volume lower bound: value or 'empirical'");
    sub->add_option("--T", raw.T, "Split point for limits");
    sub->add_option("--output", raw.output, "csv or json");
    sub->add_option("--out", raw.out, "Output file (default stdout)");
    subs.emplace_back(cmd, sub);
  }
  std::vector<const char*> argv{"sobrig"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    throw HelpRequested{};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunConfig cfg;
  for (const auto& [cmd, sub] : subs) {
    if (sub->parsed()) cfg.command = cmd;
  }
  cfg.m = raw.m;
  cfg.p = parse_double(raw.p, "--p");
  cfg.lambda_list = parse_list(raw.lambda);
  cfg.g_spec = raw.g;
  cfg.t_max = parse_double(raw.t_max, "--t-max");
  cfg.step = parse_double(raw.step, "--step");
  cfg.tol = parse_double(raw.tol, "--tol");
  if (raw.c_m != "estimate") cfg.c_m = parse_double(raw.c_m, "--c-m");
  if (raw.gamma != "empirical") cfg.gamma = parse_double(raw.gamma, "--gamma");
  cfg.T = parse_double(raw.T, "--T");
  if (raw.output == "csv") {
    cfg.output = Format::csv;
  } else if (raw.output == "json") {
    cfg.output = Format::json;
  } else {
    throw UsageError("--output must be csv or json");
  }
  if (!raw.out.empty()) cfg.out_path = raw.out;
  if (!(cfg.t_max > 0.0) || !std::isfinite(cfg.t_max)) throw UsageError("--t-max must be > 0");
  if (!(cfg.step > 0.0) || cfg.step > cfg.t_max) throw UsageError("--step must lie in (0, t_max]");
  if (!(cfg.tol > 0.0)) throw UsageError("--tol must be > 0");
  if (cfg.gamma && !(*cfg.gamma > 0.0)) throw UsageError("--gamma must be > 0");
  if (cfg.c_m && !(*cfg.c_m > 0.0)) throw UsageError("--c-m must be > 0");
  return cfg;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Emitted result;
  try {
    switch (cfg.command) {
      case Command::constants:
        result = cmd_constants(cfg, err);
        break;
      case Command::model:
        result = cmd_model(cfg, err);
        break;
      case Command::verify:
        result = cmd_verify(cfg, err);
        break;
      case Command::rigidity:
        result = cmd_rigidity(cfg, err);
        break;
      case Command::limits:
        result = cmd_limits(cfg, err);
        break;
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "failed: " << e.what() << "\n";
    return 1;
  }
  if (cfg.out_path) {
    std::ofstream f(*cfg.out_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << *cfg.out_path << "\n";
      return 2;
    }
    f << result.text;
  } else {
    out << result.text;
  }
  return result.code;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_run_config(args, out);
  } catch (const HelpRequested&) {
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }
  return run(cfg, out, err);
}

}  // namespace sobrig
