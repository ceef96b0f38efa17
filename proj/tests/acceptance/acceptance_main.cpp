// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sobrig/model_manifold.hpp"
#include "sobrig/rigidity.hpp"
#include "sobrig/sobolev.hpp"
#include "sobrig/talenti.hpp"

using namespace sobrig;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

using Criterion = std::function<void(Verdict&)>;

struct Entry {
  int id;
  const char* name;
  double max_seconds;  // 0 means no runtime limit
  Criterion body;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

const QuadratureConfig kCfg;

void yamabe_identity(Verdict& v) {
  double worst = 0.0;
  for (auto [m, p] : std::vector<std::pair<int, double>>{{3, 2.0}, {4, 2.0}, {6, 3.0}, {4, 1.5}}) {
    const SobolevParams s = SobolevParams::make(m, p);
    const double K = sharp_constant(s, kCfg);
    for (double lam : {0.5, 2.0}) {
      for (double r : yamabe_residuals(make_profile(s, lam, kCfg), K, log_grid(1e-2, 1e2, 200))) {
        worst = std::max(worst, std::abs(r));
      }
    }
  }
  v.require(worst <= 1e-6, "max residual " + sci(worst) + " > 1e-6");
  v.detail << (v.pass ? "max residual " + sci(worst) : "");
}

void normalization(Verdict& v) {
  const SobolevParams s = SobolevParams::make(4, 2.0);
  const double beta = normalize_beta(s, kCfg);
  double mass_err = 0.0, K_spread = 0.0, beta_spread = 0.0;
  const double K1 = sharp_constant_at(s, beta, 1.0, kCfg);
  for (double lam : {0.5, 1.0, 5.0, 20.0}) {
    mass_err = std::max(mass_err, std::abs(euclidean_mass(make_profile(s, lam, beta), kCfg) - 1.0));
    K_spread = std::max(K_spread, oracle::rel(sharp_constant_at(s, beta, lam, kCfg), K1));
    // beta from the unnormalized mass at this lambda: beta^{-p*} = mass_lambda
    const double beta_lam = std::pow(unnormalized_mass(s, lam, kCfg), -1.0 / s.p_star());
    beta_spread = std::max(beta_spread, oracle::rel(beta_lam, beta));
  }
  v.require(mass_err <= 1e-8, "mass error " + sci(mass_err));
  v.require(K_spread <= 1e-6, "K spread " + sci(K_spread));
  v.require(beta_spread <= 1e-6, "beta spread " + sci(beta_spread));
  const double K_or = oracle::sharp_constant(4, 2.0);
  const double b_or = oracle::talenti_beta(4, 2.0);
  v.require(oracle::rel(K1, 0.31222) <= 1e-4 && oracle::rel(K_or, 0.31222) <= 1e-4,
            "K(4,2) not within 1e-4 of 0.31222");
  v.require(oracle::rel(beta, 0.88300) <= 1e-4 && oracle::rel(b_or, 0.88300) <= 1e-4,
            "beta(4,2) not within 1e-4 of 0.88300");
  v.require(oracle::rel(K1, K_or) <= 1e-9, "K differs from oracle by " + sci(oracle::rel(K1, K_or)));
  if (v.pass) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "K=%.10f beta=%.10f mass err %s", K1, beta, sci(mass_err).c_str());
    v.detail << buf;
  }
}

void euclidean_degeneration(Verdict& v) {
  const SobolevParams s = SobolevParams::make(4, 2.0);
  const ModelManifold E = ModelManifold::build(4, CurvatureProfile::zero(), 50.0, 1e-3);
  double h_err = 0.0;
  for (double t : log_grid(1e-2, 50.0, 200)) h_err = std::max(h_err, oracle::rel(E.h(t), t));
  v.require(h_err <= 1e-10, "h(t)=t error " + sci(h_err));
  v.require(E.b() == 0.0, "b != 0");
  const double K = sharp_constant(s, kCfg);
  const double beta = normalize_beta(s, kCfg);
  const double C2 = c2(s, beta, E.b(), 1.0);
  v.require(C2 == 0.0, "C2 = " + sci(C2));
  const double C_M = 1.1 * K;
  const double hat = c_hat(c3(s, C_M, K, C2), E.b(), s);
  v.require(oracle::rel(hat, std::pow(K / C_M, 4)) <= 1e-12, "C_hat != (K/C_M)^m");
  const RigidityReport r = verify_theorem(E, s, K, K, Mode::theorem1, log_grid(0.5, 50.0, 100), kCfg);
  double ratio_err = 0.0;
  for (const auto& row : r.ratio_table) ratio_err = std::max(ratio_err, std::abs(row.ratio - 1.0));
  v.require(ratio_err <= 1e-10, "ratio deviates by " + sci(ratio_err));
  v.require(r.consistent, "verdict violated: " + r.verdict_details);
  if (v.pass) v.detail << "ratio dev " << sci(ratio_err);
}

void small_b_limit(Verdict& v) {
  const SobolevParams s = SobolevParams::make(4, 2.0);
  const double K = sharp_constant(s, kCfg);
  const double beta = normalize_beta(s, kCfg);
  const double target = std::pow(1.0 / 1.1, 4);
  std::vector<double> err;
  for (double b0 : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const ModelManifold M = ModelManifold::build(4, CurvatureProfile::rational_decay(b0), 50.0, 1e-3);
    const double b = M.b();
    const double hat = c_hat(c3(s, 1.1 * K, K, c2(s, beta, b, 1.0)), b, s);
    err.push_back(std::abs(hat - target));
  }
  for (std::size_t i = 1; i < err.size(); ++i) {
    const double ratio = err[i] / err[i - 1];
    v.require(ratio <= 0.15, "decade ratio " + sci(ratio) + " > 0.15");
    if (v.pass) v.detail << (i > 1 ? " " : "ratios ") << sci(ratio);
  }
}

void volume_chains(Verdict& v) {
  const std::vector<double> ts{0.5, 1, 2, 5, 10, 20};
  const ModelManifold M = ModelManifold::build(4, CurvatureProfile::rational_decay(0.1), 50.0, 1e-3);
  const auto rows = verify_volume_chain(M, ts);
  if (const CheckRow* f = first_failure(rows)) {
    v.require(false, std::string("rational chain fails: ") + f->name + " at t=" + sci(f->t));
  }
  const ModelManifold G1 =
      ModelManifold::build(4, CurvatureProfile::constant_cutoff(1.0, INFINITY), 20.0, 1e-3);
  VolumeChainOptions opts;
  opts.b_claim = 0.1;
  const CheckRow* bad = nullptr;
  const auto control = verify_volume_chain(G1, ts, opts);
  for (const auto& row : control) {
    const bool upper = row.name == "area_upper" || row.name == "volume_upper";
    if (upper && !row.pass && row.t <= 10.0) {
      bad = &row;
      break;
    }
  }
  v.require(bad != nullptr, "G=1 control not detected at t <= 10");
  if (v.pass) v.detail << rows.size() << " rows pass; control fails " << bad->name << " at t=" << bad->t;
}

void quotient_bounds(Verdict& v) {
  const SobolevParams s = SobolevParams::make(4, 2.0);
  const double K = oracle::sharp_constant(4, 2.0);
  const double Kp = std::pow(K, -2.0);
  const ModelManifold E = ModelManifold::build(4, CurvatureProfile::zero(), 50.0, 1e-3);
  const RadialEstimate e = estimate_radial_constant(E, s, kCfg);
  v.require(oracle::rel(e.C_est, K) <= 1e-4, "C_est off by " + sci(oracle::rel(e.C_est, K)));
  double worst = e.min_quotient;
  for (const auto& [lam, q] : e.scan) worst = std::min(worst, q);
  const TalentiProfile base = make_profile(s, 1.0, kCfg);
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> amp(-0.8, 3.0), mu(-3.0, 3.0), sig(0.1, 3.0),
      loglam(-2.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    const RadialFunction u = RadialFunction::perturbed(
        base.with_lambda(std::pow(10.0, loglam(rng))), Bump{amp(rng), mu(rng), sig(rng)});
    worst = std::min(worst, quotient_sobolev(u, E, s, kCfg));
  }
  v.require(worst >= Kp * (1 - 1e-6), "competitor beats K^-p by " + sci(1 - worst / Kp));
  const ModelManifold C = ModelManifold::conical(4, 0.8, 50.0, 1e-3);
  double plain_max = 0.0;
  for (double lam : {0.5, 1.0, 5.0}) {
    plain_max = std::max(plain_max, quotient_plain(RadialFunction::talenti(base.with_lambda(lam)), C, s, kCfg));
  }
  v.require(plain_max <= Kp * (1 + 1e-6), "cone plain quotient " + sci(plain_max / Kp) + " K^-p");
  if (v.pass) {
    v.detail << "C_est/K-1=" << sci(e.C_est / K - 1) << " cone plain/K^-p=" << sci(plain_max / Kp);
  }
}

void mass_escape(Verdict& v) {
  const SobolevParams s = SobolevParams::make(4, 2.0);
  const std::vector<double> lams{10.0, 100.0, 1000.0, 10000.0};
  const MassEscapeReport r = mass_escape_experiment(s, 1.0, lams, kCfg, 0.01, 1e-6);
  v.require(r.sums_ok, "head+tail differs from 1 by more than 1e-6");
  v.require(r.head_monotone, "head not nonincreasing");
  v.require(r.final_below_threshold, "head(1e4) = " + sci(r.rows.back().head) + " > 0.01");
  if (v.pass) v.detail << "head(1e4)=" << sci(r.rows.back().head);
}

void monotone_profile(Verdict& v) {
  const SobolevParams s = SobolevParams::make(4, 2.0);
  const double K = oracle::sharp_constant(4, 2.0);
  const ModelManifold C = ModelManifold::conical(4, 0.8, 50.0, 1e-3);
  const RadialEstimate e = estimate_radial_constant(C, s, kCfg);
  const double scale = std::pow(e.C_est / K, 4);
  const VProfile p = v_profile(C, nullptr, scale, log_grid(0.5, 50.0, 100), 1e-9);
  v.require(p.values.size() == 100, "grid size");
  v.require(p.nonincreasing, "v increases by " + sci(p.max_increase));
  const double last = p.values.back().second;
  v.require(last >= -1e-4, "v(t_max) = " + sci(last));
  if (v.pass) v.detail << "v(t_max)=" << sci(last) << " max step " << sci(p.max_increase);
}

void gamma_identities(Verdict& v) {
  const int m = 4;
  const double q = 2.0, lam = 1.0;
  const ModelManifold E = ModelManifold::build(m, CurvatureProfile::zero(), 50.0, 1e-3);
  const double omega = E.omega_sphere();
  // int t^{m-1} (lambda + t^q)^{-k} dt = (1/q) Gamma(m/q) Gamma(k - m/q) / Gamma(k)
  const auto closed = [&](double k) {
    return gamma_fn(m / q) * gamma_fn(k - m / q) / gamma_fn(k) / q;
  };
  const auto numeric = [&](double k) {
    return E.integrate([&](double t) { return std::pow(lam + std::pow(t, q), -k); }, 1.0, kCfg,
                       EndpointHints{m - 1.0, q * k - (m - 1)}) /
           omega;
  };
  const double r1 = closed(m - 1.0) * q, r2 = closed(m) * q;
  v.require(oracle::rel(r1, 0.5) <= 1e-14, "reduced ratio " + sci(r1) + " != 1/2");
  v.require(oracle::rel(r2, 1.0 / 6.0) <= 1e-14, "reduced ratio " + sci(r2) + " != 1/6");
  const double e1 = oracle::rel(numeric(m - 1.0), closed(m - 1.0));
  const double e2 = oracle::rel(numeric(m), closed(m));
  v.require(e1 <= 1e-8, "first integral off by " + sci(e1));
  v.require(e2 <= 1e-8, "second integral off by " + sci(e2));
  if (v.pass) v.detail << "rel errors " << sci(e1) << " " << sci(e2);
}

struct Captured {
  int code = -1;
  std::string out;
};

Captured run_command(const std::string& cmd) {
  Captured c;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return c;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) c.out.append(buf, n);
  const int status = pclose(pipe);
  c.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return c;
}

void pipeline_determinism(Verdict& v) {
  const std::string cmd = std::string("\"") + SOBRIG_CLI_PATH +
                          "\" rigidity --m 4 --p 2 --g rational:0.1 --c-m estimate --gamma empirical"
                          " 2>/dev/null";
  const Captured a = run_command(cmd);
  const Captured b = run_command(cmd);
  v.require(!a.out.empty(), "empty report");
  v.require(a.code == b.code, "exit codes differ");
  v.require(a.out == b.out, "reports differ");
  if (v.pass) v.detail << a.out.size() << " bytes identical, exit " << a.code;
}

}  // namespace

int main() {
  const std::vector<Entry> entries{
      {1, "yamabe_identity", 5.0, yamabe_identity},
      {2, "normalization_and_scaling", 0.0, normalization},
      {3, "euclidean_degeneration", 1.0, euclidean_degeneration},
      {4, "small_b_limit", 10.0, small_b_limit},
      {5, "volume_chains", 0.0, volume_chains},
      {6, "quotient_bounds", 60.0, quotient_bounds},
      {7, "mass_escape", 0.0, mass_escape},
      {8, "monotone_profile", 0.0, monotone_profile},
      {9, "gamma_identities", 0.0, gamma_identities},
      {10, "pipeline_determinism", 0.0, pipeline_determinism},
  };
  int failures = 0;
  for (const auto& e : entries) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      e.body(v);
    } catch (const std::exception& ex) {
      v.require(false, std::string("exception: ") + ex.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (e.max_seconds > 0.0) {
      v.require(secs < e.max_seconds, "runtime " + sci(secs) + " s over limit");
    }
    if (!v.pass) ++failures;
    std::printf("%s criterion %2d %-26s %7.2fs  %s\n", v.pass ? "PASS" : "FAIL", e.id, e.name, secs,
                v.detail.str().c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(entries.size()) - failures,
              entries.size());
  return failures == 0 ? 0 : 1;
}
