// Serial reference vs OpenMP kernels: wall time and bitwise agreement.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <vector>

#include "sobrig/model_manifold.hpp"
#include "sobrig/rigidity.hpp"
#include "sobrig/sobolev.hpp"
#include "sobrig/talenti.hpp"

using namespace sobrig;

namespace {

double seconds_of(const std::function<void()>& f, int reps) {
  std::vector<double> times;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

void row(const char* name, const std::function<std::vector<double>(Exec)>& kernel, int reps) {
  std::vector<double> serial;
  std::vector<double> parallel;
  const double ts = seconds_of([&] { serial = kernel(Exec::serial); }, reps);
  const double tp = seconds_of([&] { parallel = kernel(Exec::parallel); }, reps);
  std::printf("%-22s %12.6f %12.6f %8.2f %s\n", name, ts, tp, ts / tp,
              same_bits(serial, parallel) ? "identical" : "DIFFERENT");
}

}  // namespace

int main(int argc, char** argv) {
  int reps = 3;
  if (argc > 1) reps = std::max(1, std::atoi(argv[1]));
  const SobolevParams params = SobolevParams::make(4, 2.0);
  const QuadratureConfig cfg;
  const TalentiProfile prof = make_profile(params, 1.0, cfg);
  const double K = sharp_constant(params, cfg);
  const CurvatureProfile g = CurvatureProfile::rational_decay(0.1);
  const ModelManifold model = ModelManifold::build(4, g, 50.0, 1e-3);

  std::printf("threads=%d reps=%d\n", worker_count(), reps);
  std::printf("%-22s %12s %12s %8s %s\n", "kernel", "serial_s", "parallel_s", "speedup", "result");

  row("volume_cache", [&](Exec e) {
    const ModelManifold M = ModelManifold::build(4, g, 50.0, 1e-3, e);
    std::vector<double> out;
    for (double t : log_grid(0.1, 50.0, 64)) out.push_back(M.volume(t));
    return out;
  }, reps);

  row("yamabe_residuals", [&](Exec e) {
    return yamabe_residuals(prof, K, log_grid(1e-2, 1e2, 20000), e);
  }, reps);

  row("lambda_quotients", [&](Exec e) {
    std::vector<double> lambdas;
    for (int k = -4; k <= 8; ++k) lambdas.push_back(std::pow(10.0, 0.5 * k));
    return map_grid(lambdas, [&](double lam) {
      return quotient_sobolev(RadialFunction::talenti(prof.with_lambda(lam)), model, params, cfg);
    }, e);
  }, reps);

  row("gamma_lower_bound", [&](Exec e) {
    return std::vector<double>{gamma_lower_bound(model, log_grid(1e-3, 50.0, 20000), e)};
  }, reps);

  row("mass_escape", [&](Exec e) {
    const std::vector<double> lambdas{10.0, 100.0, 1000.0, 10000.0};
    const MassEscapeReport rep = mass_escape_experiment(params, 1.0, lambdas, cfg, 0.01, 1e-6, e);
    std::vector<double> out;
    for (const auto& r : rep.rows) out.push_back(r.head);
    return out;
  }, reps);
  return 0;
}
