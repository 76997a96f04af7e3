// Serial-versus-OpenMP timing for the two kernels the pipeline spends
// its time in: performance-curve evaluation over a gamma grid and the
// Monte Carlo coverage estimate. Both variants must agree bit for bit;
// the benchmark reports the speedup.

#include <chrono>
#include <cstdio>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "crossci/perf.hpp"

using namespace crossci;

namespace {

double seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

splines::IntervalFunctions sample_functions() {
  return splines::IntervalFunctions(
      splines::KnotGrid::uniform(6.0, 9),
      {0.15, 0.35, 0.4, 0.3, 0.15, 0.05, 0.01},
      {1.70, 1.72, 1.80, 1.95, 2.05, 2.02, 1.98, 1.97}, 0.05);
}

} // namespace

int main(int argc, char** argv) {
  int curve_points = 400;
  long long reps = 2'000'000;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) {
      curve_points = 80;
      reps = 200'000;
    }
  }

  const auto f = sample_functions();
  const double rho_tilde = 0.86602540378443865;
  auto quad = perf::QuadratureSpec::defaults(f.d());
  quad.check_convergence = false;
  const auto gammas =
      perf::QuadratureSpec::uniform_gamma_grid(10.0, 10.0 / curve_points);

#ifdef _OPENMP
  std::printf("threads available: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP\n");
#endif

  auto t0 = std::chrono::steady_clock::now();
  const auto serial = perf::perf_curve_serial(f, rho_tilde, gammas, quad);
  const double t_serial = seconds(t0);

  t0 = std::chrono::steady_clock::now();
  const auto parallel = perf::perf_curve(f, rho_tilde, gammas, quad);
  const double t_parallel = seconds(t0);

  bool equal = true;
  for (std::size_t i = 0; i < serial.coverage.size(); ++i)
    equal = equal && serial.coverage[i] == parallel.coverage[i] &&
            serial.sel2[i] == parallel.sel2[i];
  std::printf("perf_curve   %4zu points: serial %.3fs  parallel %.3fs  "
              "speedup %.2fx  identical %s\n",
              gammas.size(), t_serial, t_parallel, t_serial / t_parallel,
              equal ? "yes" : "NO");

  t0 = std::chrono::steady_clock::now();
  const auto mc_serial = perf::mc_coverage_serial(f, rho_tilde, 1.0, reps, 42);
  const double t_mc_serial = seconds(t0);

  t0 = std::chrono::steady_clock::now();
  const auto mc_parallel = perf::mc_coverage(f, rho_tilde, 1.0, reps, 42);
  const double t_mc_parallel = seconds(t0);

  std::printf("mc_coverage  %4lld reps: serial %.3fs  parallel %.3fs  "
              "speedup %.2fx  identical %s\n",
              reps, t_mc_serial, t_mc_parallel, t_mc_serial / t_mc_parallel,
              mc_serial.estimate == mc_parallel.estimate ? "yes" : "NO");
  return 0;
}
