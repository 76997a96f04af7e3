#include "crossci/perf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "crossci/normal.hpp"
#include "crossci/quadrature.hpp"
#include "crossci/rng.hpp"

namespace crossci::perf {

namespace {

using quadrature::gauss_legendre;
using quadrature::panel_edges;

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kQuadTol = 1e-8;

// Runs the integral at the requested panel count, and at double the
// count when convergence checking is on.
template <class F>
double checked_integral(double a, double b, const std::vector<double>& marks,
                        const QuadratureSpec& quad, const char* what,
                        F&& integrand) {
  const auto rule = gauss_legendre(quad.nodes_per_panel);
  const double v1 = quadrature::integrate(panel_edges(a, b, marks, quad.panels),
                                          rule, integrand);
  if (!quad.check_convergence) return v1;
  const double v2 = quadrature::integrate(
      panel_edges(a, b, marks, 2 * quad.panels), rule, integrand);
  if (std::fabs(v1 - v2) > kQuadTol)
    throw QuadratureError(std::string(what) +
                          ": quadrature disagreement between panel counts (" +
                          std::to_string(std::fabs(v1 - v2)) + ")");
  return v2;
}

std::vector<double> coverage_marks(const splines::KnotGrid& knots,
                                   double gamma) {
  std::vector<double> marks;
  marks.reserve(2 * knots.q() + 1);
  for (double x : knots.x) {
    marks.push_back(x);
    if (x > 0.0) marks.push_back(-x);
  }
  if (std::fabs(gamma) < knots.d()) marks.push_back(gamma);
  return marks;
}

void require_rho_tilde_open(double rho_tilde, const char* who) {
  if (!(rho_tilde > kInvSqrt2 && rho_tilde < 1.0))
    throw std::domain_error(std::string(who) +
                            ": rho_tilde must lie in (1/sqrt(2), 1)");
}

} // namespace

void QuadratureSpec::validate() const {
  if (panels < 8) throw std::invalid_argument("QuadratureSpec: panels >= 8");
  if (nodes_per_panel < 5)
    throw std::invalid_argument("QuadratureSpec: nodes_per_panel >= 5");
  if (gamma_grid.empty() || gamma_grid.front() != 0.0)
    throw std::invalid_argument(
        "QuadratureSpec: gamma_grid must start at 0");
  for (std::size_t i = 0; i + 1 < gamma_grid.size(); ++i)
    if (!(gamma_grid[i] < gamma_grid[i + 1]))
      throw std::invalid_argument(
          "QuadratureSpec: gamma_grid must strictly increase");
}

std::vector<double> QuadratureSpec::uniform_gamma_grid(double gamma_max,
                                                       double step) {
  if (!(gamma_max > 0.0) || !(step > 0.0))
    throw std::invalid_argument("uniform_gamma_grid: need positive arguments");
  std::vector<double> grid;
  const int n = static_cast<int>(std::ceil(gamma_max / step - 1e-9));
  grid.reserve(n + 1);
  for (int i = 0; i <= n; ++i) grid.push_back(std::min(i * step, gamma_max));
  return grid;
}

QuadratureSpec QuadratureSpec::defaults(double d) {
  QuadratureSpec quad;
  quad.gamma_max = d + 4.0;
  quad.gamma_grid = uniform_gamma_grid(quad.gamma_max, 0.05);
  return quad;
}

double lambda_prob(double x, double y, double mu, double v) {
  if (!(v > 0.0)) throw std::domain_error("lambda_prob: v must be > 0");
  if (!(x <= y)) throw std::domain_error("lambda_prob: need x <= y");
  const double sd = std::sqrt(v);
  const double p = norm_cdf((y - mu) / sd) - norm_cdf((x - mu) / sd);
  return std::clamp(p, 0.0, 1.0);
}

double coverage(const splines::IntervalFunctions& f, double rho_tilde,
                double gamma, const QuadratureSpec& quad) {
  require_rho_tilde_open(rho_tilde, "coverage");
  if (!std::isfinite(gamma)) throw std::domain_error("coverage: gamma");
  const double tau = std::sqrt(1.0 - rho_tilde * rho_tilde);
  const double c = f.c_alpha();
  auto integrand = [&](double h) {
    const double mu = rho_tilde * (h - gamma);
    const auto [l, u] = f.ell_u(h);
    const double k = norm_cdf((u - mu) / tau) - norm_cdf((l - mu) / tau);
    const double kd = norm_cdf((c - mu) / tau) - norm_cdf((-c - mu) / tau);
    return (k - kd) * norm_pdf(h - gamma);
  };
  const double integral =
      checked_integral(-f.d(), f.d(), coverage_marks(f.knots(), gamma), quad,
                       "coverage", integrand);
  return std::clamp(1.0 - f.alpha() + integral, 0.0, 1.0);
}

double sel(const splines::IntervalFunctions& f, double gamma,
           const QuadratureSpec& quad) {
  if (!std::isfinite(gamma)) throw std::domain_error("sel: gamma");
  const double c = f.c_alpha();
  auto integrand = [&](double h) {
    return (f.eval_s(std::fabs(h)) - c) * norm_pdf(h - gamma);
  };
  const double integral =
      checked_integral(-f.d(), f.d(), coverage_marks(f.knots(), gamma), quad,
                       "sel", integrand);
  return 1.0 + integral / c;
}

double criterion_integral(double d, double c_alpha, double omega,
                          const std::function<double(double)>& s_of,
                          const QuadratureSpec& quad) {
  if (!(omega >= 0.0))
    throw std::domain_error("criterion: omega must be >= 0");
  auto integrand = [&](double h) {
    return (s_of(h) - c_alpha) * (omega + norm_pdf(h));
  };
  const double integral =
      checked_integral(0.0, d, {}, quad, "criterion", integrand);
  return 2.0 / c_alpha * integral;
}

double criterion(const splines::IntervalFunctions& f, const WeightSpec& w,
                 const QuadratureSpec& quad) {
  if (!(w.omega >= 0.0))
    throw std::domain_error("criterion: omega must be >= 0");
  auto integrand = [&](double h) {
    return (f.eval_s(h) - f.c_alpha()) * (w.omega + norm_pdf(h));
  };
  const double integral = checked_integral(0.0, f.d(), f.knots().x, quad,
                                           "criterion", integrand);
  return 2.0 / f.c_alpha() * integral;
}

namespace {

PerfCurve curve_impl(const splines::IntervalFunctions& f, double rho_tilde,
                     const std::vector<double>& gammas,
                     const QuadratureSpec& quad, bool parallel) {
  if (gammas.empty())
    throw std::invalid_argument("perf_curve: empty gamma grid");
  for (std::size_t i = 0; i + 1 < gammas.size(); ++i)
    if (!(gammas[i] < gammas[i + 1]))
      throw std::invalid_argument("perf_curve: gammas must strictly increase");

  PerfCurve curve;
  curve.gammas = gammas;
  const int n = static_cast<int>(gammas.size());
  curve.coverage.resize(n);
  curve.sel2.resize(n);

  std::string error;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < n; ++i) {
    try {
      curve.coverage[i] = coverage(f, rho_tilde, gammas[i], quad);
      const double e = sel(f, gammas[i], quad);
      curve.sel2[i] = e * e;
    } catch (const std::exception& ex) {
#pragma omp critical
      if (error.empty()) error = ex.what();
    }
  }
  if (!error.empty()) throw QuadratureError(error);
  return curve;
}

} // namespace

PerfCurve perf_curve(const splines::IntervalFunctions& f, double rho_tilde,
                     const std::vector<double>& gammas,
                     const QuadratureSpec& quad) {
  return curve_impl(f, rho_tilde, gammas, quad, true);
}

PerfCurve perf_curve_serial(const splines::IntervalFunctions& f,
                            double rho_tilde,
                            const std::vector<double>& gammas,
                            const QuadratureSpec& quad) {
  return curve_impl(f, rho_tilde, gammas, quad, false);
}

namespace {

McEstimate mc_coverage_impl(const splines::IntervalFunctions& f,
                            double rho_tilde, double gamma, std::int64_t reps,
                            std::uint64_t seed, bool parallel) {
  require_rho_tilde_open(rho_tilde, "mc_coverage");
  if (reps < 10000)
    throw std::invalid_argument("mc_coverage: need at least 1e4 replications");
  const double tau = std::sqrt(1.0 - rho_tilde * rho_tilde);

  // Fixed-size blocks with per-replication streams keep the count
  // independent of the thread schedule.
  constexpr std::int64_t kBlock = 1 << 14;
  const std::int64_t nblocks = (reps + kBlock - 1) / kBlock;
  std::vector<std::int64_t> hits(nblocks, 0);

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::int64_t blk = 0; blk < nblocks; ++blk) {
    const std::int64_t lo = blk * kBlock;
    const std::int64_t hi = std::min(reps, lo + kBlock);
    std::int64_t count = 0;
    for (std::int64_t r = lo; r < hi; ++r) {
      RandomStream rng(seed, static_cast<std::uint64_t>(r));
      const double z1 = rng.normal();
      const double z2 = rng.normal();
      const double h = gamma + z1;
      const double g = rho_tilde * z1 + tau * z2;
      const auto [l, u] = f.ell_u(h);
      if (l <= g && g <= u) ++count;
    }
    hits[blk] = count;
  }

  std::int64_t total = 0;
  for (std::int64_t c : hits) total += c;
  McEstimate est;
  est.estimate = static_cast<double>(total) / static_cast<double>(reps);
  est.std_error =
      std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(reps));
  return est;
}

} // namespace

McEstimate mc_coverage(const splines::IntervalFunctions& f, double rho_tilde,
                       double gamma, std::int64_t reps, std::uint64_t seed) {
  return mc_coverage_impl(f, rho_tilde, gamma, reps, seed, true);
}

McEstimate mc_coverage_serial(const splines::IntervalFunctions& f,
                              double rho_tilde, double gamma,
                              std::int64_t reps, std::uint64_t seed) {
  return mc_coverage_impl(f, rho_tilde, gamma, reps, seed, false);
}

namespace {

// Golden-section search for a minimum of fn on [a, b] to 1e-6 in gamma.
CurveExtremum golden_min(double a, double b,
                         const std::function<double(double)>& fn) {
  constexpr double kInvPhi = 0.61803398874989485;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = fn(x1), f2 = fn(x2);
  while (b - a > 1e-6) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = fn(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = fn(x2);
    }
  }
  const double mid = 0.5 * (a + b);
  return CurveExtremum{mid, fn(mid)};
}

CurveExtremum grid_minimum(const std::vector<double>& grid,
                           const std::function<double(double)>& fn) {
  const int n = static_cast<int>(grid.size());
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) vals[i] = fn(grid[i]);

  CurveExtremum best{grid[0], vals[0]};
  auto consider = [&](const CurveExtremum& cand) {
    if (cand.value < best.value) best = cand;
  };
  for (int i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || vals[i] <= vals[i - 1];
    const bool right_ok = i == n - 1 || vals[i] <= vals[i + 1];
    if (!(left_ok && right_ok)) continue;
    const double a = grid[std::max(0, i - 1)];
    const double b = grid[std::min(n - 1, i + 1)];
    consider(a < b ? golden_min(a, b, fn) : CurveExtremum{grid[i], vals[i]});
  }
  return best;
}

} // namespace

CurveExtremum min_coverage(const splines::IntervalFunctions& f,
                           double rho_tilde, const QuadratureSpec& quad) {
  quad.validate();
  auto fn = [&](double g) { return coverage(f, rho_tilde, g, quad); };
  return grid_minimum(quad.gamma_grid, fn);
}

CurveExtremum max_sel2(const splines::IntervalFunctions& f,
                       const QuadratureSpec& quad) {
  quad.validate();
  auto neg = [&](double g) {
    const double e = sel(f, g, quad);
    return -e * e;
  };
  CurveExtremum m = grid_minimum(quad.gamma_grid, neg);
  return CurveExtremum{m.gamma, -m.value};
}

} // namespace crossci::perf
