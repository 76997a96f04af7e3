#include "crossci/compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "crossci/nlp.hpp"
#include "crossci/perf_model.hpp"
#include "crossci/rng.hpp"

namespace crossci::compare {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kRefineTol = 2e-6;
constexpr double kGoldenInvPhi = 0.61803398874989485;

double golden_extremum(double a, double b,
                       const std::function<double(double)>& fn, bool minimize,
                       double* arg) {
  auto val = [&](double x) { return minimize ? fn(x) : -fn(x); };
  double x1 = b - kGoldenInvPhi * (b - a);
  double x2 = a + kGoldenInvPhi * (b - a);
  double f1 = val(x1), f2 = val(x2);
  while (b - a > 1e-6) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGoldenInvPhi * (b - a);
      f1 = val(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGoldenInvPhi * (b - a);
      f2 = val(x2);
    }
  }
  const double mid = 0.5 * (a + b);
  if (arg) *arg = mid;
  return fn(mid);
}

struct Extremum {
  double gamma = 0.0;
  double value = 0.0;
};

Extremum scan_extremum(const std::function<double(double)>& fn,
                       double gamma_max, double step, bool minimize) {
  const int n = static_cast<int>(std::ceil(gamma_max / step)) + 1;
  std::vector<double> g(n), v(n);
  for (int i = 0; i < n; ++i) {
    g[i] = std::min(i * step, gamma_max);
    v[i] = fn(g[i]);
  }
  auto better = [&](double x, double y) { return minimize ? x < y : x > y; };
  Extremum best{g[0], v[0]};
  for (int i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || !better(v[i - 1], v[i]);
    const bool right_ok = i == n - 1 || !better(v[i + 1], v[i]);
    if (!(left_ok && right_ok)) continue;
    double arg = g[i];
    const double a = g[std::max(0, i - 1)];
    const double b = g[std::min(n - 1, i + 1)];
    const double val =
        a < b ? golden_extremum(a, b, fn, minimize, &arg) : v[i];
    if (better(val, best.value)) best = {arg, val};
  }
  return best;
}

} // namespace

void ComparisonSpec::validate() const {
  if (!(max_e2_bound > 1.0))
    throw std::invalid_argument("ComparisonSpec: max_e2_bound must exceed 1");
  if (rho_tilde_grid.empty())
    throw std::invalid_argument("ComparisonSpec: empty rho_tilde grid");
  for (double r : rho_tilde_grid)
    if (!(r > kInvSqrt2 && r < 1.0))
      throw std::invalid_argument(
          "ComparisonSpec: rho_tilde values must lie in (1/sqrt(2), 1)");
}

double crd_efficiency(const model::TrialDesign& design, double ratio) {
  if (!(ratio >= 0.0))
    throw std::domain_error("crd_efficiency: ratio must be >= 0");
  const double m = design.m();
  return 0.25 * design.total() * m / (1.0 + ratio);
}

std::vector<double> r2_curve(const splines::IntervalFunctions& f,
                             const std::vector<double>& gammas,
                             const perf::QuadratureSpec& quad) {
  std::vector<double> out;
  out.reserve(gammas.size());
  for (double g : gammas) {
    const double e = perf::sel(f, g, quad);
    out.push_back(2.0 * e * e);
  }
  return out;
}

namespace {

struct InstanceOutcome {
  std::vector<double> z;
  double min_e2 = 0.0;
  double max_violation = 0.0;
};

// One adversarial search: minimize min_gamma e^2 subject to the coverage
// floor and the e^2 cap, both enforced on gamma grids that get refined
// with their true interior extrema.
InstanceOutcome solve_min_r2_instance(optimize::PerfModel& model,
                                      const ComparisonSpec& spec,
                                      std::vector<double> cov_gammas,
                                      std::vector<double> cap_gammas,
                                      std::vector<double> z0,
                                      double gamma_max) {
  const int nb = model.nb();
  const int ns = model.ns();
  const double c = model.c_alpha();
  const double level = 1.0 - model.alpha();
  const auto& ctl = spec.opt_template.controls;

  nlp::Problem prob;
  prob.dim = nb + ns;
  prob.lower.assign(prob.dim, -3.0 * c);
  prob.upper.assign(prob.dim, 3.0 * c);
  for (int k = 0; k < ns; ++k) prob.lower[nb + k] = 0.0;

  // min_gamma e^2 with a Danskin gradient at the refined minimizer
  prob.objective = [&](const std::vector<double>& z,
                       std::vector<double>* grad) {
    std::vector<double> e;
    model.e_all(z, e);
    int jmin = 0;
    for (std::size_t j = 1; j < e.size(); ++j)
      if (e[j] * e[j] < e[jmin] * e[jmin]) jmin = static_cast<int>(j);
    const auto& grid = model.e_gammas();
    const double a = grid[std::max(0, jmin - 1)];
    const double b = grid[std::min<int>(grid.size() - 1, jmin + 1)];
    auto e2_of = [&](double g) {
      const double v = model.e_at(z, g);
      return v * v;
    };
    double gstar = grid[jmin];
    const double val =
        a < b ? golden_extremum(a, b, e2_of, true, &gstar) : e2_of(gstar);
    if (grad) {
      std::fill(grad->begin(), grad->end(), 0.0);
      std::vector<double> row;
      double offset;
      model.e_row(gstar, row, offset);
      const double ev = model.e_at(z, gstar);
      for (int k = 0; k < ns; ++k) (*grad)[nb + k] = 2.0 * ev * row[k];
    }
    return val;
  };

  // grid sizes change across refinement rounds; the lambdas read these
  int n_cov = 0, n_cap = 0;

  std::vector<double> cov, evals;
  prob.constraints = [&](const std::vector<double>& z,
                         std::vector<double>& g) {
    model.coverage_all(z, cov);
    for (int j = 0; j < n_cov; ++j) g[j] = level - cov[j];
    model.e_all(z, evals);
    for (int j = 0; j < n_cap; ++j)
      g[n_cov + j] = evals[j] * evals[j] - spec.max_e2_bound;
  };
  prob.constraints_grad = [&](const std::vector<double>& z,
                              const std::vector<double>& coef,
                              std::vector<double>& grad) {
    std::vector<double> neg(n_cov);
    for (int j = 0; j < n_cov; ++j) neg[j] = -coef[j];
    model.coverage_grad_accum(z, neg, grad);
    model.e_all(z, evals);
    std::vector<double> row;
    double offset;
    for (int j = 0; j < n_cap; ++j) {
      if (coef[n_cov + j] == 0.0) continue;
      model.e_row(model.e_gammas()[j], row, offset);
      const double scale = coef[n_cov + j] * 2.0 * evals[j];
      for (int k = 0; k < ns; ++k) grad[nb + k] += scale * row[k];
    }
  };

  nlp::SolveOptions sopt;
  sopt.max_outer = ctl.max_outer;
  sopt.max_inner = ctl.max_inner;
  sopt.constraint_target = 1e-8;
  sopt.grad_tol = 1e-9;

  InstanceOutcome out;
  out.z = std::move(z0);
  for (int round = 0; round <= ctl.refine_rounds; ++round) {
    model.set_cov_gammas(cov_gammas);
    model.set_e_gammas(cap_gammas);
    n_cov = static_cast<int>(cov_gammas.size());
    n_cap = static_cast<int>(cap_gammas.size());
    prob.n_constraints = n_cov + n_cap;
    nlp::SolveResult res = nlp::augmented_lagrangian(prob, out.z, sopt);
    out.z = res.z;

    auto cov_at = [&](double g) { return model.coverage_at(out.z, g); };
    const Extremum worst_cov = scan_extremum(cov_at, gamma_max, 0.01, true);
    auto e2_at = [&](double g) {
      const double e = model.e_at(out.z, g);
      return e * e;
    };
    const Extremum worst_cap = scan_extremum(e2_at, gamma_max, 0.02, false);

    const double cov_viol = std::max(0.0, level - worst_cov.value);
    const double cap_viol =
        std::max(0.0, worst_cap.value - spec.max_e2_bound);
    out.max_violation = std::max(cov_viol, cap_viol);
    if (out.max_violation <= kRefineTol) break;

    bool added = false;
    auto add_point = [](std::vector<double>& grid, double g) {
      if (std::any_of(grid.begin(), grid.end(),
                      [&](double x) { return std::fabs(x - g) < 1e-9; }))
        return false;
      grid.push_back(g);
      std::sort(grid.begin(), grid.end());
      return true;
    };
    if (cov_viol > kRefineTol) added |= add_point(cov_gammas, worst_cov.gamma);
    if (cap_viol > kRefineTol) added |= add_point(cap_gammas, worst_cap.gamma);
    if (!added) break;
  }

  auto e2_at = [&](double g) {
    const double e = model.e_at(out.z, g);
    return e * e;
  };
  out.min_e2 = scan_extremum(e2_at, gamma_max, 0.02, true).value;
  return out;
}

} // namespace

MinR2Result constrained_optimize_min_r2(double rho_tilde,
                                        const ComparisonSpec& spec) {
  spec.validate();
  if (!(rho_tilde > kInvSqrt2 && rho_tilde < 1.0))
    throw std::domain_error(
        "constrained_optimize_min_r2: rho_tilde must lie in (1/sqrt(2), 1)");

  const auto& tmpl = spec.opt_template;
  optimize::PerfModel model(tmpl.knots, spec.alpha, rho_tilde, tmpl.quad);
  const double gamma_max =
      tmpl.quad.gamma_max > 0.0 ? tmpl.quad.gamma_max : tmpl.knots.d() + 4.0;

  const std::vector<double> cap_grid =
      perf::QuadratureSpec::uniform_gamma_grid(gamma_max, 0.05);

  std::optional<InstanceOutcome> best;
  double best_viol = std::numeric_limits<double>::infinity();
  for (int start = 0; start < tmpl.controls.multistarts; ++start) {
    std::vector<double> z0 = model.standard_start();
    if (start > 0) {
      RandomStream rng(tmpl.controls.seed, 1000 + start);
      for (int k = 0; k < model.nb(); ++k)
        z0[k] += 0.4 * (rng.uniform01() - 0.5);
      for (int k = 0; k < model.ns(); ++k)
        z0[model.nb() + k] =
            std::max(0.0, z0[model.nb() + k] + 0.4 * (rng.uniform01() - 0.5));
    }
    InstanceOutcome inst = solve_min_r2_instance(
        model, spec, tmpl.quad.gamma_grid, cap_grid, std::move(z0), gamma_max);
    best_viol = std::min(best_viol, inst.max_violation);
    if (inst.max_violation > kRefineTol) continue;
    if (!best || inst.min_e2 < best->min_e2) best = std::move(inst);
  }
  if (!best)
    throw optimize::OptimizationError(
        "constrained_optimize_min_r2: no feasible iterate (best violation " +
            std::to_string(best_viol) + ")",
        {}, best_viol);

  MinR2Result result{model.make_functions(best->z)};

  // independent audit via the public quadrature path
  perf::QuadratureSpec audit = tmpl.quad;
  audit.gamma_grid = perf::QuadratureSpec::uniform_gamma_grid(gamma_max, 0.01);
  audit.check_convergence = false;
  const perf::CurveExtremum mc =
      perf::min_coverage(result.f, rho_tilde, audit);
  result.min_coverage = mc.value;
  const perf::CurveExtremum me = perf::max_sel2(result.f, audit);
  result.max_e2 = me.value;

  auto e2_of = [&](double g) {
    const double e = perf::sel(result.f, g, audit);
    return e * e;
  };
  const Extremum mn = scan_extremum(e2_of, gamma_max, 0.02, true);
  result.min_r2 = 2.0 * mn.value;
  result.gamma_argmin = mn.gamma;
  result.feasible =
      result.min_coverage >= 1.0 - spec.alpha - 1e-4 &&
      result.max_e2 <= spec.max_e2_bound + 1e-4;
  return result;
}

std::vector<ScanRow> scan_designs(const ComparisonSpec& spec) {
  spec.validate();
  std::vector<ScanRow> rows;
  rows.reserve(spec.rho_tilde_grid.size());
  for (double rho_tilde : spec.rho_tilde_grid) {
    ScanRow row;
    row.rho_tilde = rho_tilde;
    row.variance_ratio = model::ratio_from_rho_tilde(rho_tilde);
    try {
      const MinR2Result res = constrained_optimize_min_r2(rho_tilde, spec);
      row.min_r2 = res.min_r2;
      row.max_e2 = res.max_e2;
      row.ok = res.feasible;
      row.verdict = res.min_r2 > 1.0 ? "CRD better" : "crossover competitive";
      if (!res.feasible) row.error = "feasibility audit failed";
    } catch (const std::exception& ex) {
      row.ok = false;
      row.error = ex.what();
    }
    rows.push_back(row);
  }
  return rows;
}

} // namespace crossci::compare
