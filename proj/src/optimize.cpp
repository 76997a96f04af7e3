#include "crossci/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "crossci/nlp.hpp"
#include "crossci/normal.hpp"
#include "crossci/perf_model.hpp"
#include "crossci/rng.hpp"

namespace crossci::optimize {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Coverage audited between constraint points must stay within this of
// the nominal level before a candidate is accepted.
constexpr double kRefineTol = 2e-6;

double golden_min(double a, double b, const std::function<double(double)>& fn,
                  double* arg) {
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
  if (arg) *arg = mid;
  return fn(mid);
}

} // namespace

void OptConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("OptConfig: alpha must lie in (0, 1)");
  if (!(rho_tilde > kInvSqrt2 && rho_tilde < 1.0))
    throw std::invalid_argument(
        "OptConfig: rho_tilde must lie in (1/sqrt(2), 1)");
  if (!(omega >= 0.0))
    throw std::invalid_argument("OptConfig: omega must be >= 0");
  quad.validate();
  if (controls.multistarts < 1)
    throw std::invalid_argument("OptConfig: need at least one start");
}

namespace detail {

// Scans fn on [0, gamma_max] with the given step, golden-refining every
// local minimum; returns the global minimum and its location.
perf::CurveExtremum fine_minimum(const std::function<double(double)>& fn,
                                 double gamma_max, double step) {
  const int n = static_cast<int>(std::ceil(gamma_max / step)) + 1;
  std::vector<double> g(n), v(n);
  for (int i = 0; i < n; ++i) {
    g[i] = std::min(i * step, gamma_max);
    v[i] = fn(g[i]);
  }
  perf::CurveExtremum best{g[0], v[0]};
  for (int i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || v[i] <= v[i - 1];
    const bool right_ok = i == n - 1 || v[i] <= v[i + 1];
    if (!(left_ok && right_ok)) continue;
    double arg = g[i];
    const double a = g[std::max(0, i - 1)];
    const double b = g[std::min(n - 1, i + 1)];
    const double val = a < b ? golden_min(a, b, fn, &arg) : v[i];
    if (val < best.value) best = {arg, val};
  }
  return best;
}

// One multistart instance: augmented-Lagrangian solve plus rounds that
// add the true (refined) binding gammas to the constraint grid.
struct InstanceResult {
  std::vector<double> z;
  double criterion = 0.0;
  double max_violation = 0.0;
  bool converged = false;
};

InstanceResult solve_instance(PerfModel& model,
                              std::vector<double> constraint_gammas,
                              const std::vector<double>& w_s, double w0,
                              std::vector<double> z0, const OptControls& ctl,
                              double gamma_max) {
  const int nb = model.nb();
  const int ns = model.ns();
  const double c = model.c_alpha();
  const double level = 1.0 - model.alpha();

  nlp::Problem prob;
  prob.dim = nb + ns;
  prob.lower.assign(prob.dim, -3.0 * c);
  prob.upper.assign(prob.dim, 3.0 * c);
  for (int k = 0; k < ns; ++k) prob.lower[nb + k] = 0.0;
  prob.objective = [&](const std::vector<double>& z,
                       std::vector<double>* grad) {
    double v = w0;
    for (int k = 0; k < ns; ++k) v += w_s[k] * z[nb + k];
    if (grad) {
      std::fill(grad->begin(), grad->end(), 0.0);
      for (int k = 0; k < ns; ++k) (*grad)[nb + k] = w_s[k];
    }
    return v;
  };
  std::vector<double> cov;
  prob.constraints = [&](const std::vector<double>& z,
                         std::vector<double>& g) {
    model.coverage_all(z, cov);
    for (std::size_t j = 0; j < cov.size(); ++j) g[j] = level - cov[j];
  };
  prob.constraints_grad = [&](const std::vector<double>& z,
                              const std::vector<double>& coef,
                              std::vector<double>& grad) {
    // g = level - coverage, so the accumulated coefficients flip sign
    std::vector<double> neg(coef.size());
    for (std::size_t j = 0; j < coef.size(); ++j) neg[j] = -coef[j];
    model.coverage_grad_accum(z, neg, grad);
  };

  nlp::SolveOptions sopt;
  sopt.max_outer = ctl.max_outer;
  sopt.max_inner = ctl.max_inner;
  sopt.constraint_target = 1e-8;
  sopt.grad_tol = 1e-10;

  InstanceResult out;
  out.z = std::move(z0);
  for (int round = 0; round <= ctl.refine_rounds; ++round) {
    model.set_cov_gammas(constraint_gammas);
    prob.n_constraints = static_cast<int>(constraint_gammas.size());
    nlp::SolveResult res = nlp::augmented_lagrangian(prob, out.z, sopt);
    out.z = res.z;
    out.criterion = res.objective;
    out.converged = res.converged;

    // audit between constraint points; add the refined binding gamma
    auto cov_at = [&](double gamma) { return model.coverage_at(out.z, gamma); };
    const perf::CurveExtremum worst = fine_minimum(cov_at, gamma_max, 0.01);
    out.max_violation = std::max(0.0, level - worst.value);
    if (out.max_violation <= kRefineTol) break;
    const bool known =
        std::any_of(constraint_gammas.begin(), constraint_gammas.end(),
                    [&](double g) { return std::fabs(g - worst.gamma) < 1e-9; });
    if (known) break; // already constrained; solver cannot do better
    constraint_gammas.push_back(worst.gamma);
    std::sort(constraint_gammas.begin(), constraint_gammas.end());
  }
  return out;
}

} // namespace detail

OptResult optimize_interval(const OptConfig& cfg) {
  cfg.validate();

  PerfModel model(cfg.knots, cfg.alpha, cfg.rho_tilde, cfg.quad);
  std::vector<double> w_s;
  double w0;
  model.criterion_coeffs(cfg.omega, w_s, w0);

  const double gamma_max =
      cfg.quad.gamma_max > 0.0 ? cfg.quad.gamma_max : cfg.knots.d() + 4.0;

  struct Candidate {
    detail::InstanceResult inst;
    int start = 0;
    double loss = 0.0;
  };
  std::optional<Candidate> best;
  detail::InstanceResult best_infeasible;
  double best_infeasible_viol = std::numeric_limits<double>::infinity();

  for (int start = 0; start < cfg.controls.multistarts; ++start) {
    std::vector<double> z0 = model.standard_start();
    if (start > 0) {
      RandomStream rng(cfg.controls.seed, static_cast<std::uint64_t>(start));
      for (int k = 0; k < model.nb(); ++k)
        z0[k] += 0.4 * (rng.uniform01() - 0.5);
      for (int k = 0; k < model.ns(); ++k)
        z0[model.nb() + k] =
            std::max(0.0, z0[model.nb() + k] + 0.4 * (rng.uniform01() - 0.5));
    }
    detail::InstanceResult inst = detail::solve_instance(
        model, cfg.quad.gamma_grid, w_s, w0, std::move(z0), cfg.controls,
        gamma_max);

    if (inst.max_violation > kRefineTol) {
      if (inst.max_violation < best_infeasible_viol) {
        best_infeasible_viol = inst.max_violation;
        best_infeasible = inst;
      }
      continue;
    }
    // tie-break: criterion, then smaller maximum loss
    auto e2_max = [&](const std::vector<double>& z) {
      auto neg = [&](double g) {
        const double e = model.e_at(z, g);
        return -e * e;
      };
      return -detail::fine_minimum(neg, gamma_max, 0.05).value;
    };
    Candidate cand{inst, start, e2_max(inst.z)};
    if (!best || cand.inst.criterion < best->inst.criterion - 1e-8 ||
        (std::fabs(cand.inst.criterion - best->inst.criterion) <= 1e-8 &&
         cand.loss < best->loss))
      best = std::move(cand);
  }

  if (!best)
    throw OptimizationError(
        "optimize_interval: no feasible iterate after all multistarts "
        "(best max constraint violation " +
            std::to_string(best_infeasible_viol) + ")",
        best_infeasible.z, best_infeasible_viol);

  OptResult result{model.make_functions(best->inst.z)};
  result.multistart_index = best->start;

  // Reported figures go through the public quadrature path, which is
  // independent of the optimizer's fixed-node tables.
  perf::QuadratureSpec audit = cfg.quad;
  audit.gamma_grid = perf::QuadratureSpec::uniform_gamma_grid(gamma_max, 0.01);
  audit.check_convergence = false;
  const perf::CurveExtremum mc = perf::min_coverage(result.f, cfg.rho_tilde,
                                                    audit);
  result.min_coverage = mc.value;
  result.gamma_argmin = mc.gamma;
  result.criterion_value =
      perf::criterion(result.f, perf::WeightSpec{cfg.omega}, audit);
  const double e0 = perf::sel(result.f, 0.0, audit);
  result.expected_gain = 1.0 - e0 * e0;
  const perf::CurveExtremum ms = perf::max_sel2(result.f, audit);
  result.max_potential_loss = ms.value - 1.0;
  result.gain_loss_ratio = result.expected_gain / result.max_potential_loss;
  result.feasible =
      std::fabs(result.min_coverage - (1.0 - cfg.alpha)) <=
      cfg.controls.constraint_tol;
  return result;
}

std::vector<OmegaRow> omega_table(const OptConfig& base,
                                  const std::vector<double>& omegas) {
  if (omegas.empty())
    throw std::invalid_argument("omega_table: need at least one omega");
  std::vector<OmegaRow> rows;
  rows.reserve(omegas.size());
  for (double omega : omegas) {
    OmegaRow row;
    row.omega = omega;
    try {
      OptConfig cfg = base;
      cfg.omega = omega;
      const OptResult res = optimize_interval(cfg);
      row.gain = res.expected_gain;
      row.loss = res.max_potential_loss;
      row.ratio = res.gain_loss_ratio;
      row.ok = res.feasible;
      if (!res.feasible) row.error = "feasibility audit failed";
    } catch (const std::exception& ex) {
      row.ok = false;
      row.error = ex.what();
    }
    rows.push_back(row);
  }
  return rows;
}

} // namespace crossci::optimize
