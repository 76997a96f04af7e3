#include "crossci/nlp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace crossci::nlp {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void project(const Problem& p, std::vector<double>& z) {
  for (int i = 0; i < p.dim; ++i) z[i] = std::clamp(z[i], p.lower[i], p.upper[i]);
}

// Infinity norm of the projected gradient step.
double projected_grad_norm(const Problem& p, const std::vector<double>& z,
                           const std::vector<double>& grad) {
  double nrm = 0.0;
  for (int i = 0; i < p.dim; ++i) {
    const double t = std::clamp(z[i] - grad[i], p.lower[i], p.upper[i]) - z[i];
    nrm = std::max(nrm, std::fabs(t));
  }
  return nrm;
}

struct AlEval {
  double value = 0.0;
  std::vector<double> grad;
  std::vector<double> g; // raw constraint values
};

class AlFunction {
public:
  AlFunction(const Problem& p, const std::vector<double>& lambda, double mu)
      : p_(p), lambda_(lambda), mu_(mu) {}

  AlEval operator()(const std::vector<double>& z, bool want_grad) const {
    AlEval e;
    if (want_grad) e.grad.assign(p_.dim, 0.0);
    e.value = p_.objective(z, want_grad ? &e.grad : nullptr);
    if (p_.n_constraints > 0) {
      e.g.resize(p_.n_constraints);
      p_.constraints(z, e.g);
      std::vector<double> coef(p_.n_constraints, 0.0);
      bool any = false;
      for (int j = 0; j < p_.n_constraints; ++j) {
        const double t = lambda_[j] + mu_ * e.g[j];
        if (t > 0.0) {
          coef[j] = t;
          any = true;
          e.value += (t * t - lambda_[j] * lambda_[j]) / (2.0 * mu_);
        } else {
          e.value -= lambda_[j] * lambda_[j] / (2.0 * mu_);
        }
      }
      if (want_grad && any) p_.constraints_grad(z, coef, e.grad);
    }
    return e;
  }

private:
  const Problem& p_;
  const std::vector<double>& lambda_;
  double mu_;
};

struct LbfgsOutcome {
  std::vector<double> z;
  AlEval eval;
  double pg_norm = 0.0;
  int iters = 0;
};

// Projected L-BFGS with Armijo backtracking; the memory is dropped when
// the projection bends the step or curvature turns nonpositive.
LbfgsOutcome lbfgs_minimize(const Problem& p, const AlFunction& fn,
                            std::vector<double> z, double tol, int max_iter,
                            int memory) {
  project(p, z);
  AlEval e = fn(z, true);

  std::deque<std::pair<std::vector<double>, std::vector<double>>> hist;
  std::deque<double> rho;

  LbfgsOutcome out;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    const double pg = projected_grad_norm(p, z, e.grad);
    if (pg <= tol) break;

    // two-loop recursion
    std::vector<double> dir = e.grad;
    std::vector<double> alpha(hist.size());
    for (int k = static_cast<int>(hist.size()) - 1; k >= 0; --k) {
      alpha[k] = rho[k] * dot(hist[k].first, dir);
      for (int i = 0; i < p.dim; ++i) dir[i] -= alpha[k] * hist[k].second[i];
    }
    if (!hist.empty()) {
      const auto& [s, y] = hist.back();
      const double gamma = dot(s, y) / dot(y, y);
      for (double& v : dir) v *= gamma;
    }
    for (std::size_t k = 0; k < hist.size(); ++k) {
      const double beta = rho[k] * dot(hist[k].second, dir);
      for (int i = 0; i < p.dim; ++i)
        dir[i] += (alpha[k] - beta) * hist[k].first[i];
    }
    for (double& v : dir) v = -v;

    if (dot(dir, e.grad) > -1e-14) {
      // not a descent direction; restart from steepest descent
      hist.clear();
      rho.clear();
      for (int i = 0; i < p.dim; ++i) dir[i] = -e.grad[i];
    }

    // Armijo backtracking on the projected path
    double step = 1.0;
    bool accepted = false;
    std::vector<double> zn(p.dim);
    AlEval en;
    for (int ls = 0; ls < 60; ++ls) {
      for (int i = 0; i < p.dim; ++i) zn[i] = z[i] + step * dir[i];
      project(p, zn);
      std::vector<double> dz(p.dim);
      double gdz = 0.0, dz_norm = 0.0;
      for (int i = 0; i < p.dim; ++i) {
        dz[i] = zn[i] - z[i];
        gdz += e.grad[i] * dz[i];
        dz_norm = std::max(dz_norm, std::fabs(dz[i]));
      }
      if (dz_norm == 0.0) break;
      en = fn(zn, true);
      if (en.value <= e.value + 1e-4 * gdz && gdz < 0.0) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!hist.empty()) {
        hist.clear();
        rho.clear();
        continue; // retry as steepest descent
      }
      break; // no progress possible at this scale
    }

    std::vector<double> s(p.dim), y(p.dim);
    for (int i = 0; i < p.dim; ++i) {
      s[i] = zn[i] - z[i];
      y[i] = en.grad[i] - e.grad[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-14) {
      hist.emplace_back(std::move(s), std::move(y));
      rho.push_back(1.0 / sy);
      if (static_cast<int>(hist.size()) > memory) {
        hist.pop_front();
        rho.pop_front();
      }
    }
    z = zn;
    e = std::move(en);
  }

  out.z = std::move(z);
  out.pg_norm = projected_grad_norm(p, out.z, e.grad);
  out.eval = std::move(e);
  out.iters = iter;
  return out;
}

} // namespace

SolveResult augmented_lagrangian(const Problem& p, std::vector<double> z0,
                                 const SolveOptions& opt) {
  if (static_cast<int>(z0.size()) != p.dim ||
      static_cast<int>(p.lower.size()) != p.dim ||
      static_cast<int>(p.upper.size()) != p.dim)
    throw std::invalid_argument("augmented_lagrangian: dimension mismatch");

  std::vector<double> lambda(p.n_constraints, 0.0);
  double mu = opt.initial_mu;
  double prev_viol = std::numeric_limits<double>::infinity();

  SolveResult res;
  res.z = std::move(z0);

  for (int outer = 0; outer < opt.max_outer; ++outer) {
    // inner tolerance tightens as the multipliers settle
    const double inner_tol =
        std::max(opt.grad_tol, 1e-4 * std::pow(0.25, outer));
    AlFunction fn(p, lambda, mu);
    LbfgsOutcome inner =
        lbfgs_minimize(p, fn, std::move(res.z), inner_tol, opt.max_inner,
                       opt.lbfgs_memory);
    res.z = std::move(inner.z);
    res.inner_iters += inner.iters;
    res.outer_iters = outer + 1;

    double viol = 0.0;
    if (p.n_constraints > 0) {
      for (int j = 0; j < p.n_constraints; ++j) {
        viol = std::max(viol, inner.eval.g[j]);
        lambda[j] = std::max(0.0, lambda[j] + mu * inner.eval.g[j]);
      }
      viol = std::max(viol, 0.0);
    }
    res.max_violation = viol;
    res.objective = p.objective(res.z, nullptr);

    if (viol <= opt.constraint_target && inner.pg_norm <= 10 * opt.grad_tol) {
      res.converged = true;
      break;
    }
    if (viol > 0.25 * prev_viol) mu = std::min(mu * opt.mu_growth, opt.max_mu);
    prev_viol = std::max(viol, 1e-300);
  }
  res.multipliers = std::move(lambda);
  return res;
}

} // namespace crossci::nlp
