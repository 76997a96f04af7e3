#ifndef CROSSCI_NLP_HPP
#define CROSSCI_NLP_HPP

#include <functional>
#include <vector>

namespace crossci::nlp {

/// Box-constrained NLP with smooth inequality constraints g_j(z) <= 0.
struct Problem {
  int dim = 0;
  std::vector<double> lower, upper;
  /// Returns the objective; fills *grad (size dim) when non-null.
  std::function<double(const std::vector<double>& z, std::vector<double>* grad)>
      objective;
  int n_constraints = 0;
  /// Fills g (size n_constraints).
  std::function<void(const std::vector<double>& z, std::vector<double>& g)>
      constraints;
  /// grad += sum_j coef[j] * dg_j/dz. Only strictly positive coefficients
  /// are passed, so implementations may skip zero entries.
  std::function<void(const std::vector<double>& z,
                     const std::vector<double>& coef,
                     std::vector<double>& grad)>
      constraints_grad;
};

struct SolveOptions {
  double initial_mu = 10.0;
  double mu_growth = 8.0;
  double max_mu = 1e10;
  int max_outer = 40;
  int max_inner = 600;
  int lbfgs_memory = 8;
  double constraint_target = 1e-8; ///< accepted max violation
  double grad_tol = 1e-10;         ///< projected-gradient norm at the end
};

struct SolveResult {
  std::vector<double> z;
  double objective = 0.0;
  double max_violation = 0.0;
  std::vector<double> multipliers;
  bool converged = false;
  int outer_iters = 0;
  int inner_iters = 0;
};

/// Classic augmented Lagrangian for inequalities: the penalty term is
/// (1/2mu) * sum_j (max(0, lambda_j + mu g_j)^2 - lambda_j^2), minimized
/// per outer step with a projected L-BFGS, then lambda <- max(0, lambda +
/// mu g) and mu grows whenever the violation stalls.
SolveResult augmented_lagrangian(const Problem& p, std::vector<double> z0,
                                 const SolveOptions& opt);

} // namespace crossci::nlp

#endif
