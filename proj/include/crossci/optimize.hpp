#ifndef CROSSCI_OPTIMIZE_HPP
#define CROSSCI_OPTIMIZE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "crossci/interval.hpp"
#include "crossci/perf.hpp"

namespace crossci::optimize {

struct OptControls {
  int multistarts = 3;
  std::uint64_t seed = 1;
  /// accepted |min coverage - (1 - alpha)| on the audit grid
  double constraint_tol = 5e-5;
  double criterion_tol = 1e-8;
  int max_outer = 40;
  int max_inner = 600;
  /// rounds of adding refined binding gammas to the constraint grid
  int refine_rounds = 5;
};

struct OptConfig {
  double alpha = 0.05;
  double rho_tilde = 0.86602540378443865; // variance ratio 1
  splines::KnotGrid knots = splines::KnotGrid::uniform(6.0, 9);
  double omega = 0.2;
  perf::QuadratureSpec quad = perf::QuadratureSpec::defaults(6.0);
  OptControls controls;

  void validate() const;
};

struct OptResult {
  splines::IntervalFunctions f;
  double criterion_value = 0.0;
  double min_coverage = 0.0;
  double gamma_argmin = 0.0;
  double expected_gain = 0.0;       // 1 - e^2(0)
  double max_potential_loss = 0.0;  // max e^2 - 1
  double gain_loss_ratio = 0.0;
  int multistart_index = 0;
  bool feasible = false;
};

/// Raised when no multistart reaches feasibility; carries the best
/// iterate and its constraint violation for diagnosis.
class OptimizationError : public std::runtime_error {
public:
  OptimizationError(const std::string& msg, std::vector<double> best_iterate,
                    double max_violation)
      : std::runtime_error(msg),
        best_iterate(std::move(best_iterate)),
        max_violation(max_violation) {}

  std::vector<double> best_iterate;
  double max_violation = 0.0;
};

/// Minimizes the length criterion over the free spline values subject to
/// coverage >= 1 - alpha for every gamma (grid plus refined binding
/// points); at any minimizer the constraint binds, which realizes the
/// required min-coverage equality.
OptResult optimize_interval(const OptConfig& cfg);

struct OmegaRow {
  double omega = 0.0;
  double gain = 0.0;
  double loss = 0.0;
  double ratio = 0.0;
  bool ok = false;
  std::string error;
};

/// One optimization per omega; failures are recorded per row and the
/// sweep continues.
std::vector<OmegaRow> omega_table(const OptConfig& base,
                                  const std::vector<double>& omegas);

} // namespace crossci::optimize

#endif
