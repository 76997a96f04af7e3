#ifndef CROSSCI_COMPARE_HPP
#define CROSSCI_COMPARE_HPP

#include <string>
#include <vector>

#include "crossci/model.hpp"
#include "crossci/optimize.hpp"

namespace crossci::compare {

/// Settings for the crossover-versus-completely-randomized comparison.
struct ComparisonSpec {
  double alpha = 0.05;
  double max_e2_bound = 1.25; ///< cap on max_gamma e^2, i.e. r^2 <= 2*bound
  std::vector<double> rho_tilde_grid = {
      0.72, 0.75, 0.80, 0.85, 0.86602540378443865, 0.90, 0.95, 0.98};
  /// knot/quadrature/control template reused per grid point (omega and
  /// rho_tilde fields are ignored).
  optimize::OptConfig opt_template;

  void validate() const;
};

/// var(A) / var of the completely-randomized estimator:
/// ((n1+n2)/4) (1/n1 + 1/n2) / (1 + ratio).
double crd_efficiency(const model::TrialDesign& design, double ratio);

/// r^2(gamma) = 2 e^2(gamma) elementwise (equal group sizes).
std::vector<double> r2_curve(const splines::IntervalFunctions& f,
                             const std::vector<double>& gammas,
                             const perf::QuadratureSpec& quad);

struct MinR2Result {
  splines::IntervalFunctions f;
  double min_r2 = 0.0;
  double gamma_argmin = 0.0;
  double max_e2 = 0.0;
  double min_coverage = 0.0;
  bool feasible = false;
};

/// Adversarial search within the capped class: minimizes min_gamma
/// r^2(gamma) subject to coverage >= 1 - alpha and max_gamma e^2 <=
/// max_e2_bound. The reported value is the smallest the search reached,
/// not a certificate.
MinR2Result constrained_optimize_min_r2(double rho_tilde,
                                        const ComparisonSpec& spec);

struct ScanRow {
  double rho_tilde = 0.0;
  double variance_ratio = 0.0;
  double min_r2 = 0.0;
  double max_e2 = 0.0;
  std::string verdict;
  bool ok = false;
  std::string error;
};

/// One constrained search per rho_tilde; failures are recorded per row
/// and the scan continues.
std::vector<ScanRow> scan_designs(const ComparisonSpec& spec);

} // namespace crossci::compare

#endif
