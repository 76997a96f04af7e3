#ifndef CROSSCI_MC_HPP
#define CROSSCI_MC_HPP

#include <cstdint>

#include "crossci/interval.hpp"
#include "crossci/model.hpp"

namespace crossci::mc {

struct PlugInEstimates {
  double sigma_eps2_hat = 0.0;
  double sigma_s2_hat = 0.0; ///< truncated at zero
  double sigma_hat = 0.0;
  double rho_tilde_hat = 0.0;
};

/// Moment estimators from V and W: V/(M-2) estimates the error variance,
/// W/(M-2) estimates sigma_eps^2 + 2 sigma_s^2; a negative implied
/// subject variance is truncated to zero, which keeps rho_tilde_hat in
/// its domain.
PlugInEstimates plug_in_estimates(const model::SummaryStats& stats,
                                  const model::TrialDesign& design);

/// The large-sample interval with (sigma, rho_tilde) replaced by their
/// plug-in estimates. The functions f stay as optimized at the design
/// rho_tilde; they are not re-fit per dataset.
splines::Interval finite_sample_interval(const model::TrialData& data,
                                         const model::TrialDesign& design,
                                         const splines::IntervalFunctions& f);

struct FiniteSampleConfig {
  model::TrialDesign design{2, 2};
  model::TrialParams params;
  model::VarianceModel variances{1.0, 1.0};
  std::int64_t reps = 100000;
  std::uint64_t seed = 1;
  /// when set, intervals use the true sigma and rho_tilde (no plug-in)
  bool known_variance = false;
};

struct McAssessment {
  double coverage = 0.0;
  double coverage_se = 0.0;
  /// square of (mean length / standard-interval length), with a
  /// delta-method standard error
  double length_ratio2 = 0.0;
  double length_ratio2_se = 0.0;
  std::int64_t plugin_failures = 0;
  std::int64_t reps = 0;
};

/// Simulates full trials and reports empirical coverage of theta and the
/// squared mean length ratio against the known-sigma standard interval.
McAssessment mc_assess(const FiniteSampleConfig& cfg,
                       const splines::IntervalFunctions& f);
McAssessment mc_assess_serial(const FiniteSampleConfig& cfg,
                              const splines::IntervalFunctions& f);

} // namespace crossci::mc

#endif
