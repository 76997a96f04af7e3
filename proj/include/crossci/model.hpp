#ifndef CROSSCI_MODEL_HPP
#define CROSSCI_MODEL_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace crossci::model {

/// Group sizes of a two-period crossover trial. Group 1 receives the
/// treatments in order (A, B), group 2 in order (B, A).
struct TrialDesign {
  int n1 = 0;
  int n2 = 0;

  /// relaxed permits the degenerate n_i = 1 case used by some unit
  /// tests; the variance statistics V and W carry no information there.
  TrialDesign(int n1, int n2, bool relaxed = false);

  double m() const { return 1.0 / n1 + 1.0 / n2; }
  int total() const { return n1 + n2; }
};

/// Known variance components and the quantities derived from them.
struct VarianceModel {
  double sigma_s2 = 0.0;  ///< between-subject variance
  double sigma_eps2 = 0.0; ///< error variance

  VarianceModel(double sigma_s2, double sigma_eps2);

  double sigma2() const { return sigma_eps2 + sigma_s2; }
  double sigma() const;
  double rho() const { return sigma_s2 / sigma2(); }
  double rho_tilde() const;
};

/// Fixed effects of the crossover model. theta and psi are derived.
struct TrialParams {
  double mu = 0.0;
  std::array<double, 2> pi{0.0, 0.0};     ///< period effects
  std::array<double, 2> phi{0.0, 0.0};    ///< treatment effects (A, B)
  std::array<double, 2> lambda{0.0, 0.0}; ///< residual effects (A, B)

  double theta() const { return phi[0] - phi[1]; }
  double psi() const { return 0.5 * (lambda[0] - lambda[1]); }

  /// Convenience: parameters realizing given (theta, psi) with all other
  /// effects zero.
  static TrialParams from_theta_psi(double theta, double psi);
};

/// Raw responses; y[group][subject] = {period-1, period-2}.
struct TrialData {
  std::vector<std::vector<std::array<double, 2>>> y{2};

  int group_size(int group) const {
    return static_cast<int>(y[group].size());
  }
};

/// The sufficient statistics the whole analysis runs on.
struct SummaryStats {
  double a = 0.0;         ///< A
  double psi_hat = 0.0;   ///< estimator of the differential carryover
  double v = 0.0;         ///< within-subject difference sum of squares
  double w = 0.0;         ///< within-subject sum sum of squares
  double theta_hat = 0.0; ///< A + psi_hat, equals the period-1 group contrast
};

/// Standardized reduction of the summary statistics.
struct StandardizedState {
  double gamma = 0.0;
  double g = 0.0;
  double h = 0.0;
};

/// rho_tilde as a function of the variance ratio sigma_s^2 / sigma_eps^2.
double rho_tilde_from_ratio(double ratio);

/// Inverse of rho_tilde_from_ratio on [1/sqrt(2), 1).
double ratio_from_rho_tilde(double rho_tilde);

/// Group means, contrasts and the V/W sums of squares.
/// Requires n_i >= 2 unless relaxed.
SummaryStats summary_stats(const TrialData& data, bool relaxed = false);

/// Draws one trial from the crossover model. Reproducible: the same
/// (params, design, variances, seed, stream) give identical data.
TrialData simulate_trial(const TrialParams& params, const TrialDesign& design,
                         const VarianceModel& variances, std::uint64_t seed,
                         std::uint64_t stream = 0);

/// Standardized (gamma, G, H) for known parameter values.
StandardizedState standardize(const SummaryStats& stats, double theta,
                              double psi, double sigma, double m,
                              double rho_tilde);

/// CSV round trip: columns group,subject,period,response.
void write_csv(const TrialData& data, std::ostream& os);
TrialData read_csv(std::istream& is);
void save_csv(const TrialData& data, const std::string& path);
TrialData load_csv(const std::string& path);

} // namespace crossci::model

#endif
