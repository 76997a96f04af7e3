#ifndef CROSSCI_PERF_HPP
#define CROSSCI_PERF_HPP

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "crossci/interval.hpp"

namespace crossci::perf {

/// Weight d(nu) = omega dx + point mass at 0.
struct WeightSpec {
  double omega = 0.2;
};

/// Composite Gauss-Legendre controls plus the gamma grid used when
/// searching for the coverage minimum.
struct QuadratureSpec {
  int panels = 64;          ///< panels across [-d, d]
  int nodes_per_panel = 10; ///< Gauss-Legendre order per panel
  std::vector<double> gamma_grid; ///< increasing, starts at 0
  double gamma_max = 0.0;         ///< largest gamma probed
  /// When set, every integral is recomputed with doubled panels and a
  /// disagreement above 1e-8 raises QuadratureError.
  bool check_convergence = true;

  void validate() const;
  static std::vector<double> uniform_gamma_grid(double gamma_max, double step);
  /// Default controls for truncation point d: 64x10 quadrature and a
  /// 0.05-step grid on [0, d+4].
  static QuadratureSpec defaults(double d);
};

struct PerfCurve {
  std::vector<double> gammas;
  std::vector<double> coverage;
  std::vector<double> sel2;
};

class QuadratureError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// P(x <= Z <= y) for Z ~ N(mu, v), clamped to [0, 1].
double lambda_prob(double x, double y, double mu, double v);

/// Coverage probability c(gamma; b, s, rho_tilde) by quadrature.
double coverage(const splines::IntervalFunctions& f, double rho_tilde,
                double gamma, const QuadratureSpec& quad);

/// Scaled expected length e(gamma; s).
double sel(const splines::IntervalFunctions& f, double gamma,
           const QuadratureSpec& quad);

/// The optimization criterion: (2/c_alpha) * integral over [0, d] of
/// (s(h) - c_alpha) (omega + phi(h)) dh.
double criterion(const splines::IntervalFunctions& f, const WeightSpec& w,
                 const QuadratureSpec& quad);

/// Same integral for an arbitrary integrand s; seam for closed-form
/// checks against constant functions.
double criterion_integral(double d, double c_alpha, double omega,
                          const std::function<double(double)>& s_of,
                          const QuadratureSpec& quad);

/// coverage and sel^2 over a gamma grid. The parallel version splits the
/// grid across threads; outputs are identical to the serial one.
PerfCurve perf_curve(const splines::IntervalFunctions& f, double rho_tilde,
                     const std::vector<double>& gammas,
                     const QuadratureSpec& quad);
PerfCurve perf_curve_serial(const splines::IntervalFunctions& f,
                            double rho_tilde,
                            const std::vector<double>& gammas,
                            const QuadratureSpec& quad);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of the coverage probability from draws of the
/// standardized pair (G, H); the check that quadrature and simulation
/// agree exercises the whole distributional reduction.
McEstimate mc_coverage(const splines::IntervalFunctions& f, double rho_tilde,
                       double gamma, std::int64_t reps, std::uint64_t seed);
McEstimate mc_coverage_serial(const splines::IntervalFunctions& f,
                              double rho_tilde, double gamma,
                              std::int64_t reps, std::uint64_t seed);

struct CurveExtremum {
  double gamma = 0.0;
  double value = 0.0;
};

/// Minimum of coverage over gamma >= 0: coarse pass over quad.gamma_grid,
/// then golden-section refinement (1e-6 in gamma) around every local
/// minimum.
CurveExtremum min_coverage(const splines::IntervalFunctions& f,
                           double rho_tilde, const QuadratureSpec& quad);

/// Maximum of e^2 over gamma >= 0, same search strategy.
CurveExtremum max_sel2(const splines::IntervalFunctions& f,
                       const QuadratureSpec& quad);

} // namespace crossci::perf

#endif
