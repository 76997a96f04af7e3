#ifndef CROSSCI_PERF_MODEL_HPP
#define CROSSCI_PERF_MODEL_HPP

#include <vector>

#include "crossci/interval.hpp"
#include "crossci/perf.hpp"

namespace crossci::optimize {

/// Quadrature view of coverage and scaled length as functions of the
/// free vector z = (b_free, s_free). All spline evaluations are frozen
/// into basis matrices at fixed Gauss-Legendre nodes (panels split at
/// the spline breakpoints), so one coverage sweep is a pair of matrix
/// products plus normal-CDF calls, and gradients are exact.
class PerfModel {
public:
  PerfModel(const splines::KnotGrid& knots, double alpha, double rho_tilde,
            const perf::QuadratureSpec& quad);

  int nb() const { return nb_; }
  int ns() const { return ns_; }
  int dim() const { return nb_ + ns_; }
  double alpha() const { return alpha_; }
  double c_alpha() const { return c_alpha_; }
  double d() const { return knots_.d(); }
  double rho_tilde() const { return rho_tilde_; }
  const splines::KnotGrid& knots() const { return knots_; }

  /// Rebuilds the per-gamma coverage tables.
  void set_cov_gammas(std::vector<double> gammas);
  const std::vector<double>& cov_gammas() const { return cov_gammas_; }

  /// cov[j] = coverage at cov_gammas()[j]; parallel over j.
  void coverage_all(const std::vector<double>& z,
                    std::vector<double>& cov) const;
  /// grad += sum_j coef[j] * d coverage_j / dz (entries with coef = 0 are
  /// skipped).
  void coverage_grad_accum(const std::vector<double>& z,
                           const std::vector<double>& coef,
                           std::vector<double>& grad) const;
  /// Coverage at an arbitrary gamma, same node set (used to refine the
  /// constraint grid between its points).
  double coverage_at(const std::vector<double>& z, double gamma) const;

  /// Rebuilds the scaled-length tables (rows of e(gamma) over z_s).
  void set_e_gammas(std::vector<double> gammas);
  const std::vector<double>& e_gammas() const { return e_gammas_; }
  void e_all(const std::vector<double>& z, std::vector<double>& e) const;
  double e_at(const std::vector<double>& z, double gamma) const;
  /// e(gamma) = row . z_s + offset; row has ns() entries.
  void e_row(double gamma, std::vector<double>& row, double& offset) const;

  /// Linear form of the criterion: value = w_s . z_s + w0.
  void criterion_coeffs(double omega, std::vector<double>& w_s,
                        double& w0) const;

  splines::IntervalFunctions make_functions(const std::vector<double>& z) const;
  std::vector<double> standard_start() const;

private:
  splines::KnotGrid knots_;
  double alpha_, c_alpha_, rho_tilde_, tau_;
  int nb_, ns_;

  // node tables over [-d, d]
  std::vector<double> h_, w_;
  std::vector<double> B_, S_;   // row-major [node][basis]
  std::vector<double> s_fix_;   // pinned-end contribution at each node
  // half-range tables over [0, d] for the criterion
  std::vector<double> hh_, hw_;
  std::vector<double> Sh_;
  std::vector<double> sh_fix_;

  std::vector<double> cov_gammas_;
  std::vector<double> pw_;  // [gamma][node] phi(h - gamma) * w
  std::vector<double> kd_;  // standard-interval term per gamma

  std::vector<double> e_gammas_;
  std::vector<double> e_rows_;    // [gamma][ns]
  std::vector<double> e_offset_;  // [gamma]
};

} // namespace crossci::optimize

#endif
