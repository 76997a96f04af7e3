#ifndef CROSSCI_INTERVAL_HPP
#define CROSSCI_INTERVAL_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "crossci/spline.hpp"

namespace crossci::splines {

/// Strictly increasing knots 0 = x_1 < ... < x_q = d.
struct KnotGrid {
  std::vector<double> x;

  static KnotGrid uniform(double d, int q);
  static KnotGrid from_points(std::vector<double> points);

  int q() const { return static_cast<int>(x.size()); }
  double d() const { return x.back(); }
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  double length() const { return upper - lower; }
  bool contains(double t) const { return lower <= t && t <= upper; }
};

/// The pair (b, s) defining the confidence interval, under the
/// restrictions: b odd and continuous with b = 0 off [-d, d] and
/// b'(+-d) = 0; s continuous, nonnegative, equal to the critical value
/// c_alpha for arguments beyond d.
///
/// b interpolates (0, b(x_2), ..., b(x_{q-1}), 0) on [0, d] with a free
/// (odd-symmetric) end at 0 and a clamped zero slope at d, and is
/// evaluated as sign(x) * spline(|x|) so oddness holds exactly. s is the
/// natural spline through (s(x_1), ..., s(x_{q-1}), c_alpha).
class IntervalFunctions {
public:
  IntervalFunctions(KnotGrid knots, std::vector<double> b_free,
                    std::vector<double> s_free, double alpha);

  /// The pair representing the standard interval: b = 0, s = c_alpha.
  static IntervalFunctions standard(KnotGrid knots, double alpha);

  double eval_b(double x) const;
  double eval_s(double x) const; // x >= 0
  std::pair<double, double> ell_u(double h) const;

  double d() const { return knots_.d(); }
  double alpha() const { return alpha_; }
  double c_alpha() const { return c_alpha_; }
  const KnotGrid& knots() const { return knots_; }
  const std::vector<double>& b_free() const { return b_free_; }
  const std::vector<double>& s_free() const { return s_free_; }

  /// Flat text document (JSON) with every number at 17 significant
  /// digits so a round trip is bit exact.
  std::string serialize() const;
  static IntervalFunctions deserialize(const std::string& text);
  void save(const std::string& path) const;
  static IntervalFunctions load(const std::string& path);

private:
  KnotGrid knots_;
  std::vector<double> b_free_, s_free_;
  double alpha_, c_alpha_;
  CubicSpline b_spline_, s_spline_;
};

/// J(b, s) evaluated at the observed statistics.
Interval construct_interval(const IntervalFunctions& f, double theta_hat,
                            double psi_hat, double sigma, double m,
                            double rho_tilde);

/// Cardinal-basis view of (b, s): both are linear in their free knot
/// values, so an evaluation at x is a dot product against these rows.
/// Used to precompute quadrature-node matrices in the optimizer.
class IntervalBasis {
public:
  IntervalBasis(const KnotGrid& knots, double c_alpha);

  int nb() const { return static_cast<int>(b_basis_.size()); }
  int ns() const { return static_cast<int>(s_basis_.size()); }
  double d() const { return d_; }

  /// out[i] = d eval_b(h) / d b_free[i]
  void b_row(double h, double* out) const;
  /// out[i] = d eval_s(|x|) / d s_free[i]; returns the constant part
  /// contributed by the pinned value s(d) = c_alpha.
  double s_row(double x, double* out) const;

private:
  double d_, c_alpha_;
  std::vector<CubicSpline> b_basis_, s_basis_;
  std::vector<CubicSpline> s_fixed_; // single spline for the pinned end
};

} // namespace crossci::splines

#endif
