#ifndef CROSSCI_SPLINE_HPP
#define CROSSCI_SPLINE_HPP

#include <vector>

namespace crossci {

/// Boundary condition at one end of a cubic spline.
enum class SplineEnd {
  Natural, ///< second derivative zero
  Clamped, ///< first derivative prescribed
};

/// Interpolating cubic spline on strictly increasing abscissae.
/// Per-interval coefficients are solved once (tridiagonal system on the
/// second-derivative moments) and cached; evaluation is a binary search
/// plus a Horner step.
class CubicSpline {
public:
  CubicSpline(std::vector<double> x, const std::vector<double>& y,
              SplineEnd left, double left_slope, SplineEnd right,
              double right_slope);

  /// Value at t; t must lie within [x.front(), x.back()].
  double value(double t) const;

  /// First derivative at t.
  double derivative(double t) const;

  const std::vector<double>& abscissae() const { return x_; }

private:
  int interval(double t) const;

  std::vector<double> x_;
  // S(t) = a + b*u + c*u^2 + e*u^3 with u = t - x_[i] on [x_[i], x_[i+1]]
  std::vector<double> a_, b_, c_, e_;
};

} // namespace crossci

#endif
