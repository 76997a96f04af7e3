#include "crossci/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crossci {

CubicSpline::CubicSpline(std::vector<double> x, const std::vector<double>& y,
                         SplineEnd left, double left_slope, SplineEnd right,
                         double right_slope)
    : x_(std::move(x)) {
  const int n = static_cast<int>(x_.size());
  if (n < 2 || y.size() != x_.size())
    throw std::invalid_argument("CubicSpline: need >= 2 matching points");
  for (int i = 0; i + 1 < n; ++i)
    if (!(x_[i] < x_[i + 1]))
      throw std::invalid_argument("CubicSpline: abscissae must increase");

  // Tridiagonal system for the moments m_i = S''(x_i).
  std::vector<double> dl(n, 0.0), dm(n, 0.0), du(n, 0.0), rhs(n, 0.0);
  auto h = [&](int i) { return x_[i + 1] - x_[i]; };
  auto slope = [&](int i) { return (y[i + 1] - y[i]) / h(i); };

  if (left == SplineEnd::Natural) {
    dm[0] = 1.0;
  } else {
    dm[0] = h(0) / 3.0;
    du[0] = h(0) / 6.0;
    rhs[0] = slope(0) - left_slope;
  }
  for (int i = 1; i + 1 < n; ++i) {
    dl[i] = h(i - 1) / 6.0;
    dm[i] = (h(i - 1) + h(i)) / 3.0;
    du[i] = h(i) / 6.0;
    rhs[i] = slope(i) - slope(i - 1);
  }
  if (right == SplineEnd::Natural) {
    dm[n - 1] = 1.0;
  } else {
    dl[n - 1] = h(n - 2) / 6.0;
    dm[n - 1] = h(n - 2) / 3.0;
    rhs[n - 1] = right_slope - slope(n - 2);
  }

  // Thomas algorithm.
  std::vector<double> m(n);
  for (int i = 1; i < n; ++i) {
    const double w = dl[i] / dm[i - 1];
    dm[i] -= w * du[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  m[n - 1] = rhs[n - 1] / dm[n - 1];
  for (int i = n - 2; i >= 0; --i)
    m[i] = (rhs[i] - du[i] * m[i + 1]) / dm[i];

  a_.resize(n - 1);
  b_.resize(n - 1);
  c_.resize(n - 1);
  e_.resize(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    a_[i] = y[i];
    b_[i] = slope(i) - h(i) * (2.0 * m[i] + m[i + 1]) / 6.0;
    c_[i] = 0.5 * m[i];
    e_[i] = (m[i + 1] - m[i]) / (6.0 * h(i));
  }
}

int CubicSpline::interval(double t) const {
  const int n = static_cast<int>(x_.size());
  if (!(t >= x_.front() && t <= x_.back()))
    throw std::domain_error("CubicSpline: evaluation outside knot range");
  const auto it = std::upper_bound(x_.begin(), x_.end(), t);
  int i = static_cast<int>(it - x_.begin()) - 1;
  return std::clamp(i, 0, n - 2);
}

double CubicSpline::value(double t) const {
  const int i = interval(t);
  const double u = t - x_[i];
  return a_[i] + u * (b_[i] + u * (c_[i] + u * e_[i]));
}

double CubicSpline::derivative(double t) const {
  const int i = interval(t);
  const double u = t - x_[i];
  return b_[i] + u * (2.0 * c_[i] + u * 3.0 * e_[i]);
}

} // namespace crossci
