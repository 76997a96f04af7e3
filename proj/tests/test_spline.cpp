#include <doctest.h>

#include <cmath>
#include <vector>

#include "crossci/rng.hpp"
#include "crossci/spline.hpp"

using namespace crossci;

namespace {

// Independent oracle: solve the full dense system for the piecewise
// cubic coefficients (interpolation, C1/C2 continuity, two boundary
// rows) by Gaussian elimination. Slower and structurally different from
// the tridiagonal production path.
struct DenseSpline {
  std::vector<double> x;
  std::vector<std::array<double, 4>> coef; // a + b u + c u^2 + d u^3

  double value(double t) const {
    std::size_t i = 0;
    while (i + 2 < x.size() && t > x[i + 1]) ++i;
    const double u = t - x[i];
    const auto& p = coef[i];
    return p[0] + u * (p[1] + u * (p[2] + u * p[3]));
  }
};

DenseSpline dense_fit(const std::vector<double>& x,
                      const std::vector<double>& y, bool natural_left,
                      double left_slope, bool natural_right,
                      double right_slope) {
  const int n = static_cast<int>(x.size());
  const int pieces = n - 1;
  const int dim = 4 * pieces;
  std::vector<std::vector<double>> A(dim, std::vector<double>(dim + 1, 0.0));
  int row = 0;
  auto at = [&](int piece, int pow) { return 4 * piece + pow; };

  for (int i = 0; i < pieces; ++i) {
    const double h = x[i + 1] - x[i];
    A[row][at(i, 0)] = 1.0;
    A[row][dim] = y[i];
    ++row;
    for (int p = 0; p < 4; ++p) A[row][at(i, p)] = std::pow(h, p);
    A[row][dim] = y[i + 1];
    ++row;
  }
  for (int i = 0; i + 1 < pieces; ++i) {
    const double h = x[i + 1] - x[i];
    A[row][at(i, 1)] = 1.0;
    A[row][at(i, 2)] = 2.0 * h;
    A[row][at(i, 3)] = 3.0 * h * h;
    A[row][at(i + 1, 1)] = -1.0;
    ++row;
    A[row][at(i, 2)] = 2.0;
    A[row][at(i, 3)] = 6.0 * h;
    A[row][at(i + 1, 2)] = -2.0;
    ++row;
  }
  if (natural_left) {
    A[row][at(0, 2)] = 2.0;
  } else {
    A[row][at(0, 1)] = 1.0;
    A[row][dim] = left_slope;
  }
  ++row;
  const double hl = x[n - 1] - x[n - 2];
  if (natural_right) {
    A[row][at(pieces - 1, 2)] = 2.0;
    A[row][at(pieces - 1, 3)] = 6.0 * hl;
  } else {
    A[row][at(pieces - 1, 1)] = 1.0;
    A[row][at(pieces - 1, 2)] = 2.0 * hl;
    A[row][at(pieces - 1, 3)] = 3.0 * hl * hl;
    A[row][dim] = right_slope;
  }

  // Gaussian elimination with partial pivoting
  for (int col = 0; col < dim; ++col) {
    int piv = col;
    for (int r = col + 1; r < dim; ++r)
      if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
    std::swap(A[col], A[piv]);
    for (int r = 0; r < dim; ++r) {
      if (r == col || A[r][col] == 0.0) continue;
      const double f = A[r][col] / A[col][col];
      for (int c2 = col; c2 <= dim; ++c2) A[r][c2] -= f * A[col][c2];
    }
  }
  DenseSpline out;
  out.x = x;
  out.coef.resize(pieces);
  for (int i = 0; i < pieces; ++i)
    for (int p = 0; p < 4; ++p)
      out.coef[i][p] = A[at(i, p)][dim] / A[at(i, p)][at(i, p)];
  return out;
}

} // namespace

TEST_CASE("clamped spline reproduces a cubic polynomial") {
  auto p = [](double t) { return 0.3 * t * t * t - 1.2 * t * t + t - 2.0; };
  auto dp = [](double t) { return 0.9 * t * t - 2.4 * t + 1.0; };
  std::vector<double> x{-1.0, 0.0, 0.8, 2.0, 3.5};
  std::vector<double> y;
  for (double t : x) y.push_back(p(t));
  CubicSpline s(x, y, SplineEnd::Clamped, dp(x.front()), SplineEnd::Clamped,
                dp(x.back()));
  for (double t = -1.0; t <= 3.5; t += 0.07)
    CHECK(s.value(t) == doctest::Approx(p(t)).epsilon(1e-12));
}

TEST_CASE("natural spline through collinear points stays linear") {
  std::vector<double> x{0.0, 1.0, 2.5, 4.0};
  std::vector<double> y{1.0, 3.0, 6.0, 9.0};
  CubicSpline s(x, y, SplineEnd::Natural, 0.0, SplineEnd::Natural, 0.0);
  for (double t = 0.0; t <= 4.0; t += 0.13)
    CHECK(s.value(t) == doctest::Approx(1.0 + 2.0 * t).epsilon(1e-13));
}

TEST_CASE("tridiagonal solve agrees with the dense-system oracle") {
  RandomStream rng(77, 0);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 5 + trial;
    std::vector<double> x(n), y(n);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += 0.3 + rng.uniform01();
      x[i] = acc;
      y[i] = 2.0 * rng.uniform01() - 1.0;
    }
    const bool nat_l = trial % 2 == 0;
    const bool nat_r = trial % 3 == 0;
    const double sl = rng.uniform01() - 0.5;
    const double sr = rng.uniform01() - 0.5;
    CubicSpline s(x, y, nat_l ? SplineEnd::Natural : SplineEnd::Clamped, sl,
                  nat_r ? SplineEnd::Natural : SplineEnd::Clamped, sr);
    const DenseSpline ref = dense_fit(x, y, nat_l, sl, nat_r, sr);
    for (int k = 0; k <= 100; ++k) {
      const double t = x.front() + (x.back() - x.front()) * k / 100.0;
      CHECK(s.value(t) == doctest::Approx(ref.value(t)).epsilon(1e-9));
    }
  }
}

TEST_CASE("interpolation and smoothness at the knots") {
  std::vector<double> x{0.0, 0.75, 1.5, 2.25, 3.0};
  std::vector<double> y{0.1, -0.4, 0.9, 0.2, -0.3};
  CubicSpline s(x, y, SplineEnd::Natural, 0.0, SplineEnd::Clamped, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(s.value(x[i]) == doctest::Approx(y[i]).epsilon(1e-14));

  const double h = 1e-6;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    const double dl = (s.value(x[i]) - s.value(x[i] - h)) / h;
    const double dr = (s.value(x[i] + h) - s.value(x[i])) / h;
    CHECK(dl == doctest::Approx(dr).epsilon(1e-4));
    const double sl = (s.value(x[i] - 2 * h) - 2 * s.value(x[i] - h) +
                       s.value(x[i])) /
                      (h * h);
    const double sr = (s.value(x[i]) - 2 * s.value(x[i] + h) +
                       s.value(x[i] + 2 * h)) /
                      (h * h);
    CHECK(sl == doctest::Approx(sr).epsilon(2e-2));
  }
  // natural end second derivative, clamped end slope
  CHECK(std::fabs(s.value(2 * h) - 2 * s.value(h) + s.value(0.0)) / (h * h) <
        1e-2);
  CHECK(s.derivative(3.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("constructor and evaluation reject bad input") {
  CHECK_THROWS_AS(CubicSpline({0.0, 0.0, 1.0}, {0.0, 1.0, 2.0},
                              SplineEnd::Natural, 0.0, SplineEnd::Natural,
                              0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(CubicSpline({0.0}, {0.0}, SplineEnd::Natural, 0.0,
                              SplineEnd::Natural, 0.0),
                  std::invalid_argument);
  CubicSpline s({0.0, 1.0}, {0.0, 1.0}, SplineEnd::Natural, 0.0,
                SplineEnd::Natural, 0.0);
  CHECK_THROWS_AS(s.value(-0.1), std::domain_error);
  CHECK_THROWS_AS(s.value(1.1), std::domain_error);
}
