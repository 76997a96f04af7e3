#include "crossci/interval.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "crossci/normal.hpp"

namespace crossci::splines {

KnotGrid KnotGrid::uniform(double d, int q) {
  if (!(d > 0.0) || q < 3)
    throw std::invalid_argument("KnotGrid: need d > 0 and q >= 3");
  std::vector<double> x(q);
  for (int i = 0; i < q; ++i) x[i] = d * i / (q - 1);
  x.front() = 0.0;
  x.back() = d;
  return KnotGrid{std::move(x)};
}

KnotGrid KnotGrid::from_points(std::vector<double> points) {
  if (points.size() < 3)
    throw std::invalid_argument("KnotGrid: need at least 3 knots");
  if (points.front() != 0.0)
    throw std::invalid_argument("KnotGrid: first knot must be 0");
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    if (!(points[i] < points[i + 1]))
      throw std::invalid_argument("KnotGrid: knots must strictly increase");
  if (!(points.back() > 0.0) || !std::isfinite(points.back()))
    throw std::invalid_argument("KnotGrid: last knot must be positive finite");
  return KnotGrid{std::move(points)};
}

namespace {

std::vector<double> b_knot_values(const KnotGrid& k,
                                  const std::vector<double>& b_free) {
  if (static_cast<int>(b_free.size()) != k.q() - 2)
    throw std::invalid_argument("IntervalFunctions: b_free needs q-2 values");
  std::vector<double> vals(k.q(), 0.0);
  for (int i = 0; i < k.q() - 2; ++i) vals[i + 1] = b_free[i];
  return vals;
}

std::vector<double> s_knot_values(const KnotGrid& k,
                                  const std::vector<double>& s_free,
                                  double c_alpha) {
  if (static_cast<int>(s_free.size()) != k.q() - 1)
    throw std::invalid_argument("IntervalFunctions: s_free needs q-1 values");
  std::vector<double> vals(k.q());
  for (int i = 0; i < k.q() - 1; ++i) vals[i] = s_free[i];
  vals.back() = c_alpha;
  return vals;
}

// b restricted to [0, d]: the odd extension forces a zero second
// derivative at 0, and the flat tail forces a clamped zero slope at d.
CubicSpline make_b_spline(const KnotGrid& k, const std::vector<double>& b_free) {
  return CubicSpline(k.x, b_knot_values(k, b_free), SplineEnd::Natural, 0.0,
                     SplineEnd::Clamped, 0.0);
}

CubicSpline make_s_spline(const KnotGrid& k, const std::vector<double>& s_free,
                          double c_alpha) {
  return CubicSpline(k.x, s_knot_values(k, s_free, c_alpha),
                     SplineEnd::Natural, 0.0, SplineEnd::Natural, 0.0);
}

} // namespace

IntervalFunctions::IntervalFunctions(KnotGrid knots,
                                     std::vector<double> b_free,
                                     std::vector<double> s_free, double alpha)
    : knots_(std::move(knots)),
      b_free_(std::move(b_free)),
      s_free_(std::move(s_free)),
      alpha_(alpha),
      c_alpha_(critical_value(alpha)),
      b_spline_(make_b_spline(knots_, b_free_)),
      s_spline_(make_s_spline(knots_, s_free_, c_alpha_)) {
  for (double v : b_free_)
    if (!std::isfinite(v))
      throw std::invalid_argument("IntervalFunctions: non-finite b value");
  for (double v : s_free_)
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument(
          "IntervalFunctions: s knot values must be finite and >= 0");
}

IntervalFunctions IntervalFunctions::standard(KnotGrid knots, double alpha) {
  const double c = critical_value(alpha);
  const int q = knots.q();
  return IntervalFunctions(std::move(knots), std::vector<double>(q - 2, 0.0),
                           std::vector<double>(q - 1, c), alpha);
}

double IntervalFunctions::eval_b(double x) const {
  if (!std::isfinite(x)) throw std::domain_error("eval_b: non-finite x");
  const double ax = std::fabs(x);
  if (ax >= d()) return 0.0;
  const double v = b_spline_.value(ax);
  return x < 0.0 ? -v : v;
}

double IntervalFunctions::eval_s(double x) const {
  if (!std::isfinite(x) || x < 0.0)
    throw std::domain_error("eval_s: x must be finite and >= 0");
  if (x > d()) return c_alpha_;
  return s_spline_.value(x);
}

std::pair<double, double> IntervalFunctions::ell_u(double h) const {
  const double b = eval_b(h);
  const double s = eval_s(std::fabs(h));
  return {b - s, b + s};
}

namespace {

void append_number(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void append_array(std::string& out, const std::vector<double>& vals) {
  out += '[';
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i) out += ", ";
    append_number(out, vals[i]);
  }
  out += ']';
}

} // namespace

std::string IntervalFunctions::serialize() const {
  std::string out = "{\n  \"d\": ";
  append_number(out, d());
  out += ",\n  \"alpha\": ";
  append_number(out, alpha_);
  out += ",\n  \"knots\": ";
  append_array(out, knots_.x);
  out += ",\n  \"b_free\": ";
  append_array(out, b_free_);
  out += ",\n  \"s_free\": ";
  append_array(out, s_free_);
  out += "\n}\n";
  return out;
}

IntervalFunctions IntervalFunctions::deserialize(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("interval functions: ") + e.what());
  }
  for (const char* key : {"d", "alpha", "knots", "b_free", "s_free"})
    if (!j.contains(key))
      throw std::runtime_error(
          std::string("interval functions: missing field '") + key + "'");
  auto knots = KnotGrid::from_points(j["knots"].get<std::vector<double>>());
  const double d = j["d"].get<double>();
  if (std::fabs(d - knots.d()) > 1e-12 * std::max(1.0, std::fabs(d)))
    throw std::runtime_error("interval functions: d disagrees with last knot");
  return IntervalFunctions(std::move(knots),
                           j["b_free"].get<std::vector<double>>(),
                           j["s_free"].get<std::vector<double>>(),
                           j["alpha"].get<double>());
}

void IntervalFunctions::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << serialize();
}

IntervalFunctions IntervalFunctions::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return deserialize(ss.str());
}

Interval construct_interval(const IntervalFunctions& f, double theta_hat,
                            double psi_hat, double sigma, double m,
                            double rho_tilde) {
  if (!(sigma > 0.0) || !(m > 0.0))
    throw std::domain_error("construct_interval: sigma and m must be positive");
  constexpr double lo = 0.70710678118654752440;
  if (!(rho_tilde >= lo && rho_tilde < 1.0))
    throw std::domain_error(
        "construct_interval: rho_tilde must lie in [1/sqrt(2), 1)");
  const double scale = sigma * std::sqrt(m);
  const double h = psi_hat / (scale * rho_tilde);
  const double center = theta_hat - scale * f.eval_b(h);
  const double half = scale * f.eval_s(std::fabs(h));
  return Interval{center - half, center + half};
}

IntervalBasis::IntervalBasis(const KnotGrid& knots, double c_alpha)
    : d_(knots.d()), c_alpha_(c_alpha) {
  const int q = knots.q();
  std::vector<double> unit(q, 0.0);
  for (int i = 1; i <= q - 2; ++i) {
    unit[i] = 1.0;
    b_basis_.emplace_back(knots.x, unit, SplineEnd::Natural, 0.0,
                          SplineEnd::Clamped, 0.0);
    unit[i] = 0.0;
  }
  for (int i = 0; i <= q - 2; ++i) {
    unit[i] = 1.0;
    s_basis_.emplace_back(knots.x, unit, SplineEnd::Natural, 0.0,
                          SplineEnd::Natural, 0.0);
    unit[i] = 0.0;
  }
  unit[q - 1] = 1.0;
  s_fixed_.emplace_back(knots.x, unit, SplineEnd::Natural, 0.0,
                        SplineEnd::Natural, 0.0);
}

void IntervalBasis::b_row(double h, double* out) const {
  const double ax = std::fabs(h);
  if (ax >= d_) {
    for (int i = 0; i < nb(); ++i) out[i] = 0.0;
    return;
  }
  const double sign = h < 0.0 ? -1.0 : 1.0;
  for (int i = 0; i < nb(); ++i) out[i] = sign * b_basis_[i].value(ax);
}

double IntervalBasis::s_row(double x, double* out) const {
  const double ax = std::fabs(x);
  if (ax > d_) {
    for (int i = 0; i < ns(); ++i) out[i] = 0.0;
    return c_alpha_;
  }
  for (int i = 0; i < ns(); ++i) out[i] = s_basis_[i].value(ax);
  return c_alpha_ * s_fixed_[0].value(ax);
}

} // namespace crossci::splines
