#include "crossci/perf_model.hpp"

#include <cmath>
#include <stdexcept>

#include "crossci/normal.hpp"
#include "crossci/quadrature.hpp"

namespace crossci::optimize {

namespace {
constexpr double kPhiCutoff = 1e-18; // nodes this far into the tail are inert
}

PerfModel::PerfModel(const splines::KnotGrid& knots, double alpha,
                     double rho_tilde, const perf::QuadratureSpec& quad)
    : knots_(knots),
      alpha_(alpha),
      c_alpha_(critical_value(alpha)),
      rho_tilde_(rho_tilde),
      tau_(std::sqrt(1.0 - rho_tilde * rho_tilde)),
      nb_(knots.q() - 2),
      ns_(knots.q() - 1) {
  if (!(rho_tilde > 0.70710678118654752440 && rho_tilde < 1.0))
    throw std::domain_error("PerfModel: rho_tilde must lie in (1/sqrt(2), 1)");

  const auto rule = quadrature::gauss_legendre(quad.nodes_per_panel);
  const double d = knots_.d();

  std::vector<double> marks;
  for (double x : knots_.x) {
    marks.push_back(x);
    if (x > 0.0) marks.push_back(-x);
  }
  const auto full =
      quadrature::composite(quadrature::panel_edges(-d, d, marks, quad.panels),
                            rule);
  h_ = full.nodes;
  w_ = full.weights;

  const auto half = quadrature::composite(
      quadrature::panel_edges(0.0, d, knots_.x, std::max(8, quad.panels / 2)),
      rule);
  hh_ = half.nodes;
  hw_ = half.weights;

  const splines::IntervalBasis basis(knots_, c_alpha_);
  const int n = static_cast<int>(h_.size());
  B_.resize(static_cast<std::size_t>(n) * nb_);
  S_.resize(static_cast<std::size_t>(n) * ns_);
  s_fix_.resize(n);
  for (int i = 0; i < n; ++i) {
    basis.b_row(h_[i], &B_[static_cast<std::size_t>(i) * nb_]);
    s_fix_[i] = basis.s_row(h_[i], &S_[static_cast<std::size_t>(i) * ns_]);
  }
  const int nh = static_cast<int>(hh_.size());
  Sh_.resize(static_cast<std::size_t>(nh) * ns_);
  sh_fix_.resize(nh);
  for (int i = 0; i < nh; ++i)
    sh_fix_[i] = basis.s_row(hh_[i], &Sh_[static_cast<std::size_t>(i) * ns_]);
}

void PerfModel::set_cov_gammas(std::vector<double> gammas) {
  cov_gammas_ = std::move(gammas);
  const int J = static_cast<int>(cov_gammas_.size());
  const int n = static_cast<int>(h_.size());
  pw_.assign(static_cast<std::size_t>(J) * n, 0.0);
  kd_.assign(J, 0.0);
  for (int j = 0; j < J; ++j) {
    const double gamma = cov_gammas_[j];
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double pw = norm_pdf(h_[i] - gamma) * w_[i];
      pw_[static_cast<std::size_t>(j) * n + i] = pw;
      if (pw < kPhiCutoff) continue;
      const double mu = rho_tilde_ * (h_[i] - gamma);
      acc += pw * (norm_cdf((c_alpha_ - mu) / tau_) -
                   norm_cdf((-c_alpha_ - mu) / tau_));
    }
    kd_[j] = acc;
  }
}

void PerfModel::coverage_all(const std::vector<double>& z,
                             std::vector<double>& cov) const {
  const int J = static_cast<int>(cov_gammas_.size());
  const int n = static_cast<int>(h_.size());
  cov.resize(J);

  std::vector<double> lo(n), up(n);
  for (int i = 0; i < n; ++i) {
    double b = 0.0, s = s_fix_[i];
    const double* brow = &B_[static_cast<std::size_t>(i) * nb_];
    const double* srow = &S_[static_cast<std::size_t>(i) * ns_];
    for (int k = 0; k < nb_; ++k) b += brow[k] * z[k];
    for (int k = 0; k < ns_; ++k) s += srow[k] * z[nb_ + k];
    lo[i] = b - s;
    up[i] = b + s;
  }

#pragma omp parallel for schedule(static)
  for (int j = 0; j < J; ++j) {
    const double gamma = cov_gammas_[j];
    const double* pw = &pw_[static_cast<std::size_t>(j) * n];
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      if (pw[i] < kPhiCutoff) continue;
      const double mu = rho_tilde_ * (h_[i] - gamma);
      acc += pw[i] *
             (norm_cdf((up[i] - mu) / tau_) - norm_cdf((lo[i] - mu) / tau_));
    }
    cov[j] = 1.0 - alpha_ + acc - kd_[j];
  }
}

void PerfModel::coverage_grad_accum(const std::vector<double>& z,
                                    const std::vector<double>& coef,
                                    std::vector<double>& grad) const {
  const int J = static_cast<int>(cov_gammas_.size());
  const int n = static_cast<int>(h_.size());

  std::vector<double> lo(n), up(n);
  for (int i = 0; i < n; ++i) {
    double b = 0.0, s = s_fix_[i];
    const double* brow = &B_[static_cast<std::size_t>(i) * nb_];
    const double* srow = &S_[static_cast<std::size_t>(i) * ns_];
    for (int k = 0; k < nb_; ++k) b += brow[k] * z[k];
    for (int k = 0; k < ns_; ++k) s += srow[k] * z[nb_ + k];
    lo[i] = b - s;
    up[i] = b + s;
  }

  std::vector<int> active;
  for (int j = 0; j < J; ++j)
    if (coef[j] != 0.0) active.push_back(j);
  const int na = static_cast<int>(active.size());

  // one gradient row per active gamma, combined serially afterwards so
  // the result does not depend on the thread schedule
  std::vector<double> rows(static_cast<std::size_t>(na) * dim(), 0.0);
#pragma omp parallel for schedule(static)
  for (int a = 0; a < na; ++a) {
    const int j = active[a];
    const double gamma = cov_gammas_[j];
    const double* pw = &pw_[static_cast<std::size_t>(j) * n];
    double* row = &rows[static_cast<std::size_t>(a) * dim()];
    for (int i = 0; i < n; ++i) {
      if (pw[i] < kPhiCutoff) continue;
      const double mu = rho_tilde_ * (h_[i] - gamma);
      const double fu = norm_pdf((up[i] - mu) / tau_) / tau_;
      const double fl = norm_pdf((lo[i] - mu) / tau_) / tau_;
      const double wb = pw[i] * (fu - fl);
      const double ws = pw[i] * (fu + fl);
      const double* brow = &B_[static_cast<std::size_t>(i) * nb_];
      const double* srow = &S_[static_cast<std::size_t>(i) * ns_];
      for (int k = 0; k < nb_; ++k) row[k] += wb * brow[k];
      for (int k = 0; k < ns_; ++k) row[nb_ + k] += ws * srow[k];
    }
  }
  for (int a = 0; a < na; ++a) {
    const double c = coef[active[a]];
    const double* row = &rows[static_cast<std::size_t>(a) * dim()];
    for (int k = 0; k < dim(); ++k) grad[k] += c * row[k];
  }
}

double PerfModel::coverage_at(const std::vector<double>& z,
                              double gamma) const {
  const int n = static_cast<int>(h_.size());
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double pw = norm_pdf(h_[i] - gamma) * w_[i];
    if (pw < kPhiCutoff) continue;
    double b = 0.0, s = s_fix_[i];
    const double* brow = &B_[static_cast<std::size_t>(i) * nb_];
    const double* srow = &S_[static_cast<std::size_t>(i) * ns_];
    for (int k = 0; k < nb_; ++k) b += brow[k] * z[k];
    for (int k = 0; k < ns_; ++k) s += srow[k] * z[nb_ + k];
    const double mu = rho_tilde_ * (h_[i] - gamma);
    acc += pw * (norm_cdf((b + s - mu) / tau_) - norm_cdf((b - s - mu) / tau_) -
                 norm_cdf((c_alpha_ - mu) / tau_) +
                 norm_cdf((-c_alpha_ - mu) / tau_));
  }
  return 1.0 - alpha_ + acc;
}

void PerfModel::e_row(double gamma, std::vector<double>& row,
                      double& offset) const {
  const int n = static_cast<int>(h_.size());
  row.assign(ns_, 0.0);
  offset = 1.0;
  for (int i = 0; i < n; ++i) {
    const double pw = norm_pdf(h_[i] - gamma) * w_[i];
    if (pw < kPhiCutoff) continue;
    const double* srow = &S_[static_cast<std::size_t>(i) * ns_];
    const double scale = pw / c_alpha_;
    for (int k = 0; k < ns_; ++k) row[k] += scale * srow[k];
    offset += scale * (s_fix_[i] - c_alpha_);
  }
}

void PerfModel::set_e_gammas(std::vector<double> gammas) {
  e_gammas_ = std::move(gammas);
  const int J = static_cast<int>(e_gammas_.size());
  e_rows_.assign(static_cast<std::size_t>(J) * ns_, 0.0);
  e_offset_.assign(J, 0.0);
  std::vector<double> row;
  double offset;
  for (int j = 0; j < J; ++j) {
    e_row(e_gammas_[j], row, offset);
    for (int k = 0; k < ns_; ++k)
      e_rows_[static_cast<std::size_t>(j) * ns_ + k] = row[k];
    e_offset_[j] = offset;
  }
}

void PerfModel::e_all(const std::vector<double>& z,
                      std::vector<double>& e) const {
  const int J = static_cast<int>(e_gammas_.size());
  e.resize(J);
  for (int j = 0; j < J; ++j) {
    const double* row = &e_rows_[static_cast<std::size_t>(j) * ns_];
    double v = e_offset_[j];
    for (int k = 0; k < ns_; ++k) v += row[k] * z[nb_ + k];
    e[j] = v;
  }
}

double PerfModel::e_at(const std::vector<double>& z, double gamma) const {
  std::vector<double> row;
  double offset;
  e_row(gamma, row, offset);
  double v = offset;
  for (int k = 0; k < ns_; ++k) v += row[k] * z[nb_ + k];
  return v;
}

void PerfModel::criterion_coeffs(double omega, std::vector<double>& w_s,
                                 double& w0) const {
  const int n = static_cast<int>(hh_.size());
  w_s.assign(ns_, 0.0);
  w0 = 0.0;
  const double scale = 2.0 / c_alpha_;
  for (int i = 0; i < n; ++i) {
    const double g = (omega + norm_pdf(hh_[i])) * hw_[i] * scale;
    const double* srow = &Sh_[static_cast<std::size_t>(i) * ns_];
    for (int k = 0; k < ns_; ++k) w_s[k] += g * srow[k];
    w0 += g * (sh_fix_[i] - c_alpha_);
  }
}

splines::IntervalFunctions PerfModel::make_functions(
    const std::vector<double>& z) const {
  std::vector<double> b(z.begin(), z.begin() + nb_);
  std::vector<double> s(z.begin() + nb_, z.begin() + nb_ + ns_);
  for (double& v : s) v = std::max(v, 0.0); // guard against -0 roundoff
  return splines::IntervalFunctions(knots_, std::move(b), std::move(s),
                                    alpha_);
}

std::vector<double> PerfModel::standard_start() const {
  std::vector<double> z(dim(), 0.0);
  for (int k = 0; k < ns_; ++k) z[nb_ + k] = c_alpha_;
  return z;
}

} // namespace crossci::optimize
