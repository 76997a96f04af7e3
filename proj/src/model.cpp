#include "crossci/model.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "crossci/rng.hpp"

namespace crossci::model {

TrialDesign::TrialDesign(int n1_, int n2_, bool relaxed) : n1(n1_), n2(n2_) {
  const int min_size = relaxed ? 1 : 2;
  if (n1 < min_size || n2 < min_size)
    throw std::invalid_argument("TrialDesign: both groups need at least " +
                                std::to_string(min_size) + " subjects");
}

VarianceModel::VarianceModel(double s2, double eps2)
    : sigma_s2(s2), sigma_eps2(eps2) {
  if (sigma_s2 < 0.0 || sigma_eps2 <= 0.0)
    throw std::invalid_argument(
        "VarianceModel: need sigma_s2 >= 0 and sigma_eps2 > 0");
}

double VarianceModel::sigma() const { return std::sqrt(sigma2()); }

double VarianceModel::rho_tilde() const {
  return std::sqrt(0.5 * (1.0 + rho()));
}

TrialParams TrialParams::from_theta_psi(double theta, double psi) {
  TrialParams p;
  p.phi = {0.5 * theta, -0.5 * theta};
  p.lambda = {psi, -psi};
  return p;
}

double rho_tilde_from_ratio(double ratio) {
  if (!(ratio >= 0.0))
    throw std::domain_error("rho_tilde_from_ratio: ratio must be >= 0");
  const double rho = ratio / (1.0 + ratio);
  return std::sqrt(0.5 * (1.0 + rho));
}

double ratio_from_rho_tilde(double rho_tilde) {
  constexpr double lo = 0.70710678118654752440; // 1/sqrt(2)
  if (!(rho_tilde >= lo && rho_tilde < 1.0))
    throw std::domain_error(
        "ratio_from_rho_tilde: rho_tilde must lie in [1/sqrt(2), 1)");
  const double t = 2.0 * rho_tilde * rho_tilde - 1.0;
  return t / (1.0 - t);
}

SummaryStats summary_stats(const TrialData& data, bool relaxed) {
  const int min_size = relaxed ? 1 : 2;
  for (int i = 0; i < 2; ++i)
    if (data.group_size(i) < min_size)
      throw std::invalid_argument("summary_stats: group " +
                                  std::to_string(i + 1) + " has fewer than " +
                                  std::to_string(min_size) + " subjects");

  double mean[2][2]; // [group][period]
  for (int i = 0; i < 2; ++i) {
    double sum1 = 0.0, sum2 = 0.0;
    for (const auto& subj : data.y[i]) {
      sum1 += subj[0];
      sum2 += subj[1];
    }
    const double n = static_cast<double>(data.group_size(i));
    mean[i][0] = sum1 / n;
    mean[i][1] = sum2 / n;
  }

  SummaryStats s;
  s.a = 0.5 * (mean[0][0] - mean[0][1] - mean[1][0] + mean[1][1]);
  s.psi_hat = 0.5 * (mean[0][0] + mean[0][1] - mean[1][0] - mean[1][1]);
  s.theta_hat = s.a + s.psi_hat;
  for (int i = 0; i < 2; ++i) {
    for (const auto& subj : data.y[i]) {
      const double d1 = subj[0] - mean[i][0];
      const double d2 = subj[1] - mean[i][1];
      s.v += 0.5 * (d1 - d2) * (d1 - d2);
      s.w += 0.5 * (d1 + d2) * (d1 + d2);
    }
  }
  return s;
}

TrialData simulate_trial(const TrialParams& params, const TrialDesign& design,
                         const VarianceModel& variances, std::uint64_t seed,
                         std::uint64_t stream) {
  RandomStream rng(seed, stream);
  const double sd_s = std::sqrt(variances.sigma_s2);
  const double sd_eps = std::sqrt(variances.sigma_eps2);

  // Treatment of group i in period k; residual effect in period 2 is the
  // one left by the period-1 treatment.
  const int treat[2][2] = {{0, 1}, {1, 0}};

  TrialData data;
  const int sizes[2] = {design.n1, design.n2};
  for (int i = 0; i < 2; ++i) {
    data.y[i].resize(sizes[i]);
    for (int j = 0; j < sizes[i]; ++j) {
      const double xi = sd_s * rng.normal();
      for (int k = 0; k < 2; ++k) {
        double v = params.mu + xi + params.pi[k] + params.phi[treat[i][k]];
        if (k == 1) v += params.lambda[treat[i][0]];
        v += sd_eps * rng.normal();
        data.y[i][j][k] = v;
      }
    }
  }
  return data;
}

StandardizedState standardize(const SummaryStats& stats, double theta,
                              double psi, double sigma, double m,
                              double rho_tilde) {
  if (!(sigma > 0.0) || !(m > 0.0))
    throw std::domain_error("standardize: sigma and m must be positive");
  constexpr double lo = 0.70710678118654752440;
  if (!(rho_tilde >= lo && rho_tilde < 1.0))
    throw std::domain_error(
        "standardize: rho_tilde must lie in [1/sqrt(2), 1)");
  const double scale = sigma * std::sqrt(m);
  StandardizedState st;
  st.gamma = psi / (scale * rho_tilde);
  st.g = (stats.theta_hat - theta) / scale;
  st.h = stats.psi_hat / (scale * rho_tilde);
  return st;
}

void write_csv(const TrialData& data, std::ostream& os) {
  os << "group,subject,period,response\n";
  char buf[64];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < data.group_size(i); ++j) {
      for (int k = 0; k < 2; ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", data.y[i][j][k]);
        os << (i + 1) << ',' << (j + 1) << ',' << (k + 1) << ',' << buf
           << '\n';
      }
    }
  }
}

TrialData read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("trial CSV: empty input");
  // strip a UTF-8 BOM and trailing CR before checking the header
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
    line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "group,subject,period,response")
    throw std::runtime_error(
        "trial CSV: expected header 'group,subject,period,response'");

  std::map<std::pair<int, int>, std::array<double, 2>> cells;
  std::map<std::pair<int, int>, std::array<bool, 2>> seen;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string f[4];
    for (int c = 0; c < 4; ++c)
      if (!std::getline(ss, f[c], ','))
        throw std::runtime_error("trial CSV line " + std::to_string(lineno) +
                                 ": expected 4 fields");
    int group, subject, period;
    double response;
    try {
      group = std::stoi(f[0]);
      subject = std::stoi(f[1]);
      period = std::stoi(f[2]);
      response = std::stod(f[3]);
    } catch (const std::exception&) {
      throw std::runtime_error("trial CSV line " + std::to_string(lineno) +
                               ": malformed number");
    }
    if (group < 1 || group > 2 || period < 1 || period > 2 || subject < 1)
      throw std::runtime_error("trial CSV line " + std::to_string(lineno) +
                               ": indices out of range");
    auto key = std::make_pair(group, subject);
    if (seen[key][period - 1])
      throw std::runtime_error("trial CSV line " + std::to_string(lineno) +
                               ": duplicate (group,subject,period)");
    cells[key][period - 1] = response;
    seen[key][period - 1] = true;
  }

  TrialData data;
  for (const auto& [key, vals] : cells) {
    const auto& [group, subject] = key;
    auto& g = data.y[group - 1];
    if (subject != static_cast<int>(g.size()) + 1)
      throw std::runtime_error("trial CSV: subjects of group " +
                               std::to_string(group) +
                               " must be numbered 1..n without gaps");
    const auto& flags = seen[key];
    if (!flags[0] || !flags[1])
      throw std::runtime_error("trial CSV: subject " +
                               std::to_string(subject) + " of group " +
                               std::to_string(group) + " is missing a period");
    g.push_back(vals);
  }
  return data;
}

void save_csv(const TrialData& data, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(data, os);
}

TrialData load_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_csv(is);
}

} // namespace crossci::model
