#include "crossci/mc.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "crossci/normal.hpp"

namespace crossci::mc {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

PlugInEstimates plug_in_estimates(const model::SummaryStats& stats,
                                  const model::TrialDesign& design) {
  const int dof = design.total() - 2;
  if (dof < 1)
    throw std::invalid_argument("plug_in_estimates: need n1 + n2 >= 3");
  if (stats.v == 0.0 && stats.w == 0.0)
    throw std::invalid_argument(
        "plug_in_estimates: degenerate data (V = W = 0)");

  PlugInEstimates est;
  est.sigma_eps2_hat = stats.v / dof;
  est.sigma_s2_hat = std::max(0.0, (stats.w - stats.v) / (2.0 * dof));
  const double sigma2 = est.sigma_eps2_hat + est.sigma_s2_hat;
  est.sigma_hat = std::sqrt(sigma2);
  const double rho = sigma2 > 0.0 ? est.sigma_s2_hat / sigma2 : 0.0;
  est.rho_tilde_hat = std::sqrt(0.5 * (1.0 + rho));
  // roundoff guard: keep the estimate inside [1/sqrt(2), 1)
  est.rho_tilde_hat =
      std::min(std::max(est.rho_tilde_hat, kInvSqrt2), 0.9999999999999999);
  return est;
}

splines::Interval finite_sample_interval(const model::TrialData& data,
                                         const model::TrialDesign& design,
                                         const splines::IntervalFunctions& f) {
  const model::SummaryStats stats = model::summary_stats(data);
  const PlugInEstimates est = plug_in_estimates(stats, design);
  return splines::construct_interval(f, stats.theta_hat, stats.psi_hat,
                                     est.sigma_hat, design.m(),
                                     est.rho_tilde_hat);
}

namespace {

struct BlockTotals {
  std::int64_t covered = 0;
  std::int64_t failures = 0;
  double length_sum = 0.0;
  double length_comp = 0.0; // Kahan compensation
  double length_sq_sum = 0.0;
};

McAssessment mc_assess_impl(const FiniteSampleConfig& cfg,
                            const splines::IntervalFunctions& f,
                            bool parallel) {
  if (cfg.reps < 1000)
    throw std::invalid_argument("mc_assess: need at least 1e3 replications");

  const double theta = cfg.params.theta();
  const double sigma = cfg.variances.sigma();
  const double rho_tilde = cfg.variances.rho_tilde();
  const double m = cfg.design.m();
  const double std_length = 2.0 * f.c_alpha() * std::sqrt(m) * sigma;

  // Fixed-size blocks; block sums are combined in index order so the
  // result is independent of the thread schedule.
  constexpr std::int64_t kBlock = 1 << 10;
  const std::int64_t nblocks = (cfg.reps + kBlock - 1) / kBlock;
  std::vector<BlockTotals> blocks(nblocks);

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::int64_t blk = 0; blk < nblocks; ++blk) {
    const std::int64_t lo = blk * kBlock;
    const std::int64_t hi = std::min(cfg.reps, lo + kBlock);
    BlockTotals t;
    for (std::int64_t r = lo; r < hi; ++r) {
      const model::TrialData data = model::simulate_trial(
          cfg.params, cfg.design, cfg.variances, cfg.seed,
          static_cast<std::uint64_t>(r));
      splines::Interval interval;
      if (cfg.known_variance) {
        const model::SummaryStats stats = model::summary_stats(data);
        interval = splines::construct_interval(f, stats.theta_hat,
                                               stats.psi_hat, sigma, m,
                                               rho_tilde);
      } else {
        try {
          interval = finite_sample_interval(data, cfg.design, f);
        } catch (const std::invalid_argument&) {
          ++t.failures;
          continue;
        }
      }
      if (interval.contains(theta)) ++t.covered;
      const double len = interval.length();
      // Kahan step keeps the block sum independent of vector width
      const double y = len - t.length_comp;
      const double s = t.length_sum + y;
      t.length_comp = (s - t.length_sum) - y;
      t.length_sum = s;
      t.length_sq_sum += len * len;
    }
    blocks[blk] = t;
  }

  std::int64_t covered = 0, failures = 0;
  double length_sum = 0.0, comp = 0.0, length_sq = 0.0;
  for (const BlockTotals& t : blocks) {
    covered += t.covered;
    failures += t.failures;
    const double y = t.length_sum - comp;
    const double s = length_sum + y;
    comp = (s - length_sum) - y;
    length_sum = s;
    length_sq += t.length_sq_sum;
  }

  McAssessment out;
  out.reps = cfg.reps;
  out.plugin_failures = failures;
  const double used = static_cast<double>(cfg.reps - failures);
  if (used <= 0.0)
    throw std::runtime_error("mc_assess: every replication failed plug-in");
  out.coverage = static_cast<double>(covered) / used;
  out.coverage_se = std::sqrt(out.coverage * (1.0 - out.coverage) / used);

  const double mean_len = length_sum / used;
  const double var_len =
      used > 1.0
          ? std::max(0.0, (length_sq - used * mean_len * mean_len) / (used - 1.0))
          : 0.0;
  const double ratio = mean_len / std_length;
  out.length_ratio2 = ratio * ratio;
  // delta method: d(ratio^2)/d(mean) = 2 ratio / std_length
  out.length_ratio2_se =
      2.0 * ratio * std::sqrt(var_len / used) / std_length;
  return out;
}

} // namespace

McAssessment mc_assess(const FiniteSampleConfig& cfg,
                       const splines::IntervalFunctions& f) {
  return mc_assess_impl(cfg, f, true);
}

McAssessment mc_assess_serial(const FiniteSampleConfig& cfg,
                              const splines::IntervalFunctions& f) {
  return mc_assess_impl(cfg, f, false);
}

} // namespace crossci::mc
