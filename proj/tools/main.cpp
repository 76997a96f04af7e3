// crossci: confidence intervals for two-period crossover trials that
// exploit the prior belief of no differential carryover.
//
// Subcommands: optimize, table1, compare, simulate. Each reads an
// INI-style config (see README), writes CSV/JSON artifacts into
// --out-dir, and finishes with a manifest.json listing every output.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "crossci/compare.hpp"
#include "crossci/config.hpp"
#include "crossci/csv.hpp"
#include "crossci/mc.hpp"
#include "crossci/model.hpp"
#include "crossci/optimize.hpp"
#include "crossci/perf.hpp"

namespace fs = std::filesystem;
using crossci::config::Config;
using crossci::csvio::format_number;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonFlags {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

Config load_config(const CommonFlags& flags) {
  if (flags.config_path.empty()) return Config();
  return Config::load(flags.config_path);
}

void apply_threads(const CommonFlags& flags) {
#ifdef _OPENMP
  if (flags.threads > 0) omp_set_num_threads(flags.threads);
#else
  (void)flags;
#endif
}

// Knot layout and optimizer controls shared by every subcommand.
crossci::optimize::OptConfig read_opt_config(const Config& cfg,
                                             const std::string& sec,
                                             const CommonFlags& flags) {
  namespace opt = crossci::optimize;
  namespace spl = crossci::splines;

  opt::OptConfig out;
  out.alpha = cfg.get_double(sec, "alpha", 0.05);

  const bool has_rho = cfg.has(sec, "rho_tilde");
  const bool has_ratio = cfg.has(sec, "variance_ratio");
  if (has_rho && has_ratio)
    throw std::runtime_error("config: [" + sec +
                             "] give rho_tilde or variance_ratio, not both");
  if (has_ratio)
    out.rho_tilde = crossci::model::rho_tilde_from_ratio(
        cfg.get_double(sec, "variance_ratio", 1.0));
  else
    out.rho_tilde = cfg.get_double(sec, "rho_tilde", 0.86602540378443865);

  if (cfg.has(sec, "knots")) {
    out.knots = spl::KnotGrid::from_points(cfg.get_list(sec, "knots", {}));
  } else {
    const double d = cfg.get_double(sec, "d", 6.0);
    const int q = static_cast<int>(cfg.get_int(sec, "num_knots", 9));
    out.knots = spl::KnotGrid::uniform(d, q);
  }
  out.omega = cfg.get_double(sec, "omega", 0.2);

  out.quad.panels = static_cast<int>(cfg.get_int(sec, "panels", 64));
  out.quad.nodes_per_panel =
      static_cast<int>(cfg.get_int(sec, "nodes_per_panel", 10));
  out.quad.gamma_max =
      cfg.get_double(sec, "gamma_max", out.knots.d() + 4.0);
  const double gamma_step = cfg.get_double(sec, "gamma_step", 0.05);
  out.quad.gamma_grid = crossci::perf::QuadratureSpec::uniform_gamma_grid(
      out.quad.gamma_max, gamma_step);

  out.controls.multistarts =
      static_cast<int>(cfg.get_int(sec, "multistarts", 3));
  out.controls.seed = static_cast<std::uint64_t>(cfg.get_int(sec, "seed", 1));
  if (flags.seed) out.controls.seed = *flags.seed;
  out.controls.constraint_tol =
      cfg.get_double(sec, "constraint_tol", 5e-5);
  out.controls.max_outer =
      static_cast<int>(cfg.get_int(sec, "max_outer", 40));
  out.controls.max_inner =
      static_cast<int>(cfg.get_int(sec, "max_inner", 600));
  out.controls.refine_rounds =
      static_cast<int>(cfg.get_int(sec, "refine_rounds", 5));
  return out;
}

json opt_config_to_json(const crossci::optimize::OptConfig& cfg) {
  json j;
  j["alpha"] = cfg.alpha;
  j["rho_tilde"] = cfg.rho_tilde;
  j["knots"] = cfg.knots.x;
  j["omega"] = cfg.omega;
  j["panels"] = cfg.quad.panels;
  j["nodes_per_panel"] = cfg.quad.nodes_per_panel;
  j["gamma_max"] = cfg.quad.gamma_max;
  j["gamma_points"] = cfg.quad.gamma_grid.size();
  j["multistarts"] = cfg.controls.multistarts;
  j["seed"] = cfg.controls.seed;
  return j;
}

class OutputSet {
public:
  OutputSet(const std::string& dir, std::string subcommand, json resolved)
      : dir_(dir),
        subcommand_(std::move(subcommand)),
        resolved_(std::move(resolved)),
        start_(std::chrono::steady_clock::now()) {
    fs::create_directories(dir_);
  }

  std::string path(const std::string& name) {
    outputs_.push_back(name);
    return (fs::path(dir_) / name).string();
  }

  void write_manifest(std::uint64_t seed) {
    const auto elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start_)
                             .count();
    json m;
    m["subcommand"] = subcommand_;
    m["config"] = resolved_;
    m["outputs"] = outputs_;
    m["seed"] = seed;
    m["version"] = kVersion;
    m["wall_clock_seconds"] = elapsed;
    std::ofstream os(fs::path(dir_) / "manifest.json", std::ios::binary);
    os << m.dump(2) << "\n";
  }

private:
  std::string dir_, subcommand_;
  json resolved_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

void write_functions_csv(const crossci::splines::IntervalFunctions& f,
                         const std::string& path, int points) {
  crossci::csvio::Writer out(path);
  out.header({"x", "b", "s"});
  for (int i = 0; i < points; ++i) {
    const double x = f.d() * i / (points - 1);
    out.row({format_number(x), format_number(f.eval_b(x)),
             format_number(f.eval_s(x))});
  }
  out.close();
}

void write_curve_csv(const crossci::perf::PerfCurve& curve,
                     const std::string& path) {
  crossci::csvio::Writer out(path);
  out.header({"gamma", "coverage", "e2"});
  for (std::size_t i = 0; i < curve.gammas.size(); ++i)
    out.row({format_number(curve.gammas[i]), format_number(curve.coverage[i]),
             format_number(curve.sel2[i])});
  out.close();
}

int run_optimize(const CommonFlags& flags) {
  const Config cfg = load_config(flags);
  const auto opt_cfg = read_opt_config(cfg, "optimize", flags);
  if (opt_cfg.omega == 0.0)
    std::cerr << "warning: omega = 0 weights the criterion only through the "
                 "point mass at gamma = 0; length away from zero carryover "
                 "is unconstrained\n";

  const auto result = crossci::optimize::optimize_interval(opt_cfg);

  const double curve_step =
      cfg.get_double("optimize", "curve_gamma_step", 0.02);
  const int fig1_points =
      static_cast<int>(cfg.get_int("optimize", "fig1_points", 601));
  auto curve_quad = opt_cfg.quad;
  const auto curve = crossci::perf::perf_curve(
      result.f, opt_cfg.rho_tilde,
      crossci::perf::QuadratureSpec::uniform_gamma_grid(
          opt_cfg.quad.gamma_max, curve_step),
      curve_quad);

  OutputSet outputs(flags.out_dir, "optimize", opt_config_to_json(opt_cfg));
  result.f.save(outputs.path("functions.json"));
  write_functions_csv(result.f, outputs.path("fig1.csv"), fig1_points);
  write_curve_csv(curve, outputs.path("fig2.csv"));

  {
    std::ofstream os(outputs.path("summary.txt"), std::ios::binary);
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "omega          %.6g\n"
                  "expected gain  %.6f\n"
                  "max loss       %.6f\n"
                  "gain/loss      %.6f\n"
                  "min coverage   %.8f (at gamma = %.6f)\n"
                  "criterion      %.10f\n"
                  "feasible       %s\n",
                  opt_cfg.omega, result.expected_gain,
                  result.max_potential_loss, result.gain_loss_ratio,
                  result.min_coverage, result.gamma_argmin,
                  result.criterion_value, result.feasible ? "yes" : "no");
    os << buf;
    if (opt_cfg.omega == 0.0)
      os << "warning: omega = 0 leaves expected length away from gamma = 0 "
            "unweighted\n";
  }
  outputs.write_manifest(opt_cfg.controls.seed);

  std::printf("gain %.4f  loss %.4f  ratio %.4f  min coverage %.6f\n",
              result.expected_gain, result.max_potential_loss,
              result.gain_loss_ratio, result.min_coverage);
  return result.feasible ? 0 : 1;
}

int run_table1(const CommonFlags& flags) {
  const Config cfg = load_config(flags);
  const auto base = read_opt_config(cfg, "table1", flags);
  const std::vector<double> omegas =
      cfg.get_list("table1", "omegas", {0.05, 0.2, 0.5, 1.0});

  const auto rows = crossci::optimize::omega_table(base, omegas);

  json resolved = opt_config_to_json(base);
  resolved["omegas"] = omegas;
  OutputSet outputs(flags.out_dir, "table1", resolved);
  crossci::csvio::Writer out(outputs.path("table1.csv"));
  out.header({"omega", "gain", "loss", "ratio"});
  bool all_ok = true;
  for (const auto& row : rows) {
    out.row({format_number(row.omega), format_number(row.gain),
             format_number(row.loss), format_number(row.ratio)});
    if (!row.ok) {
      all_ok = false;
      std::cerr << "omega = " << row.omega << " failed: " << row.error
                << "\n";
    } else {
      std::printf("omega %-5g gain %.4f  loss %.4f  ratio %.4f\n", row.omega,
                  row.gain, row.loss, row.ratio);
    }
  }
  out.close();
  outputs.write_manifest(base.controls.seed);
  return all_ok ? 0 : 1;
}

int run_compare(const CommonFlags& flags) {
  const Config cfg = load_config(flags);
  crossci::compare::ComparisonSpec spec;
  spec.opt_template = read_opt_config(cfg, "compare", flags);
  spec.alpha = spec.opt_template.alpha;
  spec.max_e2_bound = cfg.get_double("compare", "max_e2", 1.25);
  spec.rho_tilde_grid =
      cfg.get_list("compare", "rho_grid", spec.rho_tilde_grid);
  spec.validate();

  const auto rows = crossci::compare::scan_designs(spec);

  json resolved = opt_config_to_json(spec.opt_template);
  resolved["max_e2"] = spec.max_e2_bound;
  resolved["rho_grid"] = spec.rho_tilde_grid;
  OutputSet outputs(flags.out_dir, "compare", resolved);
  crossci::csvio::Writer out(outputs.path("compare.csv"));
  out.header({"rho_tilde", "variance_ratio", "min_r2", "max_e2", "verdict"});
  bool all_ok = true;
  for (const auto& row : rows) {
    out.row({format_number(row.rho_tilde), format_number(row.variance_ratio),
             format_number(row.min_r2), format_number(row.max_e2),
             row.verdict});
    if (!row.ok) {
      all_ok = false;
      std::cerr << "rho_tilde = " << row.rho_tilde << " failed: " << row.error
                << "\n";
    } else {
      std::printf("rho_tilde %.4f  ratio %8.4f  min r^2 %.4f  %s\n",
                  row.rho_tilde, row.variance_ratio, row.min_r2,
                  row.verdict.c_str());
    }
  }
  out.close();
  outputs.write_manifest(spec.opt_template.controls.seed);
  return all_ok ? 0 : 1;
}

int run_simulate(const CommonFlags& flags) {
  const Config cfg = load_config(flags);
  const std::string sec = "simulate";

  const auto opt_cfg = read_opt_config(cfg, sec, flags);
  const std::vector<double> n_list =
      cfg.get_list(sec, "n_list", {25, 50, 100, 200});
  const std::vector<double> gamma_list =
      cfg.get_list(sec, "gamma_list", {0.0, 1.0, 3.0});
  const auto reps = cfg.get_int(sec, "reps", 100000);
  if (reps < 1000)
    throw std::runtime_error("simulate: reps below 1000 is refused; Monte "
                             "Carlo error would swamp the comparison");
  const bool known_variance = cfg.get_bool(sec, "known_variance", false);
  const double theta = cfg.get_double(sec, "theta", 0.0);
  const double sigma_eps2 = cfg.get_double(sec, "sigma_eps2", 1.0);
  std::uint64_t seed =
      static_cast<std::uint64_t>(cfg.get_int(sec, "seed", 1));
  if (flags.seed) seed = *flags.seed;

  // the data-generating variances realize the configured rho_tilde
  const double ratio = crossci::model::ratio_from_rho_tilde(opt_cfg.rho_tilde);
  const crossci::model::VarianceModel variances(ratio * sigma_eps2,
                                                sigma_eps2);

  std::optional<crossci::splines::IntervalFunctions> f;
  const std::string functions_file =
      cfg.get_string(sec, "functions_file", "");
  if (!functions_file.empty())
    f = crossci::splines::IntervalFunctions::load(functions_file);
  else
    f = crossci::optimize::optimize_interval(opt_cfg).f;

  json resolved = opt_config_to_json(opt_cfg);
  resolved["n_list"] = n_list;
  resolved["gamma_list"] = gamma_list;
  resolved["reps"] = reps;
  resolved["known_variance"] = known_variance;
  resolved["functions_file"] = functions_file;
  OutputSet outputs(flags.out_dir, "simulate", resolved);
  crossci::csvio::Writer out(outputs.path("simulate.csv"));
  out.header({"n", "gamma", "coverage", "coverage_se", "length_ratio2",
              "length_ratio2_se", "plugin_failures"});

  for (double n_real : n_list) {
    const int n = static_cast<int>(n_real);
    for (double gamma : gamma_list) {
      crossci::mc::FiniteSampleConfig mc_cfg;
      mc_cfg.design = crossci::model::TrialDesign(n, n);
      mc_cfg.variances = variances;
      const double psi = gamma * variances.sigma() *
                         std::sqrt(mc_cfg.design.m()) *
                         variances.rho_tilde();
      mc_cfg.params = crossci::model::TrialParams::from_theta_psi(theta, psi);
      mc_cfg.reps = reps;
      mc_cfg.seed = seed + static_cast<std::uint64_t>(n) * 1000003u +
                    static_cast<std::uint64_t>(std::llround(gamma * 64));
      mc_cfg.known_variance = known_variance;
      const auto res = crossci::mc::mc_assess(mc_cfg, *f);
      out.row({format_number(n), format_number(gamma),
               format_number(res.coverage), format_number(res.coverage_se),
               format_number(res.length_ratio2),
               format_number(res.length_ratio2_se),
               format_number(static_cast<double>(res.plugin_failures))});
      std::printf("n %4d  gamma %-4g coverage %.4f (se %.4f)  e2 %.4f\n", n,
                  gamma, res.coverage, res.coverage_se, res.length_ratio2);
    }
  }
  out.close();
  outputs.write_manifest(seed);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"confidence intervals for two-period crossover trials"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config_path, "INI config file");
    sub->add_option("--out-dir", flags.out_dir, "output directory");
    sub->add_option("--seed", flags.seed, "override the config seed");
    sub->add_option("--threads", flags.threads, "OpenMP thread count");
  };

  auto* cmd_optimize = app.add_subcommand(
      "optimize", "fit the interval functions b and s for one omega");
  auto* cmd_table1 = app.add_subcommand(
      "table1", "expected gain and maximum loss across omegas");
  auto* cmd_compare = app.add_subcommand(
      "compare", "crossover versus completely randomized design");
  auto* cmd_simulate = app.add_subcommand(
      "simulate", "finite-sample Monte Carlo with plug-in variances");
  for (auto* sub : {cmd_optimize, cmd_table1, cmd_compare, cmd_simulate})
    add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    apply_threads(flags);
    if (cmd_optimize->parsed()) return run_optimize(flags);
    if (cmd_table1->parsed()) return run_table1(flags);
    if (cmd_compare->parsed()) return run_compare(flags);
    if (cmd_simulate->parsed()) return run_simulate(flags);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
