// Command-line front end: wires device configs and scenario specs to the
// model and simulation routines, emitting CSV/JSON artifacts plus a run
// manifest per output directory.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "purcell/circuit_model.hpp"
#include "purcell/device_config.hpp"
#include "purcell/optimize.hpp"
#include "purcell/readout.hpp"
#include "purcell/reset.hpp"
#include "purcell/scenarios.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSimulation = 3;
constexpr int kExitAssert = 4;

constexpr const char* kVersion = "0.1.0";

struct RunManifest {
  std::string command;
  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  std::string outdir;

  void write(const std::string& dir) const {
    nlohmann::json j;
    j["command"] = command;
    j["config"] = config_path;
    j["overrides"] = overrides;
    j["seed"] = seed;
    j["outdir"] = outdir;
    j["tool_version"] = kVersion;
    const auto now = std::chrono::system_clock::now();
    j["timestamp"] =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    std::ofstream os(dir + "/manifest.json");
    os << j.dump(2) << "\n";
  }
};

std::string default_config() {
  if (const char* env = std::getenv("PURCELL_LAB_CONFIG")) return env;
  return "";
}

void ensure_outdir(const std::string& dir) {
  std::filesystem::create_directories(dir);
}

std::ofstream open_csv(const std::string& dir, const std::string& name) {
  std::ofstream os(dir + "/" + name);
  if (!os) throw std::runtime_error("cannot write " + dir + "/" + name);
  return os;
}

// --assert expressions of the form "residual<0.012"
struct AssertSpec {
  std::string metric;
  double limit;
};

std::optional<AssertSpec> parse_assert(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto pos = text.find('<');
  if (pos == std::string::npos)
    throw purcell::ResetError("assert expression must look like metric<value");
  AssertSpec a;
  a.metric = text.substr(0, pos);
  a.limit = std::stod(text.substr(pos + 1));
  return a;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"purcell-lab: tunable-filter readout and reset design toolkit"};
  app.require_subcommand(1);

  std::string config_path = default_config();
  std::string outdir = "out";
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "device config JSON path (env PURCELL_LAB_CONFIG)");
  app.add_option("--out", outdir, "output directory");
  app.add_option("--seed", seed, "seed for stochastic components");

  // ---- filter-tune ----
  auto* tune = app.add_subcommand("filter-tune", "filter passband vs flux bias");
  std::string tune_filter_id;
  double flux_min = 0.0, flux_max = 0.5;
  int flux_points = 101;
  tune->add_option("--filter", tune_filter_id, "filter id (default: first in config)");
  tune->add_option("--flux-min", flux_min);
  tune->add_option("--flux-max", flux_max);
  tune->add_option("--points", flux_points);

  // ---- kappa-scan ----
  auto* kappa = app.add_subcommand("kappa-scan", "effective linewidth vs filter detuning");
  double ks_g = 20e6, ks_kf = 150e6, ks_dmin = -800e6, ks_dmax = 800e6;
  int ks_points = 201;
  kappa->add_option("--g-rf", ks_g);
  kappa->add_option("--kappa-f", ks_kf);
  kappa->add_option("--delta-min", ks_dmin);
  kappa->add_option("--delta-max", ks_dmax);
  kappa->add_option("--points", ks_points);

  // ---- dephasing-scan ----
  auto* deph = app.add_subcommand("dephasing-scan",
                                  "photon-noise dephasing vs filter detuning");
  double dp_g = 20e6, dp_kf = 150e6, dp_two_chi = 1.4e6, dp_n = 1.0;
  double dp_dmin = -800e6, dp_dmax = 800e6;
  int dp_points = 801;
  deph->add_option("--g-rf", dp_g);
  deph->add_option("--kappa-f", dp_kf);
  deph->add_option("--two-chi", dp_two_chi);
  deph->add_option("--n-noise", dp_n);
  deph->add_option("--delta-min", dp_dmin);
  deph->add_option("--delta-max", dp_dmax);
  deph->add_option("--points", dp_points);

  // ---- readout-budget ----
  auto* budget = app.add_subcommand("readout-budget", "error budget for Gaussian clouds");
  double rb_snr = 6.4, rb_tau = 1077e-9, rb_t1 = 27.8e-6, rb_prep = 0.0;
  bool rb_optimize = false;
  budget->add_option("--snr", rb_snr);
  budget->add_option("--tau", rb_tau);
  budget->add_option("--t1", rb_t1);
  budget->add_option("--prep-error", rb_prep);
  budget->add_flag("--optimize-threshold", rb_optimize);

  // ---- reset ----
  auto* reset = app.add_subcommand("reset", "simulate a reset scenario");
  std::string rs_scenario = "paper-square";
  std::string rs_scenario_file;
  std::string rs_assert;
  std::vector<double> rs_agrid;
  reset->add_option("--scenario", rs_scenario, "named scenario or JSON file");
  reset->add_option("--scenario-file", rs_scenario_file, "scenario spec JSON path");
  reset->add_option("--assert", rs_assert, "fail with exit 4 unless metric<value");
  reset->add_option("--a-grid", rs_agrid, "pulse fractions for the initial-state sweep");

  // ---- multi-coupler ----
  auto* mc = app.add_subcommand("multi-coupler", "couplers sharing one lossy filter");
  int mc_n = 3;
  std::vector<double> mc_det;
  double mc_g = 20e6, mc_kf = 140e6, mc_t = 500e-9;
  std::string mc_init;
  mc->add_option("--n", mc_n);
  mc->add_option("--detunings", mc_det, "Hz, one per coupler (default all 0)");
  mc->add_option("--g", mc_g);
  mc->add_option("--kappa-f", mc_kf);
  mc->add_option("--t-final", mc_t);
  mc->add_option("--init", mc_init, "bitstring, e.g. 101 (default all 1)");

  // ---- optimize ----
  auto* opt = app.add_subcommand("optimize", "model-based search on a benchmark surface");
  std::string op_benchmark = "quadratic";
  int op_trials = 50;
  double op_gamma = 0.25;
  opt->add_option("--benchmark", op_benchmark, "quadratic | bimodal");
  opt->add_option("--trials", op_trials);
  opt->add_option("--gamma", op_gamma);

  // ---- calc ----
  auto* calc = app.add_subcommand("calc", "evaluate a single formula, JSON to stdout");
  auto* c_squid = calc->add_subcommand("squid-inductance");
  double sq_flux = 0, sq_ic1 = 0.085e-6, sq_ic2 = 0.315e-6;
  c_squid->add_option("--flux", sq_flux, "Phi/Phi0");
  c_squid->add_option("--ic1", sq_ic1);
  c_squid->add_option("--ic2", sq_ic2);
  auto* c_disp = calc->add_subcommand("dispersive-shifts");
  double ds_g = 104.4e6, ds_fq = 4.83e9, ds_alpha = -188e6, ds_fr = 6.45e9;
  c_disp->add_option("--g", ds_g);
  c_disp->add_option("--f-qubit", ds_fq);
  c_disp->add_option("--alpha", ds_alpha);
  c_disp->add_option("--f-resonator", ds_fr);
  auto* c_purcell = calc->add_subcommand("purcell-rate");
  double pr_gqr = 104.4e6, pr_gfr = 20e6, pr_kf = 150e6, pr_ff = 7.0e9,
         pr_fq = 5.5e9, pr_fr = 6.5e9;
  c_purcell->add_option("--g-qr", pr_gqr);
  c_purcell->add_option("--g-fr", pr_gfr);
  c_purcell->add_option("--kappa-f", pr_kf);
  c_purcell->add_option("--f-filter", pr_ff);
  c_purcell->add_option("--f-qubit", pr_fq);
  c_purcell->add_option("--f-resonator", pr_fr);
  auto* c_kerr = calc->add_subcommand("kerr-shift");
  double kr_n = 1.0, kr_alpha = 4.47e6;
  c_kerr->add_option("--n", kr_n);
  c_kerr->add_option("--alpha-f", kr_alpha);

  CLI11_PARSE(app, argc, argv);

  RunManifest manifest;
  manifest.config_path = config_path;
  manifest.seed = seed;
  manifest.outdir = outdir;
  for (int i = 1; i < argc; ++i) manifest.overrides.push_back(argv[i]);

  try {
    if (tune->parsed()) {
      manifest.command = "filter-tune";
      if (config_path.empty()) {
        std::cerr << "filter-tune requires --config\n";
        return kExitConfig;
      }
      const auto cfg = purcell::load_device_config(config_path);
      if (cfg.filters.empty()) {
        std::cerr << "config has no filters\n";
        return kExitConfig;
      }
      const auto& fp = tune_filter_id.empty() ? cfg.filters.front()
                                              : cfg.filter(tune_filter_id);
      const auto curve = purcell::filter_tuning_curve(fp, flux_min, flux_max, flux_points);
      ensure_outdir(outdir);
      auto os = open_csv(outdir, "filter_tune.csv");
      os << "flux_ratio,frequency\n";
      char buf[64];
      for (std::size_t i = 0; i < curve.flux.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", curve.flux[i], curve.freq[i]);
        os << buf;
      }
      manifest.write(outdir);
      const auto [mn, mx] = std::minmax_element(curve.freq.begin(), curve.freq.end());
      std::printf("filter %s: %.4f - %.4f GHz over flux [%g, %g]\n", fp.id.c_str(),
                  *mn * 1e-9, *mx * 1e-9, flux_min, flux_max);
      return kExitOk;
    }

    if (kappa->parsed()) {
      manifest.command = "kappa-scan";
      ensure_outdir(outdir);
      auto os = open_csv(outdir, "kappa_eff.csv");
      os << "delta_fr,kappa_eff\n";
      char buf[64];
      for (int i = 0; i < ks_points; ++i) {
        const double d = ks_dmin + (ks_dmax - ks_dmin) * i / (ks_points - 1.0);
        std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", d,
                      purcell::effective_linewidth(ks_g, d, ks_kf));
        os << buf;
      }
      manifest.write(outdir);
      std::printf("kappa_eff on resonance: %.4g MHz\n",
                  purcell::effective_linewidth(ks_g, 0, ks_kf) * 1e-6);
      return kExitOk;
    }

    if (deph->parsed()) {
      manifest.command = "dephasing-scan";
      ensure_outdir(outdir);
      auto os = open_csv(outdir, "dephasing.csv");
      os << "delta_fr,kappa_eff,gamma_phi\n";
      char buf[96];
      int maxima = 0;
      double prev2 = -1, prev1 = -1;
      for (int i = 0; i < dp_points; ++i) {
        const double d = dp_dmin + (dp_dmax - dp_dmin) * i / (dp_points - 1.0);
        const double ke = purcell::effective_linewidth(dp_g, d, dp_kf);
        const double gp = purcell::photon_noise_dephasing(ke, dp_two_chi, dp_n);
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", d, ke, gp);
        os << buf;
        if (prev2 >= 0 && prev1 > prev2 && prev1 > gp) ++maxima;
        prev2 = prev1;
        prev1 = gp;
      }
      manifest.write(outdir);
      std::printf("local maxima in Gamma_phi(Delta): %d\n", maxima);
      return kExitOk;
    }

    if (budget->parsed()) {
      manifest.command = "readout-budget";
      purcell::IQCloud c0{{0, 0}, {1, 1}, 1.0};
      purcell::IQCloud c1{{rb_snr, 0}, {1, 1}, 1.0};
      const double eps = purcell::relaxation_error(rb_tau, rb_t1);
      purcell::ThresholdLine thr = rb_optimize
                                       ? purcell::optimize_threshold(c0, c1, eps).threshold
                                       : purcell::midpoint_threshold(c0, c1);
      const auto b = purcell::error_budget(c0, c1, thr, rb_tau, rb_t1, rb_prep);
      ensure_outdir(outdir);
      {
        std::ofstream os(outdir + "/budget.json");
        os << b.to_json() << "\n";
      }
      manifest.write(outdir);
      b.write_table(std::cout);
      return kExitOk;
    }

    if (reset->parsed()) {
      manifest.command = "reset";
      purcell::ResetScenario sc;
      if (!rs_scenario_file.empty()) {
        std::ifstream is(rs_scenario_file);
        if (!is) {
          std::cerr << "scenario file not found: " << rs_scenario_file << "\n";
          return kExitConfig;
        }
        std::stringstream ss;
        ss << is.rdbuf();
        sc = purcell::parse_scenario_json(ss.str());
      } else {
        try {
          sc = purcell::scenario_by_name(rs_scenario);
        } catch (const purcell::ResetError& e) {
          std::cerr << e.what() << "\n";
          return kExitConfig;
        }
      }
      const auto assertion = parse_assert(rs_assert);

      ensure_outdir(outdir);
      double worst = 0;
      if (rs_agrid.empty()) rs_agrid = {0.0};
      const auto outcomes = purcell::unconditional_sweep(sc, rs_agrid);
      auto os = open_csv(outdir, "reset_residuals.csv");
      os << "A,residual,coupler_residual\n";
      char buf[96];
      for (std::size_t i = 0; i < outcomes.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", rs_agrid[i],
                      outcomes[i].residual, outcomes[i].coupler_residual);
        os << buf;
        worst = std::max(worst, outcomes[i].residual);
      }
      auto ts = open_csv(outdir, "filter_trace.csv");
      ts << "t,filter_excitation\n";
      const auto& last = outcomes.back();
      for (std::size_t i = 0; i < last.filter_trace_times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", last.filter_trace_times[i],
                      last.filter_trace[i]);
        ts << buf;
      }
      manifest.write(outdir);
      std::printf("scenario %s: worst residual %.6f over %zu initial states\n",
                  sc.name.c_str(), worst, outcomes.size());
      if (assertion) {
        if (assertion->metric != "residual") {
          std::cerr << "unknown assert metric '" << assertion->metric << "'\n";
          return kExitConfig;
        }
        if (!(worst < assertion->limit)) {
          std::printf("assert failed: residual %.6f >= %.6f\n", worst, assertion->limit);
          return kExitAssert;
        }
      }
      return kExitOk;
    }

    if (mc->parsed()) {
      manifest.command = "multi-coupler";
      if (mc_det.empty()) mc_det.assign(mc_n, 0.0);
      std::vector<int> init(mc_n, 1);
      if (!mc_init.empty()) {
        if (static_cast<int>(mc_init.size()) != mc_n) {
          std::cerr << "--init must have one bit per coupler\n";
          return kExitConfig;
        }
        for (int i = 0; i < mc_n; ++i) init[i] = mc_init[i] == '1' ? 1 : 0;
      }
      const auto res = purcell::multi_coupler_reset(mc_n, mc_det, mc_g, mc_kf, init, mc_t);
      ensure_outdir(outdir);
      auto os = open_csv(outdir, "multi_coupler.csv");
      os << "t";
      for (int i = 0; i < mc_n; ++i) os << ",coupler" << i + 1;
      os << "\n";
      char buf[64];
      for (std::size_t k = 0; k < res.times.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.12g", res.times[k]);
        os << buf;
        for (int i = 0; i < mc_n; ++i) {
          std::snprintf(buf, sizeof buf, ",%.12g", res.coupler_excitation[i][k]);
          os << buf;
        }
        os << "\n";
      }
      manifest.write(outdir);
      double worst = 0;
      for (int i = 0; i < mc_n; ++i) worst = std::max(worst, res.coupler_excitation[i].back());
      std::printf("worst final coupler excitation: %.3e\n", worst);
      return kExitOk;
    }

    if (opt->parsed()) {
      manifest.command = "optimize";
      purcell::ParameterSpace space;
      space.seed = seed;
      purcell::Objective objective;
      if (op_benchmark == "quadratic") {
        space.axes = {{"x", -5.0, 5.0, purcell::AxisScale::linear}};
        objective = [](const std::vector<double>& p) {
          return 1.0 - (p[0] - 1.3) * (p[0] - 1.3);
        };
      } else if (op_benchmark == "bimodal") {
        space.axes = {{"x", 0.0, 1.0, purcell::AxisScale::linear}};
        objective = [](const std::vector<double>& p) {
          const double a = std::exp(-std::pow((p[0] - 0.25) / 0.05, 2));
          const double b = 0.9 * std::exp(-std::pow((p[0] - 0.75) / 0.05, 2));
          return std::max(a, b);
        };
      } else {
        std::cerr << "unknown benchmark '" << op_benchmark << "'\n";
        return kExitConfig;
      }
      purcell::TpeOptions topts;
      topts.gamma = op_gamma;
      const auto result = purcell::tpe_optimize(objective, space, op_trials, topts);
      ensure_outdir(outdir);
      {
        auto os = open_csv(outdir, "history.csv");
        purcell::write_history_csv(result, space, os);
        std::ofstream st(outdir + "/state.json");
        st << purcell::serialize_tpe_state(result, space) << "\n";
      }
      manifest.write(outdir);
      std::printf("best objective %.6f at x = %.6f\n", result.best.objective,
                  result.best.point[0]);
      return kExitOk;
    }

    if (calc->parsed()) {
      nlohmann::json j;
      if (c_squid->parsed()) {
        j["inductance"] = purcell::squid_inductance(sq_flux, sq_ic1, sq_ic2);
      } else if (c_disp->parsed()) {
        const auto s = purcell::dispersive_shifts(ds_g, ds_fq, ds_alpha, ds_fr);
        j = {{"chi01", s.chi01},   {"chi12", s.chi12},
             {"chi23", s.chi23},   {"two_chi", s.two_chi},
             {"two_chi_prime", s.two_chi_prime}};
      } else if (c_purcell->parsed()) {
        j["rate"] = purcell::purcell_rate(pr_gqr, pr_gfr, pr_kf, pr_ff, pr_fq, pr_fr);
      } else if (c_kerr->parsed()) {
        j["shift"] = purcell::kerr_shift(kr_n, kr_alpha);
      } else {
        std::cerr << "calc requires a formula subcommand\n";
        return kExitConfig;
      }
      std::cout << j.dump(2) << "\n";
      return kExitOk;
    }
  } catch (const purcell::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const purcell::ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const purcell::IntegrationError& e) {
    std::cerr << "simulation failure: " << e.what() << "\n";
    return kExitSimulation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSimulation;
  }
  return kExitOk;
}
