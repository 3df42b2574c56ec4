// mcsle command-line driver.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcsle/density.hpp"
#include "mcsle/errors.hpp"
#include "mcsle/experiments.hpp"
#include "mcsle/json_format.hpp"
#include "mcsle/loewner.hpp"
#include "mcsle/parallel.hpp"
#include "mcsle/sde.hpp"

namespace {

constexpr int kUsageError = 3;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string out;
  std::string format;
  std::string config;
};

// Writes to --out when given, stdout otherwise.
void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw mcsle::IoError("cannot open output: " + g.out);
  f << text;
  if (!f) throw mcsle::IoError("failed writing output: " + g.out);
}

int run_report(const Globals& g, mcsle::ExperimentName name, std::map<std::string, std::string> overrides) {
  std::map<std::string, std::string> file;
  if (!g.config.empty()) file = mcsle::read_config_file(g.config);
  if (g.seed) overrides["seed"] = std::to_string(*g.seed);
  if (g.threads) overrides["threads"] = std::to_string(*g.threads);
  if (!g.format.empty()) overrides["format"] = g.format;
  if (!g.out.empty()) overrides["output"] = g.out;
  auto cfg = mcsle::make_config(name, file, overrides);
  const auto fmt = mcsle::parse_report_format(cfg.format);
  const auto report = mcsle::run_experiment(cfg);
  if (cfg.output.empty()) std::cout << mcsle::emit_report(report, fmt);
  else mcsle::write_report(report, fmt, cfg.output);
  std::cerr << report.name << ": " << mcsle::to_string(report.status) << '\n';
  return mcsle::exit_code(report.status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo toolkit for multichordal SLE, Dyson motion and Loewner chains"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Base RNG seed");
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads (default: MCSLE_THREADS or all cores)");
  app.add_option("--out", g.out, "Output file (default: stdout)");
  app.add_option("--format", g.format, "Output format: json | csv | markdown (simulate: csv | binary)");
  app.add_option("--config", g.config, "Flat key = value configuration file; flags override it")
      ->check(CLI::ExistingFile);

  // constants
  auto* c_cmd = app.add_subcommand("constants", "Exponents and normalisation constants");
  std::string c_kind = "mehta", c_method = "auto", c_partition = "pure_pair";
  double c_kappa = 4.0;
  int c_n = 1;
  std::size_t c_p = 2, c_samples = 1'000'000;
  c_cmd->add_option("--kind", c_kind, "mehta | j | exponents")->check(CLI::IsMember({"mehta", "j", "exponents"}));
  c_cmd->add_option("--kappa", c_kappa, "SLE parameter");
  c_cmd->add_option("--n", c_n, "Number of chords (j, exponents)");
  c_cmd->add_option("--p", c_p, "Number of points (mehta)");
  c_cmd->add_option("--samples", c_samples, "Monte-Carlo sample count");
  c_cmd->add_option("--method", c_method, "auto | closed_form | monte_carlo (mehta)")
      ->check(CLI::IsMember({"auto", "closed_form", "monte_carlo"}));
  c_cmd->add_option("--partition", c_partition, "pure_pair | gff (j)")->check(CLI::IsMember({"pure_pair", "gff"}));

  // simulate
  auto* s_cmd = app.add_subcommand("simulate", "Integrate the driving SDE and write the ensemble");
  std::string s_drift = "pure";
  double s_kappa = 4.0, s_dt = 1e-3, s_tend = 1.0;
  std::vector<double> s_x0{0.0, 1.0}, s_obs;
  std::size_t s_paths = 100;
  s_cmd->add_option("--drift", s_drift, "dyson | pure | gff")->check(CLI::IsMember({"dyson", "pure", "gff"}));
  s_cmd->add_option("--kappa", s_kappa, "SLE parameter");
  s_cmd->add_option("--x0", s_x0, "Initial points, comma separated")->delimiter(',');
  s_cmd->add_option("--dt", s_dt, "Maximum step");
  s_cmd->add_option("--t-end", s_tend, "Final time");
  s_cmd->add_option("--paths", s_paths, "Number of paths");
  s_cmd->add_option("--obs", s_obs, "Observation times, comma separated")->delimiter(',');

  // trace
  auto* t_cmd = app.add_subcommand("trace", "Trace a Loewner curve from a driving function");
  double t_kappa = 4.0, t_tend = 1.0;
  std::size_t t_steps = 1000, t_stride = 1;
  std::string t_driving;
  bool t_recover = false;
  t_cmd->add_option("--kappa", t_kappa, "Brownian driving sqrt(kappa) B when no --driving is given");
  t_cmd->add_option("--t-end", t_tend, "Capacity time");
  t_cmd->add_option("--steps", t_steps, "Uniform steps");
  t_cmd->add_option("--stride", t_stride, "Keep every stride-th tip");
  t_cmd->add_option("--driving", t_driving, "Driving CSV (t,w)")->check(CLI::ExistingFile);
  t_cmd->add_flag("--recover", t_recover, "Read --driving as a curve CSV (t,re,im) and write its driving function");

  // hsiz
  auto* h_cmd = app.add_subcommand("hsiz", "hsiz and hcap of a curve");
  std::string h_curve;
  double h_res = 0.0, h_delta = 0.05;
  h_cmd->add_option("curve", h_curve, "Curve CSV (t,re,im)")->required()->check(CLI::ExistingFile);
  h_cmd->add_option("--resolution", h_res, "Grid width (default: bounding-box side / 1000)");
  h_cmd->add_option("--delta", h_delta, "Slack for the hsiz / hcap comparison");

  // survival
  auto* v_cmd = app.add_subcommand("survival", "survival_exponent experiment with common flags");
  std::map<std::string, std::string> v_over;
  std::string v_kappa, v_n, v_drift, v_x0, v_tgrid, v_paths, v_dt;
  v_cmd->add_option("--kappa", v_kappa, "SLE parameter");
  v_cmd->add_option("--n", v_n, "Number of chords");
  v_cmd->add_option("--drift", v_drift, "pure | gff | dyson");
  v_cmd->add_option("--x0", v_x0, "Initial points, comma separated");
  v_cmd->add_option("--t-grid", v_tgrid, "Survival times, comma separated");
  v_cmd->add_option("--paths", v_paths, "Number of paths");
  v_cmd->add_option("--dt", v_dt, "Maximum step");

  // experiment
  auto* e_cmd = app.add_subcommand("experiment", "Run a named experiment and emit its report");
  std::string e_name;
  std::vector<std::string> e_set;
  e_cmd->add_option("name", e_name, "Experiment name")->required()->check(CLI::IsMember(mcsle::experiment_names()));
  e_cmd->add_option("--set", e_set, "Override a config key (key=value), repeatable");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }
  if (*seed_opt) g.seed = seed;
  if (*threads_opt) {
    g.threads = threads;
    mcsle::set_default_threads(threads);
  }

  try {
    if (*c_cmd) {
      const auto params = mcsle::derived_parameters(c_kappa);
      if (c_kind == "exponents") {
        const auto e = mcsle::exponents(c_n, c_kappa);
        mcsle::Json j{{"kappa", c_kappa},      {"n", c_n},
                      {"arm", e.arm},          {"lambda_p", e.lambda_p},
                      {"lambda_prime_2n", e.lambda_prime_2n}, {"beta", params.beta},
                      {"b", params.b},         {"c", params.c}};
        emit(g, mcsle::dump_json(j) + "\n");
        return 0;
      }
      mcsle::MonteCarloOptions mo;
      mo.samples = c_samples;
      mo.seed = g.seed.value_or(0);
      mo.threads = g.threads.value_or(0);
      mcsle::ConstantEstimate est;
      if (c_kind == "mehta") {
        auto m = c_method == "closed_form"   ? mcsle::MehtaMethod::closed_form
                 : c_method == "monte_carlo" ? mcsle::MehtaMethod::monte_carlo
                                             : mcsle::MehtaMethod::automatic;
        est = mcsle::mehta_constant(c_p, params, m, mo);
      } else {
        auto z = c_partition == "gff" ? mcsle::z_gff(static_cast<std::size_t>(c_n)) : mcsle::z_pure_pair(params);
        est = mcsle::j_constant(z, params, mo);
      }
      emit(g, est.to_json() + "\n");
      return 0;
    }

    if (*s_cmd) {
      const auto params = mcsle::derived_parameters(s_kappa);
      const mcsle::BoundaryConfig x0(s_x0);
      auto spec = s_drift == "dyson" ? mcsle::DriftSpec::dyson(params)
                  : s_drift == "gff" ? mcsle::DriftSpec::gff()
                                     : mcsle::DriftSpec::pure(mcsle::z_pure_pair(params), params);
      mcsle::SimConfig cfg;
      cfg.dt = s_dt;
      cfg.t_end = s_tend;
      cfg.seed = g.seed.value_or(0);
      cfg.paths = s_paths;
      cfg.observation_times = s_obs;
      cfg.threads = g.threads.value_or(0);
      const auto ens = mcsle::simulate(spec, x0, cfg);
      const std::string fmt = g.format.empty() ? "csv" : g.format;
      std::ostringstream buf;
      if (fmt == "csv") mcsle::write_ensemble_csv(ens, buf);
      else if (fmt == "binary") mcsle::write_ensemble_binary(ens, buf);
      else throw mcsle::InvalidConfig("simulate writes csv or binary, not '" + fmt + "'");
      emit(g, buf.str());
      return 0;
    }

    if (*t_cmd) {
      std::ostringstream buf;
      if (t_recover) {
        if (t_driving.empty()) throw mcsle::InvalidConfig("--recover needs --driving <curve csv>");
        mcsle::write_driving_csv(mcsle::recover_driving(mcsle::read_curve_csv(t_driving)), buf);
      } else {
        auto d = t_driving.empty() ? mcsle::brownian_driving(t_kappa, t_tend, t_steps, g.seed.value_or(0))
                                   : mcsle::read_driving_csv(t_driving);
        mcsle::TraceOptions opts;
        opts.stride = t_stride;
        mcsle::write_curve_csv(mcsle::trace_curve(d, opts), buf);
      }
      emit(g, buf.str());
      return 0;
    }

    if (*h_cmd) {
      const auto curve = mcsle::read_curve_csv(h_curve);
      const double res = h_res > 0.0 ? h_res : mcsle::hsiz_default_resolution(curve);
      const auto rep = mcsle::hsiz_hcap_check(curve, res, h_delta);
      mcsle::Json j{{"hsiz", rep.hsiz},        {"hcap", rep.hcap},         {"error_bound", rep.error_bound},
                    {"resolution", res},       {"delta", h_delta},         {"lower_ok", rep.lower_ok},
                    {"upper_ok", rep.upper_ok}};
      emit(g, mcsle::dump_json(j) + "\n");
      return 0;
    }

    if (*v_cmd) {
      const std::pair<const char*, std::string*> keys[] = {{"kappa", &v_kappa}, {"n", &v_n},         {"drift", &v_drift},
                                                           {"x0", &v_x0},       {"t_grid", &v_tgrid}, {"paths", &v_paths},
                                                           {"dt", &v_dt}};
      for (const auto& [k, v] : keys)
        if (!v->empty()) v_over[k] = *v;
      return run_report(g, mcsle::ExperimentName::survival_exponent, v_over);
    }

    if (*e_cmd) {
      std::map<std::string, std::string> over;
      for (const auto& kv : e_set) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw mcsle::InvalidConfig("--set expects key=value, got '" + kv + "'");
        over[kv.substr(0, eq)] = kv.substr(eq + 1);
      }
      over["name"] = e_name;
      return run_report(g, mcsle::parse_experiment_name(e_name), over);
    }
  } catch (const mcsle::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}
