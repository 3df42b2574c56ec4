#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mcsle/errors.hpp"
#include "mcsle/experiments.hpp"

namespace mcsle {

namespace {

const std::vector<std::pair<ExperimentName, std::string>>& name_table() {
  static const std::vector<std::pair<ExperimentName, std::string>> t{
      {ExperimentName::survival_exponent, "survival_exponent"},
      {ExperimentName::density_relation, "density_relation"},
      {ExperimentName::tv_convergence, "tv_convergence"},
      {ExperimentName::hsiz_tail_bracket, "hsiz_tail_bracket"},
      {ExperimentName::gue_marginal, "gue_marginal"},
  };
  return t;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  std::string s = trim(v);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(out))
    throw InvalidConfig("config key '" + key + "': not a finite number: '" + v + "'");
  return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::string s = trim(v);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec == std::errc() && ptr == s.data() + s.size() && !s.empty()) return out;
  // allow 2e5 style counts when they are exact integers
  double d = parse_double(key, v);
  if (d < 0 || d != std::floor(d) || d > 1e18)
    throw InvalidConfig("config key '" + key + "': not a non-negative integer: '" + v + "'");
  return static_cast<std::uint64_t>(d);
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  if (out.empty()) throw InvalidConfig("config key '" + key + "': empty list");
  return out;
}

bool increasing(const std::vector<double>& g) {
  for (std::size_t i = 1; i < g.size(); ++i)
    if (!(g[i] > g[i - 1])) return false;
  return true;
}

}  // namespace

std::string to_string(ExperimentName n) {
  for (const auto& [k, s] : name_table())
    if (k == n) return s;
  return "unknown";
}

ExperimentName parse_experiment_name(const std::string& s) {
  for (const auto& [k, name] : name_table())
    if (name == s) return k;
  throw InvalidConfig("unknown experiment '" + s + "'");
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& e : name_table()) v.push_back(e.second);
    return v;
  }();
  return names;
}

ExperimentConfig ExperimentConfig::defaults(ExperimentName name) {
  ExperimentConfig c;
  c.name = name;
  switch (name) {
    case ExperimentName::survival_exponent:
      break;
    case ExperimentName::density_relation:
      c.paths = 100'000;
      c.reference_paths = 100'000;
      c.dt = 0.01;
      break;
    case ExperimentName::tv_convergence:
      c.t_grid = {4, 16, 64, 256};
      c.paths = 100'000;
      c.reference_paths = 100'000;
      c.dt = 0.05;
      break;
    case ExperimentName::hsiz_tail_bracket:
      c.paths = 200'000;
      c.dt = 1.0;
      break;
    case ExperimentName::gue_marginal:
      c.drift = "dyson";
      c.x0 = {-1e-6, 1e-6};
      c.paths = 100'000;
      c.dt = 0.001;
      break;
  }
  return c;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "name") name = parse_experiment_name(v);
  else if (key == "kappa") kappa = parse_double(key, v);
  else if (key == "n") n = static_cast<int>(parse_uint(key, v));
  else if (key == "drift") {
    if (v != "pure" && v != "gff" && v != "dyson")
      throw InvalidConfig("config key 'drift': expected pure, gff or dyson, got '" + v + "'");
    drift = v;
  } else if (key == "x0") x0 = parse_list(key, v);
  else if (key == "t_grid") t_grid = parse_list(key, v);
  else if (key == "r_grid") r_grid = parse_list(key, v);
  else if (key == "s") s = parse_double(key, v);
  else if (key == "t_obs") t_obs = parse_double(key, v);
  else if (key == "paths") paths = parse_uint(key, v);
  else if (key == "reference_paths") reference_paths = parse_uint(key, v);
  else if (key == "seed") seed = parse_uint(key, v);
  else if (key == "dt") dt = parse_double(key, v);
  else if (key == "reference_dt") reference_dt = parse_double(key, v);
  else if (key == "theta") theta = parse_double(key, v);
  else if (key == "collision_eps") collision_eps = parse_double(key, v);
  else if (key == "threads") threads = parse_uint(key, v);
  else if (key == "constant_samples") constant_samples = parse_uint(key, v);
  else if (key == "slope_tol") slope_tol = parse_double(key, v);
  else if (key == "ks_tol") ks_tol = parse_double(key, v);
  else if (key == "z_tol") z_tol = parse_double(key, v);
  else if (key == "box_pass_fraction") box_pass_fraction = parse_double(key, v);
  else if (key == "survival_floor") survival_floor = parse_double(key, v);
  else if (key == "tv_final_tol") tv_final_tol = parse_double(key, v);
  else if (key == "ks_critical") ks_critical = parse_double(key, v);
  else if (key == "bracket_slope_tol") bracket_slope_tol = parse_double(key, v);
  else if (key == "min_fit_paths") min_fit_paths = parse_uint(key, v);
  else if (key == "output") output = v;
  else if (key == "format") {
    parse_report_format(v);
    format = v;
  } else
    throw InvalidConfig("unknown config key '" + key + "'");
}

void ExperimentConfig::validate() const {
  if (!(kappa > 0.0 && kappa < 8.0)) throw InvalidConfig("kappa must lie in (0, 8)");
  if (n < 1) throw InvalidConfig("n must be at least 1");
  if (x0.size() < 2) throw InvalidConfig("x0 needs at least two points");
  if (!increasing(x0)) throw InvalidConfig("x0 must be strictly increasing");
  if (t_grid.empty() || !increasing(t_grid) || t_grid.front() <= 0.0)
    throw InvalidConfig("t_grid must be positive and strictly increasing");
  if (r_grid.empty() || !increasing(r_grid) || r_grid.front() <= 0.0)
    throw InvalidConfig("r_grid must be positive and strictly increasing");
  if (!(s > 0.0) || !(t_obs > 0.0)) throw InvalidConfig("s and t_obs must be positive");
  if (!(dt > 0.0) || !(reference_dt > 0.0) || !(theta > 0.0))
    throw InvalidConfig("dt, reference_dt and theta must be positive");
  if (collision_eps < 0.0) throw InvalidConfig("collision_eps must be non-negative");
  if (paths == 0 || reference_paths == 0) throw InvalidConfig("ensemble sizes must be positive");
  for (double tol : {slope_tol, ks_tol, z_tol, tv_final_tol, ks_critical, bracket_slope_tol})
    if (!(tol > 0.0)) throw InvalidConfig("tolerances must be positive");
  if (!(box_pass_fraction > 0.0 && box_pass_fraction <= 1.0))
    throw InvalidConfig("box_pass_fraction must lie in (0, 1]");
  if (!(survival_floor >= 0.0 && survival_floor < 1.0))
    throw InvalidConfig("survival_floor must lie in [0, 1)");

  const bool fit = name == ExperimentName::survival_exponent || name == ExperimentName::hsiz_tail_bracket;
  if (fit && paths < min_fit_paths)
    throw InvalidConfig("exponent fits need at least " + std::to_string(min_fit_paths) + " paths");
  if (fit && (name == ExperimentName::survival_exponent ? t_grid.size() : r_grid.size()) < 2)
    throw InvalidConfig("exponent fits need at least two grid points");

  const std::size_t p = x0.size();
  if (drift == "gff" && kappa != 4.0) throw InvalidConfig("gff drift requires kappa = 4");
  if (drift != "dyson" && p != static_cast<std::size_t>(2 * n))
    throw InvalidConfig("x0 must have 2n points for the multichordal drift");
  if (drift == "pure" && n > 1 && !z_alpha)
    throw InvalidConfig("pure drift with n >= 2 needs a partition-function handle (use drift = gff at kappa = 4)");
  if (drift == "pure" && kappa > 4.0) throw InvalidConfig("multichordal drift requires kappa <= 4");

  switch (name) {
    case ExperimentName::survival_exponent:
    case ExperimentName::hsiz_tail_bracket:
      break;
    case ExperimentName::density_relation:
      if (drift != "pure" || n != 1) throw InvalidConfig("density_relation runs one chord with drift = pure");
      break;
    case ExperimentName::tv_convergence:
      if (drift == "dyson") throw InvalidConfig("tv_convergence needs a multichordal drift");
      if (!(t_grid.front() > s)) throw InvalidConfig("tv_convergence needs s < t_grid");
      break;
    case ExperimentName::gue_marginal:
      if (drift != "dyson" || p != 2) throw InvalidConfig("gue_marginal runs two-point Dyson motion");
      break;
  }
}

Json ExperimentConfig::to_json() const {
  Json j = Json::object();
  j["name"] = to_string(name);
  j["kappa"] = kappa;
  j["n"] = n;
  j["drift"] = z_alpha && drift == "pure" ? "pure:" + z_alpha->label() : drift;
  j["x0"] = x0;
  switch (name) {
    case ExperimentName::survival_exponent:
    case ExperimentName::tv_convergence:
      j["t_grid"] = t_grid;
      break;
    case ExperimentName::hsiz_tail_bracket:
      j["r_grid"] = r_grid;
      break;
    default:
      break;
  }
  if (name == ExperimentName::tv_convergence) j["s"] = s;
  if (name == ExperimentName::density_relation || name == ExperimentName::gue_marginal) j["t_obs"] = t_obs;
  j["paths"] = paths;
  if (name == ExperimentName::density_relation || name == ExperimentName::tv_convergence)
    j["reference_paths"] = reference_paths;
  j["seed"] = seed;
  j["dt"] = dt;
  if (name == ExperimentName::density_relation || name == ExperimentName::tv_convergence)
    j["reference_dt"] = reference_dt;
  j["theta"] = theta;
  j["collision_eps"] = collision_eps;
  if (name == ExperimentName::survival_exponent) j["constant_samples"] = constant_samples;
  Json tol = Json::object();
  switch (name) {
    case ExperimentName::survival_exponent:
      tol["slope_tol"] = slope_tol;
      tol["min_fit_paths"] = min_fit_paths;
      break;
    case ExperimentName::density_relation:
      tol["z_tol"] = z_tol;
      tol["box_pass_fraction"] = box_pass_fraction;
      break;
    case ExperimentName::tv_convergence:
      tol["tv_final_tol"] = tv_final_tol;
      tol["ks_critical"] = ks_critical;
      tol["survival_floor"] = survival_floor;
      break;
    case ExperimentName::hsiz_tail_bracket:
      tol["bracket_slope_tol"] = bracket_slope_tol;
      tol["min_fit_paths"] = min_fit_paths;
      break;
    case ExperimentName::gue_marginal:
      tol["ks_tol"] = ks_tol;
      break;
  }
  j["tolerances"] = tol;
  return j;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidConfig("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw InvalidConfig("config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

ExperimentConfig make_config(ExperimentName fallback, const std::map<std::string, std::string>& file,
                             const std::map<std::string, std::string>& overrides) {
  ExperimentName name = fallback;
  if (auto it = file.find("name"); it != file.end()) name = parse_experiment_name(trim(it->second));
  if (auto it = overrides.find("name"); it != overrides.end()) name = parse_experiment_name(trim(it->second));
  ExperimentConfig cfg = ExperimentConfig::defaults(name);
  for (const auto* m : {&file, &overrides})
    for (const auto& [k, v] : *m)
      if (k != "name") cfg.set(k, v);
  return cfg;
}

}  // namespace mcsle
