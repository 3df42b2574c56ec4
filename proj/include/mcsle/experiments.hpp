#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcsle/json_format.hpp"
#include "mcsle/partition.hpp"

namespace mcsle {

enum class ExperimentName { survival_exponent, density_relation, tv_convergence, hsiz_tail_bracket, gue_marginal };

std::string to_string(ExperimentName n);
ExperimentName parse_experiment_name(const std::string& s);
const std::vector<std::string>& experiment_names();

struct ExperimentConfig {
  ExperimentName name = ExperimentName::survival_exponent;
  double kappa = 4.0;
  int n = 1;
  std::string drift = "pure";  // pure | gff | dyson
  std::vector<double> x0{0.0, 1.0};
  std::vector<double> t_grid{25, 50, 100, 200, 400};
  std::vector<double> r_grid{80, 113, 160, 226};
  double s = 1.0;       // snapshot time for tv_convergence
  double t_obs = 1.0;   // observation time for density_relation and gue_marginal
  std::size_t paths = 200'000;
  std::size_t reference_paths = 100'000;
  std::uint64_t seed = 1;
  double dt = 0.05;
  double reference_dt = 0.001;  // step cap for Dyson reference ensembles
  double theta = 0.1;
  double collision_eps = 0.0;  // 0 means 1e-6 times the initial diameter
  std::size_t threads = 0;
  std::size_t constant_samples = 1'000'000;

  double slope_tol = 0.05;
  double ks_tol = 0.01;
  double z_tol = 3.0;
  double box_pass_fraction = 0.9;
  double survival_floor = 0.01;
  double tv_final_tol = 0.05;
  double ks_critical = 1.358;  // 95% Kolmogorov quantile for the within-noise rule
  double bracket_slope_tol = 0.15;
  std::size_t min_fit_paths = 1000;

  std::string output;
  std::string format = "json";

  /// API-only: pure partition function for drift = pure with n >= 2.
  std::optional<PartitionFunction> z_alpha;

  /// Defaults for one experiment (the members above are the survival_exponent defaults).
  static ExperimentConfig defaults(ExperimentName name);
  /// Sets one key from its text form; throws InvalidConfig on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  void validate() const;
  /// Echo of every setting, used verbatim in reports.
  Json to_json() const;
};

/// Flat "key = value" lines; '#' starts a comment. Throws IoError / InvalidConfig.
std::map<std::string, std::string> read_config_file(const std::string& path);
std::map<std::string, std::string> parse_config_text(const std::string& text);
/// Defaults for the file's `name` (or `fallback`), then the file, then the overrides.
ExperimentConfig make_config(ExperimentName fallback, const std::map<std::string, std::string>& file,
                             const std::map<std::string, std::string>& overrides);

enum class ReportStatus { pass, fail, inconclusive };
std::string to_string(ReportStatus s);

struct Check {
  std::string name;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  double std_error = 0.0;
  std::string rule;
  bool pass = false;
  bool resolved = true;
  friend bool operator==(const Check&, const Check&) = default;
};

struct Fit {
  std::string name;
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;  // 95% normal interval
  double ci_high = 0.0;
  friend bool operator==(const Fit&, const Fit&) = default;
};

struct Report {
  std::string name;
  Json inputs = Json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<Fit> fits;
  std::vector<Check> checks;
  ReportStatus status = ReportStatus::pass;

  /// fail if a resolved check fails, else inconclusive if any check is unresolved.
  void finalize();
  const Check* find_check(const std::string& name) const;
  bool operator==(const Report& o) const;
};

/// Weighted least squares of y on x with weights 1/var.
Fit weighted_fit(const std::string& name, std::span<const double> x, std::span<const double> y,
                 std::span<const double> var);

/// log-log fit with per-point binomial variances var(log p) = (1 - p) / (N p).
Fit survival_fit(const std::string& name, std::span<const double> t, std::span<const std::size_t> survivors,
                 std::size_t paths);

/// CSV column layout declared for each experiment.
const std::vector<std::string>& csv_schema(ExperimentName name);

Report run_experiment(const ExperimentConfig& cfg);

enum class ReportFormat { json, csv, markdown };
ReportFormat parse_report_format(const std::string& s);
std::string emit_report(const Report& r, ReportFormat f);
void write_report(const Report& r, ReportFormat f, const std::string& path);
Report report_from_json(const std::string& text);

/// CLI exit code: 0 pass, 1 fail, 2 inconclusive.
int exit_code(ReportStatus s);

}  // namespace mcsle
