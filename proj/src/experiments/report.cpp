#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "mcsle/errors.hpp"
#include "mcsle/experiments.hpp"

namespace mcsle {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

bool same(const Check& a, const Check& b) {
  return a.name == b.name && same(a.observed, b.observed) && same(a.expected, b.expected) &&
         same(a.tolerance, b.tolerance) && same(a.std_error, b.std_error) && a.rule == b.rule &&
         a.pass == b.pass && a.resolved == b.resolved;
}

bool same(const Fit& a, const Fit& b) {
  return a.name == b.name && same(a.slope, b.slope) && same(a.intercept, b.intercept) &&
         same(a.std_error, b.std_error) && same(a.ci_low, b.ci_low) && same(a.ci_high, b.ci_high);
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double read_num(const Json& j) { return j.is_number() ? j.get<double>() : kNaN; }

// table cells cannot contain a bare pipe
std::string md_cell(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '|') out += '\\';
    out += ch;
  }
  return out;
}

std::string md_value(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return num(v.get<double>());
  return dump_json(v, -1);
}

}  // namespace

std::string to_string(ReportStatus s) {
  switch (s) {
    case ReportStatus::pass: return "pass";
    case ReportStatus::fail: return "fail";
    case ReportStatus::inconclusive: return "inconclusive";
  }
  return "unknown";
}

int exit_code(ReportStatus s) {
  switch (s) {
    case ReportStatus::pass: return 0;
    case ReportStatus::fail: return 1;
    case ReportStatus::inconclusive: return 2;
  }
  return 1;
}

void Report::finalize() {
  bool failed = false, unresolved = false;
  for (const auto& c : checks) {
    if (!c.resolved) unresolved = true;
    else if (!c.pass) failed = true;
  }
  status = failed ? ReportStatus::fail : unresolved ? ReportStatus::inconclusive : ReportStatus::pass;
}

const Check* Report::find_check(const std::string& n) const {
  for (const auto& c : checks)
    if (c.name == n) return &c;
  return nullptr;
}

bool Report::operator==(const Report& o) const {
  if (name != o.name || inputs != o.inputs || columns != o.columns || status != o.status) return false;
  if (rows.size() != o.rows.size() || fits.size() != o.fits.size() || checks.size() != o.checks.size())
    return false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != o.rows[i].size()) return false;
    for (std::size_t k = 0; k < rows[i].size(); ++k)
      if (!same(rows[i][k], o.rows[i][k])) return false;
  }
  for (std::size_t i = 0; i < fits.size(); ++i)
    if (!same(fits[i], o.fits[i])) return false;
  for (std::size_t i = 0; i < checks.size(); ++i)
    if (!same(checks[i], o.checks[i])) return false;
  return true;
}

Fit weighted_fit(const std::string& name, std::span<const double> x, std::span<const double> y,
                 std::span<const double> var) {
  if (x.size() != y.size() || x.size() != var.size()) throw InvalidInput("weighted_fit: length mismatch");
  Fit f;
  f.name = name;
  f.slope = f.intercept = f.std_error = f.ci_low = f.ci_high = kNaN;
  double W = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(var[i] > 0.0)) throw InvalidInput("weighted_fit: variances must be positive");
    const double w = 1.0 / var[i];
    W += w;
    sx += w * x[i];
    sy += w * y[i];
  }
  if (x.size() < 2) return f;
  const double xm = sx / W, ym = sy / W;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = 1.0 / var[i];
    sxx += w * (x[i] - xm) * (x[i] - xm);
    sxy += w * (x[i] - xm) * (y[i] - ym);
  }
  if (!(sxx > 0.0)) return f;
  f.slope = sxy / sxx;
  f.intercept = ym - f.slope * xm;
  f.std_error = std::sqrt(1.0 / sxx);
  f.ci_low = f.slope - 1.959963984540054 * f.std_error;
  f.ci_high = f.slope + 1.959963984540054 * f.std_error;
  return f;
}

Fit survival_fit(const std::string& name, std::span<const double> t, std::span<const std::size_t> survivors,
                 std::size_t paths) {
  if (t.size() != survivors.size()) throw InvalidInput("survival_fit: length mismatch");
  std::vector<double> lx, ly, var;
  const double N = static_cast<double>(paths);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (survivors[i] == 0) continue;  // log 0: point carries no slope information
    const double k = static_cast<double>(survivors[i]);
    // shrunk estimate keeps the variance positive when every path survives
    const double pt = (k + 0.5) / (N + 1.0);
    lx.push_back(std::log(t[i]));
    ly.push_back(std::log(k / N));
    var.push_back((1.0 - pt) / (N * pt));
  }
  return weighted_fit(name, lx, ly, var);
}

const std::vector<std::string>& csv_schema(ExperimentName name) {
  static const std::vector<std::string> survival{"t", "survivors", "paths", "p_hat", "std_error",
                                                 "prediction", "exact", "exact_rel_error"};
  static const std::vector<std::string> density{"box", "m_lo", "m_hi", "g_lo", "g_hi", "is_estimate",
                                                "is_std_error", "killed_estimate", "killed_std_error",
                                                "z_score"};
  static const std::vector<std::string> tv{"t", "conditioned_paths", "survival", "ks", "ks_noise"};
  static const std::vector<std::string> bracket{"R", "t_long", "survivors_long", "p_long", "se_long",
                                                "t_short", "survivors_short", "p_short", "se_short"};
  static const std::vector<std::string> gue{"g", "empirical_cdf", "exact_cdf"};
  switch (name) {
    case ExperimentName::survival_exponent: return survival;
    case ExperimentName::density_relation: return density;
    case ExperimentName::tv_convergence: return tv;
    case ExperimentName::hsiz_tail_bracket: return bracket;
    case ExperimentName::gue_marginal: return gue;
  }
  return survival;
}

ReportFormat parse_report_format(const std::string& s) {
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  if (s == "markdown" || s == "md") return ReportFormat::markdown;
  throw InvalidConfig("unknown report format '" + s + "' (json, csv, markdown)");
}

std::string emit_report(const Report& r, ReportFormat f) {
  std::ostringstream out;
  switch (f) {
    case ReportFormat::json: {
      Json j = Json::object();
      j["name"] = r.name;
      j["status"] = to_string(r.status);
      j["inputs"] = r.inputs;
      j["columns"] = r.columns;
      Json rows = Json::array();
      for (const auto& row : r.rows) {
        Json jr = Json::array();
        for (double v : row) jr.push_back(v);
        rows.push_back(std::move(jr));
      }
      j["rows"] = std::move(rows);
      Json fits = Json::array();
      for (const auto& fit : r.fits)
        fits.push_back(Json{{"name", fit.name},           {"slope", fit.slope},   {"intercept", fit.intercept},
                            {"std_error", fit.std_error}, {"ci_low", fit.ci_low}, {"ci_high", fit.ci_high}});
      j["fits"] = std::move(fits);
      Json checks = Json::array();
      for (const auto& c : r.checks)
        checks.push_back(Json{{"name", c.name},           {"observed", c.observed}, {"expected", c.expected},
                              {"tolerance", c.tolerance}, {"std_error", c.std_error}, {"rule", c.rule},
                              {"pass", c.pass},           {"resolved", c.resolved}});
      j["checks"] = std::move(checks);
      out << dump_json(j) << '\n';
      break;
    }
    case ReportFormat::csv: {
      for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << r.columns[i];
      out << '\n';
      for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << num(row[i]);
        out << '\n';
      }
      break;
    }
    case ReportFormat::markdown: {
      out << "# " << r.name << "\n\nStatus: **" << to_string(r.status) << "**\n\n## Inputs\n\n";
      out << "| key | value |\n|---|---|\n";
      for (const auto& [k, v] : r.inputs.items()) {
        if (v.is_object()) {
          for (const auto& [k2, v2] : v.items()) out << "| " << k << "." << k2 << " | " << md_value(v2) << " |\n";
        } else {
          out << "| " << k << " | " << md_value(v) << " |\n";
        }
      }
      if (!r.columns.empty()) {
        out << "\n## Measurements\n\n|";
        for (const auto& c : r.columns) out << ' ' << c << " |";
        out << "\n|";
        for (std::size_t i = 0; i < r.columns.size(); ++i) out << "---|";
        out << '\n';
        for (const auto& row : r.rows) {
          out << '|';
          for (double v : row) out << ' ' << num(v) << " |";
          out << '\n';
        }
      }
      if (!r.fits.empty()) {
        out << "\n## Fits\n\n| fit | slope | std_error | 95% interval |\n|---|---|---|---|\n";
        for (const auto& fit : r.fits)
          out << "| " << fit.name << " | " << num(fit.slope) << " | " << num(fit.std_error) << " | ["
              << num(fit.ci_low) << ", " << num(fit.ci_high) << "] |\n";
      }
      if (!r.checks.empty()) {
        out << "\n## Checks\n\n| check | observed | expected | tolerance | std_error | rule | result |\n"
               "|---|---|---|---|---|---|---|\n";
        for (const auto& c : r.checks)
          out << "| " << c.name << " | " << num(c.observed) << " | " << num(c.expected) << " | "
              << num(c.tolerance) << " | " << num(c.std_error) << " | " << md_cell(c.rule) << " | "
              << (!c.resolved ? "inconclusive" : c.pass ? "pass" : "fail") << " |\n";
      }
      break;
    }
  }
  return out.str();
}

void write_report(const Report& r, ReportFormat f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open report output: " + path);
  out << emit_report(r, f);
  if (!out) throw IoError("failed writing report: " + path);
}

Report report_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw InvalidInput(std::string("report JSON: ") + e.what());
  }
  try {
    Report r;
    r.name = j.at("name").get<std::string>();
    const auto status = j.at("status").get<std::string>();
    if (status == "pass") r.status = ReportStatus::pass;
    else if (status == "fail") r.status = ReportStatus::fail;
    else if (status == "inconclusive") r.status = ReportStatus::inconclusive;
    else throw InvalidInput("report JSON: unknown status '" + status + "'");
    r.inputs = j.at("inputs");
    r.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& row : j.at("rows")) {
      std::vector<double> v;
      for (const auto& x : row) v.push_back(read_num(x));
      r.rows.push_back(std::move(v));
    }
    for (const auto& f : j.at("fits"))
      r.fits.push_back(Fit{f.at("name").get<std::string>(), read_num(f.at("slope")), read_num(f.at("intercept")),
                           read_num(f.at("std_error")), read_num(f.at("ci_low")), read_num(f.at("ci_high"))});
    for (const auto& c : j.at("checks"))
      r.checks.push_back(Check{c.at("name").get<std::string>(), read_num(c.at("observed")),
                               read_num(c.at("expected")), read_num(c.at("tolerance")),
                               read_num(c.at("std_error")), c.at("rule").get<std::string>(),
                               c.at("pass").get<bool>(), c.at("resolved").get<bool>()});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("report JSON: ") + e.what());
  }
}

}  // namespace mcsle
