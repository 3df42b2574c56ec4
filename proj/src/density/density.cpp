#include "mcsle/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "mcsle/errors.hpp"
#include "mcsle/json_format.hpp"
#include "mcsle/parallel.hpp"
#include "mcsle/random.hpp"

namespace mcsle {

namespace {

constexpr std::size_t kBlock = 1 << 16;

struct BlockSums {
  double sum = 0.0;
  double sumsq = 0.0;
  std::size_t n = 0;
};

double standard_error(double sum, double sumsq, std::size_t n) {
  if (n < 2) return 0.0;
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(0.0, (sumsq / static_cast<double>(n) - mean * mean)) *
                     static_cast<double>(n) / static_cast<double>(n - 1);
  return std::sqrt(var / static_cast<double>(n));
}

double log_factorial(std::size_t p) { return std::lgamma(static_cast<double>(p) + 1.0); }

void require_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidParameter("time must be positive");
}

}  // namespace

std::string to_string(ConstantMethod m) {
  switch (m) {
    case ConstantMethod::closed_form: return "closed_form";
    case ConstantMethod::quadrature: return "quadrature";
    case ConstantMethod::monte_carlo: return "monte_carlo";
  }
  return "?";
}

std::string ConstantEstimate::to_json() const {
  Json j;
  j["name"] = name;
  j["value"] = value;
  j["std_error"] = std_error;
  j["method"] = to_string(method);
  Json in = Json::object();
  for (const auto& [k, v] : inputs) in[k] = v;
  j["inputs"] = in;
  if (!warnings.empty()) j["warnings"] = warnings;
  return dump_json(j);
}

ConstantEstimate ordered_gaussian_integral(const std::string& name, std::size_t p,
                                           const std::function<double(std::span<const double>)>& log_h,
                                           double degree, const MonteCarloOptions& opts) {
  if (p == 0) throw InvalidParameter("dimension must be positive");
  if (opts.samples < 2) throw InvalidParameter("need at least two Monte-Carlo samples");
  double s2 = opts.proposal_variance;
  if (s2 <= 0.0) s2 = std::max(1.0, 1.0 + degree / static_cast<double>(p));
  const double sigma = std::sqrt(s2);
  const double pd = static_cast<double>(p);
  // log of 1 / (p! q(z)) up to the exp(-|z|^2 / (2 s2)) part, which is folded in per sample.
  const double log_norm = 0.5 * pd * std::log(2.0 * std::numbers::pi * s2) - log_factorial(p);

  const std::size_t blocks = (opts.samples + kBlock - 1) / kBlock;
  std::vector<BlockSums> sums(blocks);
  parallel_for(
      blocks,
      [&](std::size_t b) {
        const NormalStream noise(opts.seed, b);
        const std::size_t n = std::min(kBlock, opts.samples - b * kBlock);
        std::vector<double> z(p);
        BlockSums s;
        for (std::size_t i = 0; i < n; ++i) {
          noise.fill(i, z);
          double r2 = 0.0;
          for (double& v : z) {
            v *= sigma;
            r2 += v * v;
          }
          std::sort(z.begin(), z.end());
          const double lw = log_h(z) - 0.5 * r2 + 0.5 * r2 / s2 + log_norm;
          const double w = std::exp(lw);
          s.sum += w;
          s.sumsq += w * w;
        }
        s.n = n;
        sums[b] = s;
      },
      opts.threads);

  double sum = 0.0, sumsq = 0.0;
  std::size_t n = 0;
  double se_quarter = -1.0;
  const std::size_t quarter = blocks / 4;
  for (std::size_t b = 0; b < blocks; ++b) {
    sum += sums[b].sum;
    sumsq += sums[b].sumsq;
    n += sums[b].n;
    if (quarter > 0 && b + 1 == quarter) se_quarter = standard_error(sum, sumsq, n);
  }
  ConstantEstimate est;
  est.name = name;
  est.method = ConstantMethod::monte_carlo;
  est.value = sum / static_cast<double>(n);
  est.std_error = standard_error(sum, sumsq, n);
  est.inputs["p"] = pd;
  est.inputs["samples"] = static_cast<double>(opts.samples);
  est.inputs["seed"] = static_cast<double>(opts.seed);
  est.inputs["proposal_variance"] = s2;
  // With four times the samples the error should halve; a much weaker decrease means
  // the weights have (near) infinite variance.
  if (se_quarter > 0.0 && est.std_error > 0.75 * se_quarter)
    est.warnings.push_back("heavy-tail suspected");
  return est;
}

double mehta_closed_form_kappa4(std::size_t p) {
  if (p == 0) throw InvalidParameter("p must be positive");
  double log_v = 0.5 * static_cast<double>(p) * std::log(2.0 * std::numbers::pi);
  for (std::size_t j = 1; j < p; ++j) log_v += log_factorial(j);
  return std::exp(log_v);
}

ConstantEstimate mehta_constant(std::size_t p, const ModelParams& params, MehtaMethod method,
                                const MonteCarloOptions& opts) {
  derived_parameters(params.kappa);
  if (p == 0) throw InvalidParameter("p must be positive");
  const bool closed = params.kappa == 4.0;
  if (method == MehtaMethod::closed_form && !closed)
    throw InvalidParameter("the Mehta constant has a closed form only at kappa = 4");
  if (method != MehtaMethod::monte_carlo && (closed || p == 1)) {
    ConstantEstimate e;
    e.name = "mehta_I";
    e.value = p == 1 ? std::sqrt(2.0 * std::numbers::pi) : mehta_closed_form_kappa4(p);
    e.method = ConstantMethod::closed_form;
    e.inputs = {{"p", static_cast<double>(p)}, {"kappa", params.kappa}};
    return e;
  }
  const double v = 8.0 / params.kappa;
  const double pd = static_cast<double>(p);
  ConstantEstimate e = ordered_gaussian_integral(
      "mehta_I", p, [v](std::span<const double> x) { return log_f_v(x, v); },
      v * pd * (pd - 1.0) / 2.0, opts);
  e.inputs["kappa"] = params.kappa;
  return e;
}

double measured_homogeneity(const PartitionFunction& z, std::size_t p) {
  std::vector<double> x(p), y(p);
  for (std::size_t i = 0; i < p; ++i) {
    x[i] = static_cast<double>(i + 1);
    y[i] = 2.0 * x[i];
  }
  return (z.log_value(y) - z.log_value(x)) / std::numbers::ln2;
}

ConstantEstimate j_constant(const PartitionFunction& z_alpha, const ModelParams& params,
                            const MonteCarloOptions& opts) {
  require_multichordal(params);
  const std::size_t p = z_alpha.arity();
  if (p == 0 || p % 2 != 0) throw InvalidConfig("j_constant needs a partition function of even arity");
  const double v = 6.0 / params.kappa;
  const double pd = static_cast<double>(p);
  const double degree = v * pd * (pd - 1.0) / 2.0 + measured_homogeneity(z_alpha, p);
  ConstantEstimate e = ordered_gaussian_integral(
      "j_" + z_alpha.label(), p,
      [v, &z_alpha](std::span<const double> x) { return log_f_v(x, v) + z_alpha.log_value(x); },
      degree, opts);
  e.inputs["kappa"] = params.kappa;
  return e;
}

bool asymptotic_regime(double t, std::span<const double> x) {
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return std::sqrt(r2) <= 0.1 * std::sqrt(t);
}

double dyson_density_asymptotic(double t, const BoundaryConfig& y, const ModelParams& params,
                                double mehta_I) {
  require_time(t);
  if (!(mehta_I > 0.0)) throw InvalidParameter("normalization constant must be positive");
  const double kt = params.kappa * t;
  double r2 = 0.0;
  for (double v : y.points()) r2 += v * v;
  const double lambda = dyson_exponent(y.size(), params.kappa);
  const double log_d = -std::log(mehta_I) - 0.5 * lambda * std::log(kt) +
                       log_f_v(y.points(), 8.0 / params.kappa) - r2 / (2.0 * kt);
  return std::exp(log_d);
}

double dyson_density_asymptotic(double t, const BoundaryConfig& y, const ModelParams& params) {
  return dyson_density_asymptotic(t, y, params, mehta_constant(y.size(), params).value);
}

double multichordal_density(double t, const BoundaryConfig& x, const BoundaryConfig& y,
                            const GreenFunction& green, const ModelParams& params, double mehta_I) {
  if (x.size() != y.size()) throw InvalidConfig("x and y must have the same arity");
  return dyson_density_asymptotic(t, y, params, mehta_I) *
         std::exp(green.log_value(x.points()) - green.log_value(y.points()));
}

double survival_prediction(const BoundaryConfig& x, double t, const GreenFunction& green,
                           const ModelParams& params, double mehta_I, double j_alpha) {
  require_time(t);
  if (!(mehta_I > 0.0) || !(j_alpha > 0.0))
    throw InvalidParameter("survival_prediction needs positive constants I and J");
  const double a = green.homogeneity_degree();
  return j_alpha / mehta_I * green.value(x) * std::pow(params.kappa * t, -0.5 * a);
}

double pure_pair_survival_exact(double gap, double t, const ModelParams& params) {
  require_time(t);
  if (!(gap > 0.0)) throw InvalidParameter("gap must be positive");
  const double nu = 0.5 * arm_exponent(1, params.kappa);
  return boost::math::gamma_p(nu, gap * gap / (4.0 * params.kappa * t));
}

double dyson_origin_gap_cdf(double gap, double t, const ModelParams& params) {
  require_time(t);
  if (gap <= 0.0) return 0.0;
  return boost::math::gamma_p(0.5 * (params.beta + 1.0), gap * gap / (4.0 * params.kappa * t));
}

void SampleSet::push(std::span<const double> x) {
  if (p == 0) p = x.size();
  if (x.size() != p) throw InvalidInput("sample dimension mismatch");
  data.insert(data.end(), x.begin(), x.end());
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidInput("KS needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_statistic(std::vector<double> a, const std::function<double(double)>& cdf) {
  if (a.empty()) throw InvalidInput("KS needs a nonempty sample");
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double kolmogorov_tail(double lambda) {
  if (lambda <= 0.2) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

std::vector<double> functional(const SampleSet& s, CompareMode mode, std::size_t index) {
  if (s.size() == 0) throw InvalidInput("empty sample set");
  const std::size_t need = mode == CompareMode::ks_gap ? index + 2 : index + 1;
  if (s.p < need) throw InvalidInput("functional index out of range for sample dimension");
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto x = s[i];
    out[i] = mode == CompareMode::ks_gap ? x[index + 1] - x[index] : x[index];
  }
  return out;
}

double empirical_compare(const SampleSet& a, const SampleSet& b, CompareMode mode, std::size_t index) {
  return ks_statistic(functional(a, mode, index), functional(b, mode, index));
}

double empirical_compare(const SampleSet& a, const std::function<double(double)>& cdf,
                         CompareMode mode, std::size_t index) {
  return ks_statistic(functional(a, mode, index), cdf);
}

DensityEstimate kde(const SampleSet& samples, std::size_t total_count, const SampleSet& at) {
  const std::size_t n = samples.size();
  if (n < 2) throw InvalidInput("KDE needs at least two samples");
  if (total_count < n) throw InvalidParameter("total_count must include every sample");
  if (at.p != samples.p) throw InvalidInput("evaluation points have the wrong dimension");
  const std::size_t d = samples.p;
  DensityEstimate est;
  est.sample_points = at;
  est.sample_size = n;
  est.bandwidth.resize(d);
  const double factor = std::pow(4.0 / ((static_cast<double>(d) + 2.0) * static_cast<double>(n)),
                                 1.0 / (static_cast<double>(d) + 4.0));
  for (std::size_t j = 0; j < d; ++j) {
    double m = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      m += samples[i][j];
      m2 += samples[i][j] * samples[i][j];
    }
    m /= static_cast<double>(n);
    const double sd = std::sqrt(std::max(0.0, m2 / static_cast<double>(n) - m * m));
    est.bandwidth[j] = std::max(sd, 1e-12) * factor;
  }
  double norm = 1.0 / static_cast<double>(total_count);
  for (double h : est.bandwidth) norm /= h * std::sqrt(2.0 * std::numbers::pi);
  est.values.assign(at.size(), 0.0);
  for (std::size_t k = 0; k < at.size(); ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double e = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double u = (at[k][j] - samples[i][j]) / est.bandwidth[j];
        e += u * u;
      }
      if (e < 80.0) s += std::exp(-0.5 * e);
    }
    est.values[k] = s * norm;
  }
  return est;
}

}  // namespace mcsle
