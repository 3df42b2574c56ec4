#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mcsle/core.hpp"
#include "mcsle/partition.hpp"

namespace mcsle {

enum class ConstantMethod { closed_form, quadrature, monte_carlo };
std::string to_string(ConstantMethod m);

struct ConstantEstimate {
  std::string name;
  double value = 0.0;
  double std_error = 0.0;  // zero iff closed form
  ConstantMethod method = ConstantMethod::closed_form;
  std::map<std::string, double> inputs;
  std::vector<std::string> warnings;

  /// {name, value, std_error, method, inputs[, warnings]} with 17 significant digits.
  std::string to_json() const;
};

struct MonteCarloOptions {
  std::size_t samples = 1'000'000;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  /// Proposal variance for the Gaussian importance sampler; 0 picks 1 + degree / p,
  /// which minimises the weight variance for an integrand homogeneous of that degree.
  double proposal_variance = 0.0;
};

/// Monte-Carlo estimate of int over ordered tuples of h(x) exp(-|x|^2 / 2), where
/// log_h is evaluated on sorted Gaussian draws and `degree` is the homogeneity of h.
ConstantEstimate ordered_gaussian_integral(const std::string& name, std::size_t p,
                                           const std::function<double(std::span<const double>)>& log_h,
                                           double degree, const MonteCarloOptions& opts);

enum class MehtaMethod { automatic, closed_form, monte_carlo };

/// I = int over X_p of f_{8/kappa}(x) exp(-|x|^2 / 2) dx. Closed form
/// (2 pi)^{p/2} prod_{j<p} j! exists only at kappa = 4.
ConstantEstimate mehta_constant(std::size_t p, const ModelParams& params,
                                MehtaMethod method = MehtaMethod::automatic,
                                const MonteCarloOptions& opts = {});
double mehta_closed_form_kappa4(std::size_t p);

/// J = int over X_{2n} of f_{6/kappa}(x) Z_alpha(x) exp(-|x|^2 / 2) dx. Adds the
/// warning "heavy-tail suspected" when the standard error fails to shrink like 1/sqrt(N).
ConstantEstimate j_constant(const PartitionFunction& z_alpha, const ModelParams& params,
                            const MonteCarloOptions& opts = {});

/// Homogeneity degree of z measured as log2(z(2x) / z(x)) at x = (1, 2, ..., p).
double measured_homogeneity(const PartitionFunction& z, std::size_t p);

/// Leading term I^{-1} (kappa t)^{-Lambda_p / 2} f_{8/kappa}(y) exp(-|y|^2 / (2 kappa t)).
/// The starting point enters only through the validity condition |x| <= 0.1 sqrt(t).
double dyson_density_asymptotic(double t, const BoundaryConfig& y, const ModelParams& params,
                                double mehta_I);
double dyson_density_asymptotic(double t, const BoundaryConfig& y, const ModelParams& params);
bool asymptotic_regime(double t, std::span<const double> x);

/// Dyson leading term times G(x) / G(y).
double multichordal_density(double t, const BoundaryConfig& x, const BoundaryConfig& y,
                            const GreenFunction& green, const ModelParams& params, double mehta_I);

/// I^{-1} J G(x) (kappa t)^{-A/2}.
double survival_prediction(const BoundaryConfig& x, double t, const GreenFunction& green,
                           const ModelParams& params, double mehta_I, double j_alpha);

/// Exact P[T > t] for one chord started at gap g: the gap is a Bessel process and the
/// tail is the regularized lower incomplete gamma P(A/2, g^2 / (4 kappa t)).
double pure_pair_survival_exact(double gap, double t, const ModelParams& params);

/// Gap law of two-point Dyson BM started at the origin: P((beta + 1) / 2, g^2 / (4 kappa t)).
double dyson_origin_gap_cdf(double gap, double t, const ModelParams& params);

/// Samples of p-dimensional points stored row-major.
struct SampleSet {
  std::size_t p = 0;
  std::vector<double> data;

  std::size_t size() const { return p == 0 ? 0 : data.size() / p; }
  std::span<const double> operator[](std::size_t i) const { return {data.data() + i * p, p}; }
  void push(std::span<const double> x);
};

double ks_statistic(std::vector<double> a, std::vector<double> b);
double ks_statistic(std::vector<double> a, const std::function<double(double)>& cdf);
/// Asymptotic Kolmogorov tail P[sqrt(n_eff) D > lambda].
double kolmogorov_tail(double lambda);

enum class CompareMode { ks_1d_marginal, ks_gap };

/// KS statistic of a 1-d functional: coordinate `index`, or the gap x_{index+1} - x_index.
std::vector<double> functional(const SampleSet& s, CompareMode mode, std::size_t index = 0);
double empirical_compare(const SampleSet& a, const SampleSet& b, CompareMode mode, std::size_t index = 0);
double empirical_compare(const SampleSet& a, const std::function<double(double)>& cdf,
                         CompareMode mode, std::size_t index = 0);

struct DensityEstimate {
  SampleSet sample_points;
  std::vector<double> values;
  std::vector<double> bandwidth;  // per coordinate
  std::size_t sample_size = 0;
};

/// Product-Gaussian KDE with Silverman bandwidths. Each sample carries mass
/// 1 / total_count, so a killed ensemble integrates to its survival fraction.
DensityEstimate kde(const SampleSet& samples, std::size_t total_count, const SampleSet& at);

}  // namespace mcsle
