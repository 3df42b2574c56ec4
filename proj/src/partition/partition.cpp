#include "mcsle/partition.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "mcsle/errors.hpp"

namespace mcsle {

namespace {

void require_ordered(std::span<const double> x) {
  if (x.empty() || !is_strictly_increasing(x))
    throw InvalidConfig("boundary points must be finite and strictly increasing");
}

void require_arity(std::size_t arity, std::size_t p, const std::string& label) {
  if (arity != 0 && arity != p)
    throw InvalidConfig(label + ": expected " + std::to_string(arity) + " points, got " +
                        std::to_string(p));
}

// log prod_{j<k} (x_k - x_j)^{e(j,k)} and its j-th partial; e receives 0-based indices.
template <class Exponent>
double pairwise_log(std::span<const double> x, Exponent e) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t k = j + 1; k < x.size(); ++k) s += e(j, k) * std::log(x[k] - x[j]);
  return s;
}

template <class Exponent>
double pairwise_log_grad(std::span<const double> x, std::size_t j, Exponent e) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (k == j) continue;
    const double ejk = j < k ? e(j, k) : e(k, j);
    s += ejk / (x[j] - x[k]);
  }
  return s;
}

double alternating_half(std::size_t j, std::size_t k) { return (k - j) % 2 == 0 ? 0.5 : -0.5; }

}  // namespace

PartitionFunction::PartitionFunction(std::string label, std::size_t arity, LogValueFn log_value,
                                     LogGradFn log_grad)
    : label_(std::move(label)),
      arity_(arity),
      log_value_(std::move(log_value)),
      log_grad_(std::move(log_grad)) {
  if (!log_value_) throw InvalidInput("partition function '" + label_ + "' has no evaluator");
}

double PartitionFunction::value(std::span<const double> x) const { return std::exp(log_value_(x)); }

double PartitionFunction::log_grad(std::span<const double> x, std::size_t j) const {
  if (log_grad_) return log_grad_(x, j);
  // Central difference of log Z with a step well inside the nearest gap.
  const double h = 1e-5 * std::min(1.0, min_gap(x));
  std::vector<double> y(x.begin(), x.end());
  y[j] = x[j] + h;
  const double up = log_value_(y);
  y[j] = x[j] - h;
  const double down = log_value_(y);
  return (up - down) / (2.0 * h);
}

std::vector<double> PartitionFunction::log_gradient(std::span<const double> x) const {
  std::vector<double> g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) g[j] = log_grad(x, j);
  return g;
}

double PartitionFunction::value(const BoundaryConfig& x) const {
  require_arity(arity_, x.size(), label_);
  return value(x.points());
}

double PartitionFunction::log_grad(const BoundaryConfig& x, std::size_t j) const {
  require_arity(arity_, x.size(), label_);
  if (j >= x.size()) throw InvalidParameter("coordinate index out of range");
  return log_grad(x.points(), j);
}

GreenFunction::GreenFunction(std::string label, std::size_t arity, double degree,
                             PartitionFunction::LogValueFn log_value)
    : label_(std::move(label)), arity_(arity), degree_(degree), log_value_(std::move(log_value)) {}

double GreenFunction::value(std::span<const double> x) const { return std::exp(log_value_(x)); }

double GreenFunction::value(const BoundaryConfig& x) const {
  require_arity(arity_, x.size(), label_);
  return value(x.points());
}

double log_f_v(std::span<const double> x, double v) {
  return pairwise_log(x, [v](std::size_t, std::size_t) { return v; });
}

double f_v(const BoundaryConfig& x, double v) {
  require_ordered(x.points());
  return std::exp(log_f_v(x.points(), v));
}

PartitionFunction power_of_differences(double v) {
  auto e = [v](std::size_t, std::size_t) { return v; };
  return PartitionFunction(
      "f_" + std::to_string(v), 0, [e](std::span<const double> x) { return pairwise_log(x, e); },
      [e](std::span<const double> x, std::size_t j) { return pairwise_log_grad(x, j, e); });
}

PartitionFunction z_shuffle(const ModelParams& params) {
  const double v = 2.0 / params.kappa;
  auto e = [v](std::size_t, std::size_t) { return v; };
  return PartitionFunction(
      "z_shuffle", 0, [e](std::span<const double> x) { return pairwise_log(x, e); },
      [e](std::span<const double> x, std::size_t j) { return pairwise_log_grad(x, j, e); });
}

PartitionFunction z_gff(std::size_t n) {
  if (n == 0) throw InvalidParameter("z_gff needs n >= 1");
  return PartitionFunction(
      "z_gff", 2 * n,
      [](std::span<const double> x) { return pairwise_log(x, alternating_half); },
      [](std::span<const double> x, std::size_t j) {
        return pairwise_log_grad(x, j, alternating_half);
      });
}

PartitionFunction z_pure_pair(const ModelParams& params) {
  require_multichordal(params);
  const double e = -2.0 * params.b;
  return PartitionFunction(
      "z_pure_pair", 2, [e](std::span<const double> x) { return e * std::log(x[1] - x[0]); },
      [e](std::span<const double> x, std::size_t j) {
        const double d = x[1] - x[0];
        return j == 0 ? -e / d : e / d;
      });
}

double z_shuffle(const BoundaryConfig& x, const ModelParams& params) {
  return f_v(x, 2.0 / params.kappa);
}

double z_gff(const BoundaryConfig& x) {
  require_ordered(x.points());
  if (x.size() % 2 != 0) throw InvalidConfig("z_gff needs an even number of points");
  return std::exp(pairwise_log(x.points(), alternating_half));
}

double z_pure_pair(const BoundaryConfig& x, const ModelParams& params) {
  require_ordered(x.points());
  require_arity(2, x.size(), "z_pure_pair");
  return z_pure_pair(params).value(x.points());
}

GreenFunction green(const PartitionFunction& z_alpha, const ModelParams& params) {
  require_multichordal(params);
  const std::size_t p = z_alpha.arity();
  if (p == 0 || p % 2 != 0)
    throw InvalidConfig("green: partition function '" + z_alpha.label() +
                        "' must have fixed even arity");
  const double v = 2.0 / params.kappa;
  const double degree = arm_exponent(static_cast<int>(p / 2), params.kappa);
  return GreenFunction("green(" + z_alpha.label() + ")", p, degree,
                       [z_alpha, v](std::span<const double> x) {
                         return log_f_v(x, v) - z_alpha.log_value(x);
                       });
}

double gff_green_product(const BoundaryConfig& x) {
  require_ordered(x.points());
  if (x.size() % 2 != 0) throw InvalidConfig("gff_green_product needs an even number of points");
  // Exponent (1 - (-1)^{j-k})/2 keeps only pairs at odd index distance.
  double prod = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t k = j + 1; k < x.size(); k += 2) prod *= (x[k] - x[j]);
  return prod;
}

double power_law_bound(const BoundaryConfig& x, const LinkPattern& alpha,
                       const ModelParams& params) {
  require_ordered(x.points());
  if (static_cast<std::size_t>(2 * alpha.n()) != x.size())
    throw InvalidConfig("power_law_bound: link pattern size does not match configuration");
  double s = 0.0;
  for (const auto& [a, b] : alpha.pairs()) s += std::log(x[b - 1] - x[a - 1]);
  return std::exp(-2.0 * params.b * s);
}

double default_fd_step(const BoundaryConfig& x) {
  return 1e-4 * std::min(1.0, x.size() > 1 ? x.min_gap() : 1.0);
}

BpzResidual bpz_residual(const PartitionFunction& z, const BoundaryConfig& x, std::size_t j,
                         const ModelParams& params, double h) {
  require_arity(z.arity(), x.size(), z.label());
  if (x.size() < 2) throw InvalidConfig("bpz_residual needs at least two points");
  if (j >= x.size()) throw InvalidParameter("coordinate index out of range");
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidParameter("finite-difference step must be positive");
  const double gap = x.min_gap();
  if (!(gap > 10.0 * h))
    throw StepTooLarge("step " + std::to_string(h) + " too large for minimum gap " +
                       std::to_string(gap));

  std::vector<double> y = x.vector();
  auto shifted = [&](std::size_t i, double d) {
    y[i] = x[i] + d;
    const double v = z.value(y);
    y[i] = x[i];
    return v;
  };
  const double z0 = z.value(y);
  double r = 0.5 * params.kappa * (shifted(j, h) - 2.0 * z0 + shifted(j, -h)) / (h * h);
  for (std::size_t l = 0; l < x.size(); ++l) {
    if (l == j) continue;
    const double d = x[l] - x[j];
    const double dz = (shifted(l, h) - shifted(l, -h)) / (2.0 * h);
    r += 2.0 / d * dz - 2.0 * params.b / (d * d) * z0;
  }
  return {r, std::abs(z0) * (1.0 + 1.0 / (gap * gap))};
}

BpzResidual bpz_residual(const PartitionFunction& z, const BoundaryConfig& x, std::size_t j,
                         const ModelParams& params) {
  return bpz_residual(z, x, j, params, default_fd_step(x));
}

HandleValidation validate_pure_partition_function(const PartitionFunction& z,
                                                  const LinkPattern& alpha,
                                                  const ModelParams& params,
                                                  std::span<const BoundaryConfig> test_points) {
  require_multichordal(params);
  HandleValidation v;
  for (const auto& x : test_points) {
    const double zx = z.value(x);
    if (!(zx > 0.0) || !std::isfinite(zx)) v.positive = false;
    if (zx > power_law_bound(x, alpha, params) * (1.0 + 1e-12)) v.power_law_bound_ok = false;
    for (std::size_t j = 0; j < x.size(); ++j)
      v.max_relative_residual =
          std::max(v.max_relative_residual, bpz_residual(z, x, j, params).relative());
  }
  return v;
}

}  // namespace mcsle
