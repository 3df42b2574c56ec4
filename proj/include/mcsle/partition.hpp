#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mcsle/core.hpp"

namespace mcsle {

/// Evaluation handle for a positive function Z on ordered configurations.
///
/// Values live in log space; value() exponentiates. When no closed-form
/// log-gradient is supplied, log_grad() falls back to a central difference of
/// log_value(). Indices are 0-based. An arity of 0 accepts any number of points.
class PartitionFunction {
 public:
  using LogValueFn = std::function<double(std::span<const double>)>;
  using LogGradFn = std::function<double(std::span<const double>, std::size_t)>;

  PartitionFunction(std::string label, std::size_t arity, LogValueFn log_value,
                    LogGradFn log_grad = {});

  const std::string& label() const { return label_; }
  std::size_t arity() const { return arity_; }
  bool accepts(std::size_t p) const { return arity_ == 0 || arity_ == p; }
  bool has_closed_form_gradient() const { return static_cast<bool>(log_grad_); }

  double log_value(std::span<const double> x) const { return log_value_(x); }
  double value(std::span<const double> x) const;
  double log_grad(std::span<const double> x, std::size_t j) const;
  std::vector<double> log_gradient(std::span<const double> x) const;

  /// Checked entry points: validate arity against the configuration.
  double value(const BoundaryConfig& x) const;
  double log_grad(const BoundaryConfig& x, std::size_t j) const;

 private:
  std::string label_;
  std::size_t arity_;
  LogValueFn log_value_;
  LogGradFn log_grad_;
};

/// Green's function G = Z_shuffle / Z_alpha; homogeneous of degree `degree`.
class GreenFunction {
 public:
  GreenFunction(std::string label, std::size_t arity, double degree,
                PartitionFunction::LogValueFn log_value);

  const std::string& label() const { return label_; }
  std::size_t arity() const { return arity_; }
  double homogeneity_degree() const { return degree_; }

  double log_value(std::span<const double> x) const { return log_value_(x); }
  double value(std::span<const double> x) const;
  double value(const BoundaryConfig& x) const;

 private:
  std::string label_;
  std::size_t arity_;
  double degree_;
  PartitionFunction::LogValueFn log_value_;
};

/// prod_{j<k} (x_k - x_j)^v; 1 for a single point.
double f_v(const BoundaryConfig& x, double v);
double log_f_v(std::span<const double> x, double v);

/// f_{2/kappa}: the half-watermelon partition function.
PartitionFunction z_shuffle(const ModelParams& params);
/// prod_{j<k} (x_k - x_j)^{(-1)^{j-k}/2} on 2n points (kappa = 4).
PartitionFunction z_gff(std::size_t n);
/// (x_2 - x_1)^{-2b}, the pure partition function of a single chord.
PartitionFunction z_pure_pair(const ModelParams& params);
/// f_v wrapped as a handle of any arity; used as a negative control for BPZ checks.
PartitionFunction power_of_differences(double v);

double z_shuffle(const BoundaryConfig& x, const ModelParams& params);
double z_gff(const BoundaryConfig& x);
double z_pure_pair(const BoundaryConfig& x, const ModelParams& params);

/// G = z_shuffle / z_alpha with degree A+_{2n}. Throws InvalidConfig for odd arity.
GreenFunction green(const PartitionFunction& z_alpha, const ModelParams& params);

/// prod_{j<k} (x_k - x_j)^{(1 - (-1)^{j-k})/2}: the closed form of green(z_gff) at kappa = 4.
double gff_green_product(const BoundaryConfig& x);

/// prod_{{k,l} in alpha} |x_k - x_l|^{-2b}, the upper bound any pure Z_alpha must respect.
double power_law_bound(const BoundaryConfig& x, const LinkPattern& alpha, const ModelParams& params);

struct BpzResidual {
  double residual = 0.0;
  double scale = 0.0;  // |Z(x)| (1 + 1/min_gap^2)
  double relative() const { return scale > 0.0 ? std::abs(residual) / scale : 0.0; }
};

/// Default finite-difference step: 1e-4 * min(1, min_gap).
double default_fd_step(const BoundaryConfig& x);

/// Central-difference evaluation of the j-th (0-based) BPZ operator applied to z at x.
/// Throws StepTooLarge unless min_gap > 10 h.
BpzResidual bpz_residual(const PartitionFunction& z, const BoundaryConfig& x, std::size_t j,
                         const ModelParams& params, double h);
BpzResidual bpz_residual(const PartitionFunction& z, const BoundaryConfig& x, std::size_t j,
                         const ModelParams& params);

/// Screening applied to caller-supplied pure partition functions.
struct HandleValidation {
  double max_relative_residual = 0.0;
  bool positive = true;
  bool power_law_bound_ok = true;
  bool passed(double residual_tolerance = 1e-5) const {
    return positive && power_law_bound_ok && max_relative_residual < residual_tolerance;
  }
};

HandleValidation validate_pure_partition_function(const PartitionFunction& z,
                                                  const LinkPattern& alpha,
                                                  const ModelParams& params,
                                                  std::span<const BoundaryConfig> test_points);

}  // namespace mcsle
