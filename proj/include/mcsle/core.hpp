#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mcsle {

// Parameters derived from kappa. Dyson-only code may use any kappa in (0, 8);
// multichordal entry points call require_multichordal() which enforces kappa <= 4.
struct ModelParams {
  double kappa = 4.0;
  double beta = 2.0;  // 8 / kappa
  double b = 0.25;    // (6 - kappa) / (2 kappa)
  double c = 1.0;     // (6 - kappa)(3 kappa - 8) / (2 kappa)
};

ModelParams derived_parameters(double kappa);

/// Throws InvalidParameter unless kappa <= 4.
void require_multichordal(const ModelParams& params);

/// Exponents attached to n chords (p = 2n marked points).
struct Exponents {
  int n = 1;
  double kappa = 4.0;
  double arm = 0.0;              // n(4n + 4 - kappa) / kappa
  double lambda_p = 0.0;         // Dyson density exponent for p = 2n
  double lambda_prime_2n = 0.0;  // n(12n - 12 + 3 kappa) / kappa
};

Exponents exponents(int n, double kappa);

double arm_exponent(int n, double kappa);
/// p(4p - 4 + kappa) / kappa, the scaling exponent of the Dyson density kernel.
double dyson_exponent(std::size_t p, double kappa);
/// Kac weight h_{1,s+1}(kappa) = s(s + 2)/kappa - s/2. The arm exponent equals h_{1,2n+1}.
double kac_weight(int s, double kappa);

bool is_strictly_increasing(std::span<const double> x);
double min_gap(std::span<const double> x);

/// Ordered marked points x_1 < ... < x_p on the real line.
class BoundaryConfig {
 public:
  BoundaryConfig() = default;
  explicit BoundaryConfig(std::vector<double> points);
  BoundaryConfig(std::initializer_list<double> points);

  std::span<const double> points() const { return points_; }
  const std::vector<double>& vector() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }
  double min_gap() const;
  double diameter() const;

 private:
  std::vector<double> points_;
};

/// Non-crossing perfect matching of {1, ..., 2n}; pairs are 1-based, each with
/// first < second, and the list is sorted.
class LinkPattern {
 public:
  using Pair = std::pair<int, int>;

  LinkPattern() = default;
  explicit LinkPattern(std::vector<Pair> pairs);

  const std::vector<Pair>& pairs() const { return pairs_; }
  int n() const { return static_cast<int>(pairs_.size()); }
  /// 1-based partner of a 1-based index.
  int partner(int index) const;
  std::string to_string() const;

  friend bool operator==(const LinkPattern&, const LinkPattern&) = default;
  friend auto operator<=>(const LinkPattern&, const LinkPattern&) = default;

 private:
  std::vector<Pair> pairs_;
};

/// All C_n planar link patterns in lexicographic order of their pair lists.
std::vector<LinkPattern> enumerate_link_patterns(int n);

/// Catalan number C_n for n <= 30.
unsigned long long catalan(int n);

}  // namespace mcsle
