#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mcsle/errors.hpp"
#include "mcsle/partition.hpp"

using namespace mcsle;

namespace {

// random strictly increasing configuration in [-10, 10] with min gap >= 0.1
BoundaryConfig random_config(std::mt19937_64& rng, std::size_t p) {
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (;;) {
    std::vector<double> v(p);
    for (auto& x : v) x = u(rng);
    std::sort(v.begin(), v.end());
    if (p < 2 || min_gap(v) >= 0.1) return BoundaryConfig(v);
  }
}

BoundaryConfig shifted(const BoundaryConfig& x, double c) {
  std::vector<double> v = x.vector();
  for (auto& a : v) a += c;
  return BoundaryConfig(v);
}

BoundaryConfig scaled(const BoundaryConfig& x, double c) {
  std::vector<double> v = x.vector();
  for (auto& a : v) a *= c;
  return BoundaryConfig(v);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_SUITE("partition") {

TEST_CASE("f_v examples") {
  CHECK(f_v(BoundaryConfig{0, 1, 2}, 2.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(f_v(BoundaryConfig{5}, 0.7) == 1.0);
  CHECK(f_v(BoundaryConfig{1, 2, 3}, 2.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK_THROWS_AS(f_v(BoundaryConfig({2.0, 1.0}), 1.0), InvalidConfig);
}

TEST_CASE("z_shuffle examples") {
  CHECK(z_shuffle(BoundaryConfig{0, 1}, derived_parameters(4)) == doctest::Approx(1.0));
  CHECK(z_shuffle(BoundaryConfig{0, 4}, derived_parameters(2)) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(z_shuffle(BoundaryConfig{0, 1, 3}, derived_parameters(4)) == doctest::Approx(std::sqrt(6.0)).epsilon(1e-14));
}

TEST_CASE("z_gff examples") {
  CHECK(z_gff(BoundaryConfig{0, 1}) == doctest::Approx(1.0));
  CHECK(z_gff(BoundaryConfig{0, 4}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(z_gff(BoundaryConfig{0, 1, 2, 3}) == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK_THROWS_AS(z_gff(BoundaryConfig{0, 1, 2}), InvalidConfig);
}

TEST_CASE("z_pure_pair examples") {
  CHECK(z_pure_pair(BoundaryConfig{0, 1}, derived_parameters(4)) == doctest::Approx(1.0));
  CHECK(z_pure_pair(BoundaryConfig{0, 4}, derived_parameters(4)) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(z_pure_pair(BoundaryConfig{0, 2}, derived_parameters(2)) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK_THROWS_AS(z_pure_pair(BoundaryConfig{0, 1, 2}, derived_parameters(4)), InvalidConfig);
  CHECK_THROWS(z_pure_pair(derived_parameters(5.0)));
}

TEST_CASE("green examples") {
  const auto p4 = derived_parameters(4);
  auto g1 = green(z_pure_pair(p4), p4);
  CHECK(g1.value(BoundaryConfig{0, 1}) == doctest::Approx(1.0));
  CHECK(g1.value(BoundaryConfig{0, 4}) == doctest::Approx(4.0).epsilon(1e-14));
  auto g2 = green(z_gff(2), p4);
  CHECK(g2.value(BoundaryConfig{0, 1, 2, 3}) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(gff_green_product(BoundaryConfig{0, 1, 2, 3}) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(g2.homogeneity_degree() == 4.0);
  CHECK_THROWS_AS(green(z_shuffle(p4), p4), InvalidConfig);  // any arity, not even by construction
  CHECK_THROWS_AS(g2.value(BoundaryConfig{0, 1}), InvalidConfig);
}

TEST_CASE("translation invariance") {
  std::mt19937_64 rng(1);
  const auto p3 = derived_parameters(3), p4 = derived_parameters(4);
  for (int trial = 0; trial < 20; ++trial)
    for (double c : {-3.0, 1.7}) {
      auto x4 = random_config(rng, 4);
      auto x2 = random_config(rng, 2);
      CHECK(rel(z_shuffle(shifted(x4, c), p3), z_shuffle(x4, p3)) < 1e-12);
      CHECK(rel(z_gff(shifted(x4, c)), z_gff(x4)) < 1e-12);
      CHECK(rel(z_pure_pair(shifted(x2, c), p3), z_pure_pair(x2, p3)) < 1e-12);
      CHECK(rel(green(z_gff(2), p4).value(shifted(x4, c)), green(z_gff(2), p4).value(x4)) < 1e-12);
    }
}

TEST_CASE("green homogeneity equals the arm exponent") {
  std::mt19937_64 rng(2);
  for (double k : {2.0, 3.0, 4.0}) {
    const auto params = derived_parameters(k);
    auto G = green(z_pure_pair(params), params);
    CHECK(G.homogeneity_degree() == doctest::Approx(arm_exponent(1, k)).epsilon(1e-15));
    for (double c : {0.5, 0.8, 1.3, 2.0}) {
      auto x = random_config(rng, 2);
      CHECK(rel(G.value(scaled(x, c)), std::pow(c, G.homogeneity_degree()) * G.value(x)) < 1e-12);
    }
  }
  const auto p4 = derived_parameters(4);
  for (std::size_t n = 1; n <= 3; ++n) {
    auto G = green(z_gff(n), p4);
    CHECK(G.homogeneity_degree() == static_cast<double>(n * n));
    for (double c : {0.5, 0.8, 1.3, 2.0}) {
      auto x = random_config(rng, 2 * n);
      CHECK(rel(G.value(scaled(x, c)), std::pow(c, static_cast<double>(n * n)) * G.value(x)) < 1e-12);
    }
  }
}

TEST_CASE("power-law bound is saturated by the one-chord function") {
  std::mt19937_64 rng(3);
  const LinkPattern alpha({{1, 2}});
  for (double k : {1.0, 2.0, 3.0, 4.0}) {
    const auto params = derived_parameters(k);
    for (int i = 0; i < 10; ++i) {
      auto x = random_config(rng, 2);
      CHECK(z_pure_pair(x, params) == doctest::Approx(power_law_bound(x, alpha, params)).epsilon(1e-14));
    }
  }
}

TEST_CASE("ratio-product identity at kappa 4") {
  std::mt19937_64 rng(4);
  const auto p4 = derived_parameters(4);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i)
    for (std::size_t n = 1; n <= 3; ++n) {
      auto x = random_config(rng, 2 * n);
      worst = std::max(worst, rel(z_shuffle(x, p4) / z_gff(x), gff_green_product(x)));
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("closed-form log gradients agree with central differences") {
  std::mt19937_64 rng(5);
  const auto p3 = derived_parameters(3);
  std::vector<PartitionFunction> handles{z_shuffle(p3), z_gff(2), z_pure_pair(p3)};
  std::vector<std::size_t> arity{3, 4, 2};
  for (std::size_t hi = 0; hi < handles.size(); ++hi) {
    const auto& z = handles[hi];
    REQUIRE(z.has_closed_form_gradient());
    for (int trial = 0; trial < 10; ++trial) {
      auto x = random_config(rng, arity[hi]);
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double h = 1e-4;
        std::vector<double> a = x.vector(), b = x.vector();
        a[j] += h;
        b[j] -= h;
        const double fd = (z.log_value(a) - z.log_value(b)) / (2 * h);
        const double exact = z.log_grad(x, j);
        CHECK(std::abs(fd - exact) <= 1e-6 * (1.0 + std::abs(exact)));
      }
    }
  }
}

TEST_CASE("BPZ residual examples") {
  const auto p4 = derived_parameters(4);
  for (std::size_t j = 0; j < 3; ++j)
    CHECK(bpz_residual(z_shuffle(p4), BoundaryConfig{0, 1, 3}, j, p4, 1e-4).relative() < 1e-5);
  for (std::size_t j = 0; j < 4; ++j)
    CHECK(bpz_residual(z_gff(2), BoundaryConfig{0, 1, 2, 3}, j, p4, 1e-4).relative() < 1e-5);
  // negative control: f_1 is not a solution, the operator gives (2 - 2b) / (x2 - x1) = 3/2
  auto fake = power_of_differences(1.0);
  auto r = bpz_residual(fake, BoundaryConfig{0, 1}, 0, p4, 1e-4);
  CHECK(std::abs(r.residual) == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(r.relative() > 0.1);
  CHECK_THROWS_AS(bpz_residual(z_shuffle(p4), BoundaryConfig{0, 1e-3, 1}, 0, p4, 1e-4), StepTooLarge);
}

TEST_CASE("BPZ residual converges at second order") {
  for (double k : {3.0, 4.0}) {
    const auto params = derived_parameters(k);
    const BoundaryConfig x{0, 1, 3};
    for (std::size_t j = 0; j < 3; ++j) {
      const double r1 = bpz_residual(z_shuffle(params), x, j, params, 0.05).residual;
      const double r2 = bpz_residual(z_shuffle(params), x, j, params, 0.025).residual;
      CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.125));
    }
  }
}

TEST_CASE("Girsanov drift identity at kappa 4") {
  std::mt19937_64 rng(6);
  for (std::size_t n = 1; n <= 3; ++n) {
    auto z = z_gff(n);
    for (int trial = 0; trial < 20; ++trial) {
      auto x = random_config(rng, 2 * n);
      for (std::size_t j = 0; j < x.size(); ++j) {
        double lhs = 4.0 * z.log_grad(x, j), rhs = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
          if (k == j) continue;
          lhs += 2.0 / (x[j] - x[k]);
          const double sign = ((j > k ? j - k : k - j) % 2 == 0) ? 1.0 : -1.0;
          rhs += 2.0 * (sign + 1.0) / (x[j] - x[k]);
        }
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
      }
    }
  }
}

TEST_CASE("handle validation accepts pure functions and rejects fakes") {
  const auto p3 = derived_parameters(3);
  std::vector<BoundaryConfig> pts{BoundaryConfig{0, 1}, BoundaryConfig{-2, 0.5}, BoundaryConfig{3, 7}};
  const LinkPattern alpha({{1, 2}});
  CHECK(validate_pure_partition_function(z_pure_pair(p3), alpha, p3, pts).passed());
  auto fake = validate_pure_partition_function(power_of_differences(1.0), alpha, p3, pts);
  CHECK_FALSE(fake.passed());
}

}
