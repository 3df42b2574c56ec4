#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "mcsle/density.hpp"
#include "mcsle/errors.hpp"
#include "mcsle/partition.hpp"

using namespace mcsle;

namespace {

constexpr double pi = std::numbers::pi;

// int over x1 < x2 of (x2 - x1)^beta exp(-|x|^2 / 2): the gap is sqrt(2) times a standard normal
double two_point_mehta(double beta) { return std::sqrt(pi) * std::pow(2.0, beta) * std::tgamma((beta + 1) / 2); }

// midpoint rule over y1 < y2 in centre / gap coordinates (unit Jacobian)
template <class F>
double integrate_ordered_pairs(F f, double half_width, double gap_max, int nc, int ng) {
  const double hc = 2 * half_width / nc, hg = gap_max / ng;
  double s = 0;
  for (int i = 0; i < nc; ++i) {
    const double c = -half_width + (i + 0.5) * hc;
    for (int k = 0; k < ng; ++k) {
      const double g = (k + 0.5) * hg;
      s += f(BoundaryConfig{c - g / 2, c + g / 2});
    }
  }
  return s * hc * hg;
}

}  // namespace

TEST_SUITE("density") {

TEST_CASE("Mehta constant closed forms") {
  const auto p4 = derived_parameters(4);
  auto e2 = mehta_constant(2, p4);
  CHECK(e2.method == ConstantMethod::closed_form);
  CHECK(e2.std_error == 0.0);
  CHECK(e2.value == doctest::Approx(2 * pi).epsilon(1e-14));
  CHECK(mehta_constant(4, p4).value == doctest::Approx(48 * pi * pi).epsilon(1e-13));
  CHECK(two_point_mehta(2) == doctest::Approx(2 * pi));
  CHECK_THROWS_AS(mehta_constant(2, derived_parameters(3), MehtaMethod::closed_form), InvalidParameter);
  CHECK_THROWS_AS(mehta_constant(0, p4), InvalidParameter);
}

TEST_CASE("Mehta constant by Monte Carlo") {
  const auto p4 = derived_parameters(4);
  MonteCarloOptions o{.samples = 1'000'000, .seed = 3};
  auto e = mehta_constant(4, p4, MehtaMethod::monte_carlo, o);
  CHECK(e.method == ConstantMethod::monte_carlo);
  CHECK(e.std_error > 0);
  CHECK(std::abs(e.value - 48 * pi * pi) < 3 * e.std_error);
  CHECK(e.warnings.empty());

  auto e2 = mehta_constant(2, derived_parameters(2), MehtaMethod::automatic, o);
  CHECK(e2.value == doctest::Approx(12 * pi).epsilon(0.01));
  CHECK(std::abs(e2.value - 12 * pi) < 3 * e2.std_error);

  const auto p3 = derived_parameters(3);
  auto e3 = mehta_constant(2, p3, MehtaMethod::automatic, o);
  CHECK(std::abs(e3.value - two_point_mehta(8.0 / 3)) < 3 * e3.std_error);
}

TEST_CASE("J constant for one chord") {
  MonteCarloOptions o{.samples = 1'000'000, .seed = 4};
  const auto p4 = derived_parameters(4), p3 = derived_parameters(3);
  auto j4 = j_constant(z_pure_pair(p4), p4, o);
  o.seed = 5;
  auto j3 = j_constant(z_pure_pair(p3), p3, o);
  const double exact = 2 * std::sqrt(pi);
  CHECK(j4.value == doctest::Approx(exact).epsilon(0.01));
  CHECK(j3.value == doctest::Approx(exact).epsilon(0.01));
  CHECK(std::abs(j4.value - j3.value) < 2 * std::hypot(j4.std_error, j3.std_error));
  o.seed = 4;
  auto jg = j_constant(z_gff(1), p4, o);
  CHECK(jg.value == doctest::Approx(j4.value).epsilon(1e-12));
}

TEST_CASE("heavy tails are flagged") {
  // weights ~ gap^-0.9 have infinite variance
  auto e = ordered_gaussian_integral(
      "test", 2, [](std::span<const double> x) { return -0.9 * std::log(x[1] - x[0]); }, -0.9,
      {.samples = 1'000'000, .seed = 7});
  CHECK(std::find(e.warnings.begin(), e.warnings.end(), "heavy-tail suspected") != e.warnings.end());
  CHECK(e.to_json().find("heavy-tail suspected") != std::string::npos);
}

TEST_CASE("constant JSON") {
  auto e = mehta_constant(2, derived_parameters(4));
  const auto j = e.to_json();
  CHECK(j.find("\"value\": 6.28318530717958") != std::string::npos);
  CHECK(j.find("closed_form") != std::string::npos);
}

TEST_CASE("Dyson density from the origin") {
  const auto p4 = derived_parameters(4);
  const double d = dyson_density_asymptotic(1.0, BoundaryConfig{-1, 1}, p4);
  CHECK(d == doctest::Approx(std::exp(-0.25) / (8 * pi)).epsilon(1e-13));
  CHECK(d == doctest::Approx(0.0310).epsilon(0.002));
  CHECK_THROWS_AS(dyson_density_asymptotic(0.0, BoundaryConfig{-1, 1}, p4), InvalidParameter);

  for (double kappa : {3.0, 4.0}) {
    const auto p = derived_parameters(kappa);
    const double I = two_point_mehta(8.0 / kappa);
    const double t = 2.0;
    const double sd = std::sqrt(kappa * t);
    const double mass = integrate_ordered_pairs(
        [&](const BoundaryConfig& y) { return dyson_density_asymptotic(t, y, p, I); }, 8 * sd, 16 * sd, 400, 400);
    CHECK(mass == doctest::Approx(1.0).epsilon(0.01));
  }

  const BoundaryConfig y{-0.3, 0.9};
  const BoundaryConfig y2{-0.6, 1.8};
  CHECK(dyson_density_asymptotic(4.0, y2, p4) == doctest::Approx(0.25 * dyson_density_asymptotic(1.0, y, p4)).epsilon(1e-13));
}

TEST_CASE("origin gap law") {
  const auto p4 = derived_parameters(4);
  CHECK(dyson_origin_gap_cdf(0.0, 1.0, p4) == 0.0);
  CHECK(dyson_origin_gap_cdf(1e3, 1.0, p4) == doctest::Approx(1.0));
  // density of the gap is proportional to g^2 exp(-g^2 / (16 t)) at kappa 4
  const double t = 1.5, g = 2.0, h = 1e-4;
  const double dens = (dyson_origin_gap_cdf(g + h, t, p4) - dyson_origin_gap_cdf(g - h, t, p4)) / (2 * h);
  const double norm = std::pow(16 * t, 1.5) * std::tgamma(1.5) / 2;
  CHECK(dens == doctest::Approx(g * g * std::exp(-g * g / (16 * t)) / norm).epsilon(1e-6));
}

TEST_CASE("survival prediction") {
  const auto p4 = derived_parameters(4);
  const auto G = green(z_pure_pair(p4), p4);
  const double I = 2 * pi, J = 2 * std::sqrt(pi);
  CHECK(survival_prediction(BoundaryConfig{0, 1}, 100, G, p4, I, J) == doctest::Approx(1 / (2 * std::sqrt(100 * pi))).epsilon(1e-13));
  CHECK(survival_prediction(BoundaryConfig{0, 3}, 900, G, p4, I, J) ==
        doctest::Approx(survival_prediction(BoundaryConfig{0, 1}, 100, G, p4, I, J)).epsilon(1e-13));
  const double t = 1e6;
  CHECK(survival_prediction(BoundaryConfig{0, 1}, t, G, p4, I, J) / std::erf(1 / std::sqrt(16 * t)) ==
        doctest::Approx(1.0).epsilon(0.01));
  // log-log slope is -A/2
  const double s1 = std::log(survival_prediction(BoundaryConfig{0, 1}, 10, G, p4, I, J));
  const double s2 = std::log(survival_prediction(BoundaryConfig{0, 1}, 1000, G, p4, I, J));
  CHECK((s2 - s1) / std::log(100.0) == doctest::Approx(-0.5).epsilon(1e-12));

  const auto p3 = derived_parameters(3);
  const auto G3 = green(z_pure_pair(p3), p3);
  const double c = 1.7;
  CHECK(survival_prediction(BoundaryConfig{0, c}, c * c * 50, G3, p3, 5.0, 3.0) ==
        doctest::Approx(survival_prediction(BoundaryConfig{0, 1}, 50, G3, p3, 5.0, 3.0)).epsilon(1e-12));
}

TEST_CASE("exact survival of one chord") {
  const auto p4 = derived_parameters(4);
  for (double t : {0.5, 10.0, 400.0})
    CHECK(pure_pair_survival_exact(1.0, t, p4) == doctest::Approx(std::erf(1 / std::sqrt(16 * t))).epsilon(1e-12));
}

TEST_CASE("multichordal density") {
  const auto p4 = derived_parameters(4);
  const auto G = green(z_pure_pair(p4), p4);
  const double I = 2 * pi;
  const BoundaryConfig x{0, 1};
  CHECK(multichordal_density(10, x, BoundaryConfig{0, 3}, G, p4, I) ==
        doctest::Approx(dyson_density_asymptotic(10, BoundaryConfig{0, 3}, p4, I) / 3).epsilon(1e-13));
  CHECK(multichordal_density(10, x, x, G, p4, I) == doctest::Approx(dyson_density_asymptotic(10, x, p4, I)).epsilon(1e-13));
  const double t = 100;
  const double sd = std::sqrt(4 * t);
  const double mass = integrate_ordered_pairs(
      [&](const BoundaryConfig& y) { return multichordal_density(t, x, y, G, p4, I); }, 8 * sd, 16 * sd, 400, 400);
  CHECK(mass == doctest::Approx(survival_prediction(x, t, G, p4, I, 2 * std::sqrt(pi))).epsilon(0.03));
}

TEST_CASE("KS statistics") {
  SampleSet a{.p = 2, .data = {0, 1, 0.5, 2, -1, 0.2, 3, 4}};
  CHECK(empirical_compare(a, a, CompareMode::ks_1d_marginal) == 0.0);
  CHECK(empirical_compare(a, a, CompareMode::ks_gap) == 0.0);
  CHECK(functional(a, CompareMode::ks_gap) == std::vector<double>{1, 1.5, 1.2, 1});
  SampleSet empty{.p = 2, .data = {}};
  CHECK_THROWS_AS(empirical_compare(empty, a, CompareMode::ks_gap), InvalidInput);
  CHECK_THROWS_AS(ks_statistic(std::vector<double>{}, [](double) { return 0.5; }), InvalidInput);

  std::mt19937_64 rng(12);
  std::normal_distribution<double> nd;
  std::vector<double> v(100000);
  for (auto& x : v) x = nd(rng);
  const double ks = ks_statistic(v, [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); });
  CHECK(ks < 0.006);
  CHECK(ks_statistic(std::vector<double>{0, 1}, std::vector<double>{10, 11}) == 1.0);
  CHECK(kolmogorov_tail(1.358) == doctest::Approx(0.05).epsilon(0.01));
}

TEST_CASE("KDE mass") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> nd;
  SampleSet s{.p = 1, .data = {}};
  for (int i = 0; i < 2000; ++i) {
    double v = nd(rng);
    s.push(std::span<const double>(&v, 1));
  }
  SampleSet grid{.p = 1, .data = {}};
  const double h = 0.02;
  for (double x = -8; x <= 8; x += h) grid.push(std::span<const double>(&x, 1));
  auto full = kde(s, 2000, grid);
  auto half = kde(s, 4000, grid);
  double m1 = 0, m2 = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) m1 += full.values[i] * h, m2 += half.values[i] * h;
  CHECK(m1 <= 1.02);
  CHECK(m1 == doctest::Approx(1.0).epsilon(0.01));
  CHECK(m2 == doctest::Approx(0.5).epsilon(0.01));
  CHECK(full.bandwidth.size() == 1);
}

}
