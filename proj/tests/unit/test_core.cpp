#include <doctest.h>

#include <boost/rational.hpp>
#include <set>

#include "mcsle/core.hpp"
#include "mcsle/errors.hpp"

using namespace mcsle;

TEST_SUITE("core") {

TEST_CASE("derived parameters at reference kappas") {
  auto p4 = derived_parameters(4.0);
  CHECK(p4.b == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(p4.c == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p4.beta == 2.0);

  auto p6 = derived_parameters(6.0);
  CHECK(p6.b == 0.0);
  CHECK(p6.c == 0.0);

  auto p83 = derived_parameters(8.0 / 3.0);
  CHECK(std::abs(p83.c) < 1e-15);
  CHECK(p83.b == doctest::Approx(5.0 / 8.0).epsilon(1e-14));
}

TEST_CASE("derived parameters reject bad kappa") {
  CHECK_THROWS_AS(derived_parameters(0.0), InvalidParameter);
  CHECK_THROWS_AS(derived_parameters(-1.0), InvalidParameter);
  CHECK_THROWS_AS(derived_parameters(std::numeric_limits<double>::quiet_NaN()), InvalidParameter);
  CHECK_THROWS_AS(derived_parameters(std::numeric_limits<double>::infinity()), InvalidParameter);
  CHECK_THROWS_AS(derived_parameters(8.0), InvalidParameter);
  CHECK_NOTHROW(derived_parameters(7.5));
  CHECK_THROWS_AS(require_multichordal(derived_parameters(5.0)), InvalidParameter);
  CHECK_NOTHROW(require_multichordal(derived_parameters(4.0)));
}

TEST_CASE("derived parameters are recompute-consistent") {
  for (double k : {0.5, 1.0, 2.0, 8.0 / 3.0, 3.0, 4.0}) {
    auto a = derived_parameters(k);
    auto b = derived_parameters(a.kappa);
    CHECK(a.b == b.b);
    CHECK(a.c == b.c);
    CHECK(a.beta == b.beta);
    CHECK(std::abs(a.beta * a.kappa - 8.0) <= 8.0 * std::numeric_limits<double>::epsilon());
  }
}

TEST_CASE("exponent examples") {
  CHECK(exponents(1, 4.0).arm == 1.0);
  CHECK(exponents(2, 4.0).arm == 4.0);
  CHECK(exponents(1, 8.0 / 3.0).arm == doctest::Approx(2.0).epsilon(1e-14));
  for (int n = 1; n <= 6; ++n) CHECK(arm_exponent(n, 4.0) == doctest::Approx(n * n).epsilon(1e-15));
}

TEST_CASE("arm exponent identity in exact rational arithmetic") {
  using Q = boost::rational<long long>;
  for (int n = 1; n <= 6; ++n)
    for (Q k : {Q(2), Q(3), Q(4), Q(8, 3), Q(1, 2)}) {
      const Q arm = Q(n) * (Q(4 * n + 4) - k) / k;
      const Q p = Q(2 * n);
      const Q lambda = p * (Q(4) * p - Q(4) + k) / k;
      const Q lambda_prime = Q(n) * (Q(12 * n - 12) + Q(3) * k) / k;
      CHECK(arm == lambda - lambda_prime);
      // A = h_{1,2n+1} = s(s + 2)/kappa - s/2 with s = 2n
      const Q s(2 * n);
      const Q kac = s * (s + Q(2)) / k - s / Q(2);
      CHECK(arm == kac);
    }
}

TEST_CASE("floating exponents satisfy the identity") {
  for (int n = 1; n <= 6; ++n)
    for (double k : {2.0, 3.0, 4.0}) {
      auto e = exponents(n, k);
      CHECK(e.arm == doctest::Approx(e.lambda_p - e.lambda_prime_2n).epsilon(1e-13));
      CHECK(e.lambda_p == doctest::Approx(dyson_exponent(2 * n, k)).epsilon(1e-15));
      CHECK(kac_weight(2 * n, k) == doctest::Approx(e.arm).epsilon(1e-13));
    }
}

TEST_CASE("boundary config ordering") {
  CHECK_NOTHROW(BoundaryConfig({0.0, 1.0, 3.0}));
  CHECK_THROWS_AS(BoundaryConfig({0.0, 0.0}), InvalidConfig);
  CHECK_THROWS_AS(BoundaryConfig({1.0, 0.0}), InvalidConfig);
  CHECK_THROWS_AS(BoundaryConfig(std::vector<double>{}), InvalidConfig);
  BoundaryConfig x{0.0, 1.0, 3.0};
  CHECK(x.min_gap() == 1.0);
  CHECK(x.diameter() == 3.0);
  CHECK(is_strictly_increasing(std::vector<double>{1, 2, 3}));
  CHECK_FALSE(is_strictly_increasing(std::vector<double>{1, 2, 2}));
}

TEST_CASE("link pattern examples") {
  auto one = enumerate_link_patterns(1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].pairs() == std::vector<LinkPattern::Pair>{{1, 2}});
  CHECK(enumerate_link_patterns(3).size() == 5);
  CHECK(enumerate_link_patterns(4).size() == 14);
  CHECK_THROWS_AS(enumerate_link_patterns(0), InvalidParameter);
  CHECK_THROWS_AS(enumerate_link_patterns(13), InvalidParameter);
}

TEST_CASE("link patterns are planar, complete and distinct") {
  for (int n = 1; n <= 8; ++n) {
    auto all = enumerate_link_patterns(n);
    CHECK(all.size() == catalan(n));
    std::set<LinkPattern> seen(all.begin(), all.end());
    CHECK(seen.size() == all.size());
    CHECK(std::is_sorted(all.begin(), all.end()));
    for (const auto& lp : all) {
      std::vector<int> hits(2 * n + 1, 0);
      for (auto [a, b] : lp.pairs()) {
        ++hits[a];
        ++hits[b];
        CHECK(lp.partner(a) == b);
        CHECK(lp.partner(b) == a);
      }
      for (int i = 1; i <= 2 * n; ++i) CHECK(hits[i] == 1);
      for (auto [a, b] : lp.pairs())
        for (auto [c, d] : lp.pairs()) CHECK_FALSE((a < c && c < b && b < d));
    }
  }
}

TEST_CASE("link pattern constructor rejects crossings") {
  CHECK_THROWS_AS(LinkPattern({{1, 3}, {2, 4}}), InvalidInput);
  CHECK_THROWS_AS(LinkPattern({{1, 2}, {2, 3}}), InvalidInput);
  CHECK_NOTHROW(LinkPattern({{1, 4}, {2, 3}}));
}

}
