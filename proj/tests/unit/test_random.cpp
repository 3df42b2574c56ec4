#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "mcsle/parallel.hpp"
#include "mcsle/random.hpp"

using namespace mcsle;

TEST_SUITE("random") {

// Known-answer vectors of the Random123 Philox4x32-10 reference implementation.
TEST_CASE("philox known answers") {
  {
    Philox4x32 g(0);
    auto r = g({0, 0, 0, 0});
    CHECK(r == Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  }
  {
    Philox4x32 g(0xffffffffffffffffull);
    auto r = g({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu});
    CHECK(r == Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  }
  {
    Philox4x32 g(0x299f31d0a4093822ull);
    auto r = g({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u});
    CHECK(r == Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  }
}

TEST_CASE("normal stream is addressable and reproducible") {
  NormalStream a(42, 7), b(42, 7), c(42, 8);
  std::vector<double> x(5), y(5), z(5);
  a.fill(3, x);
  b.fill(3, y);
  c.fill(3, z);
  CHECK(x == y);
  CHECK(x != z);
  a.fill(4, y);
  CHECK(x != y);
  CHECK(a.uniform(0) > 0.0);
  CHECK(a.uniform(0) < 1.0);
}

TEST_CASE("normal stream moments") {
  NormalStream s(1, 0);
  std::vector<double> buf(4);
  double m1 = 0, m2 = 0, m4 = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    s.fill(static_cast<std::uint64_t>(i), buf);
    for (double v : buf) {
      m1 += v;
      m2 += v * v;
      m4 += v * v * v * v;
    }
  }
  const double n = 4.0 * draws;
  CHECK(std::abs(m1 / n) < 4.0 / std::sqrt(n));
  CHECK(m2 / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(m4 / n == doctest::Approx(3.0).epsilon(0.03));
}

TEST_CASE("mix_seed separates tags") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 4; ++s)
    for (std::uint64_t t = 0; t < 8; ++t) seen.insert(mix_seed(s, t));
  CHECK(seen.size() == 32);
}

TEST_CASE("parallel_for covers every index once regardless of threads") {
  for (std::size_t threads : {1u, 2u, 3u}) {
    std::vector<int> hits(1001, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, threads);
    for (int h : hits) CHECK(h == 1);
  }
}

}
