#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "mcsle/errors.hpp"
#include "mcsle/loewner.hpp"

using namespace mcsle;

namespace {

DrivingSeries constant_driving(double w, double t_end, std::size_t steps) {
  DrivingSeries d;
  for (std::size_t i = 0; i <= steps; ++i) {
    d.times.push_back(t_end * static_cast<double>(i) / static_cast<double>(steps));
    d.values.push_back(w);
  }
  return d;
}

// W_t = c sqrt(t) grows a straight ray
DrivingSeries sqrt_driving(double c, std::size_t steps) {
  DrivingSeries d;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(steps);
    d.times.push_back(t);
    d.values.push_back(c * std::sqrt(t));
  }
  return d;
}

Curve segment(Complex a, Complex b, std::size_t n) {
  Curve c;
  for (std::size_t i = 0; i <= n; ++i) {
    c.points.push_back(a + (b - a) * (static_cast<double>(i) / static_cast<double>(n)));
    c.capacity_times.push_back(static_cast<double>(i));
  }
  return c;
}

}  // namespace

TEST_SUITE("loewner") {

TEST_CASE("vertical slit from constant driving") {
  auto c = trace_curve(constant_driving(0.0, 1.0, 400));
  CHECK(std::abs(c.points.back() - Complex(0, 2)) < 1e-3);
  CHECK(c.hcap() == doctest::Approx(1.0));
  for (const auto& z : c.points) CHECK(std::abs(z.real()) < 1e-9);

  auto shifted = trace_curve(constant_driving(3.0, 1.0, 400));
  CHECK(std::abs(shifted.points.back() - Complex(3, 2)) < 1e-3);
  auto w = recover_driving(shifted);
  REQUIRE(w.size() == shifted.size());
  for (double v : w.values) CHECK(v == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(w.t_end() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("empty and invalid driving") {
  auto base = trace_curve(DrivingSeries{});
  CHECK(base.size() == 1);
  CHECK(base.hcap() == 0.0);
  CHECK(recover_driving(base).empty());
  DrivingSeries bad;
  bad.times = {0.0, 0.5, 0.4};
  bad.values = {0, 0, 0};
  CHECK_THROWS_AS(trace_curve(bad), InvalidInput);
}

TEST_CASE("recover rejects curves that are not simple") {
  Curve c;
  // up, right, down, then back left across the first leg
  c.points = {Complex(0, 0),    Complex(0, 0.5),  Complex(0, 1),    Complex(0, 1.5),  Complex(0, 2),
              Complex(0.5, 2),  Complex(1, 2),    Complex(1.5, 2),  Complex(2, 2),    Complex(2, 1.5),
              Complex(1.5, 1.25), Complex(1, 1.25), Complex(0.5, 1.25), Complex(-0.5, 1.25)};
  for (std::size_t i = 0; i < c.points.size(); ++i) c.capacity_times.push_back(static_cast<double>(i));
  CHECK_FALSE(is_simple_polyline(c.points));
  CHECK_FALSE(is_simple_polyline(c.points, 8));
  CHECK_THROWS(recover_driving(c));
  CHECK(is_simple_polyline(segment(0, Complex(0, 1), 10).points));
}

TEST_CASE("trace and recover round trip on a Brownian driver") {
  auto d = brownian_driving(3.0, 1.0, 500, 11);
  auto c = trace_curve(d);
  auto r = recover_driving(c);
  REQUIRE(r.size() == d.size());
  double worst = 0;
  for (std::size_t i = 0; i < d.size(); ++i) worst = std::max(worst, std::abs(r.values[i] - d.values[i]));
  CHECK(worst < 0.05);
  CHECK(r.t_end() == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("straight ray converges at first order") {
  // W_t = c sqrt(t) with c = 2 (1 - 2a) / sqrt(a (1 - a)) traces a ray at angle a pi
  const double a = 0.25;
  const double c = 2.0 * (1 - 2 * a) / std::sqrt(a * (1 - a));
  std::vector<double> err;
  Complex reference = trace_curve(sqrt_driving(c, 8000), {.steps = 0, .stride = 8000}).points.back();
  const double angle = std::arg(reference);
  CHECK((std::abs(angle - a * std::numbers::pi) < 0.01 || std::abs(angle - (1 - a) * std::numbers::pi) < 0.01));
  for (std::size_t steps : {250u, 500u, 1000u}) {
    auto tip = trace_curve(sqrt_driving(c, steps), {.steps = 0, .stride = steps}).points.back();
    err.push_back(std::abs(tip - reference));
  }
  CHECK(err[0] / err[1] > 1.6);
  CHECK(err[0] / err[1] < 2.6);
  CHECK(err[1] / err[2] > 1.6);
  CHECK(err[1] / err[2] < 2.6);
}

TEST_CASE("stride keeps the final tip") {
  auto d = brownian_driving(2.0, 1.0, 300, 3);
  auto full = trace_curve(d);
  auto sparse = trace_curve(d, {.steps = 0, .stride = 7});
  CHECK(std::abs(full.points.back() - sparse.points.back()) < 1e-12);
  CHECK(sparse.size() < full.size());
  CHECK_NOTHROW(sparse.validate());
}

TEST_CASE("loewner flow fixes capacity and swallows nothing on the slit side") {
  auto d = constant_driving(0.0, 1.0, 100);
  std::vector<Complex> pts{Complex(0, 3), Complex(5, 0)};
  auto s = loewner_evolve(d, pts);
  CHECK(s.total_capacity == doctest::Approx(2.0));
  // g_t(z) = sqrt(z^2 + 4t) for the vertical slit
  CHECK(std::abs(s.points[0] - std::sqrt(Complex(-9 + 4, 0))) < 1e-6);
  CHECK(std::abs(s.points[1] - std::sqrt(Complex(29, 0))) < 1e-6);
}

TEST_CASE("hsiz of the vertical slit") {
  auto c = trace_curve(constant_driving(0.0, 1.0, 200));
  auto r = hsiz(c, 0.002);
  CHECK(r.area == doctest::Approx(4 * std::numbers::pi).epsilon(0.01));
  auto rep = hsiz_hcap_check(c, 0.002);
  CHECK(rep.ok());
  CHECK(rep.hcap == doctest::Approx(1.0));
}

TEST_CASE("hsiz basic properties") {
  Curve flat;
  flat.points = {Complex(0, 0)};
  flat.capacity_times = {0};
  CHECK(hsiz(flat, 0.01).area == 0.0);

  auto c = trace_curve(brownian_driving(3.0, 1.0, 300, 5));
  const double h = hsiz_default_resolution(c);
  const double a = hsiz(c, h).area;
  Curve big = c;
  for (auto& z : big.points) z *= 2.0;
  CHECK(hsiz(big, 2 * h).area == doctest::Approx(4 * a).epsilon(0.02));
  double prev = 0;
  for (std::size_t k : {10u, 50u, 150u, 301u}) {
    const double ak = hsiz(c.prefix(k), h).area;
    CHECK(ak >= prev - 1e-12);
    prev = ak;
  }
  CHECK_THROWS_AS(hsiz(c, 0.0), InvalidParameter);
  CHECK_THROWS_AS(hsiz(c, -1.0), InvalidParameter);
}

TEST_CASE("hsiz and hcap inequalities on SLE samples") {
  for (double kappa : {2.0, 4.0}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto c = trace_curve(brownian_driving(kappa, 1.0, 400, seed), {.steps = 0, .stride = 10});
      CHECK(hsiz_hcap_check(c, hsiz_default_resolution(c)).ok());
    }
  }
}

TEST_CASE("chord transport") {
  auto ct = chord_transport(0.0, 1.0);
  CHECK(std::abs(ct.forward(Complex(0.5, 0)) - Complex(1, 0)) < 1e-14);
  CHECK(std::abs(ct.forward(Complex(0, 0))) < 1e-14);
  const Complex z(0.3, 0.7);
  CHECK(std::abs(ct.inverse(ct.forward(z)) - z) < 1e-12);
  CHECK(ct.forward(z).imag() > 0);
  CHECK_THROWS(chord_transport(1.0, 1.0));

  auto straight = trace_chord(-1.0, 2.0, constant_driving(0.0, 1.0, 50));
  CHECK(std::abs(straight.points.front() - Complex(-1, 0)) < 1e-12);
  auto chord = trace_chord(-1.0, 2.0, brownian_driving(2.0, 1.0, 100, 1));
  CHECK(chord.points.front().imag() == 0.0);
  for (std::size_t i = 1; i < chord.size(); ++i) CHECK(chord.points[i].imag() > 0);
}

TEST_CASE("curve and driving CSV round trip") {
  auto d = brownian_driving(4.0, 1.0, 50, 2);
  std::stringstream ds;
  write_driving_csv(d, ds);
  auto d2 = read_driving_csv(ds);
  CHECK(d2.times == d.times);
  CHECK(d2.values == d.values);

  auto c = trace_curve(d);
  std::stringstream cs;
  write_curve_csv(c, cs);
  auto c2 = read_curve_csv(cs);
  CHECK(c2.points == c.points);
  CHECK(c2.capacity_times == c.capacity_times);

  std::stringstream junk("t,re,im\n0,0,zzz\n");
  CHECK_THROWS(read_curve_csv(junk));
  CHECK_THROWS_AS(read_curve_csv(std::string("/nonexistent/curve.csv")), IoError);
}

TEST_CASE("curve validation") {
  Curve c;
  c.points = {Complex(0, 0.5), Complex(0, 1)};
  c.capacity_times = {0, 1};
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c.points = {Complex(0, 0), Complex(0, -1)};
  CHECK_THROWS_AS(c.validate(), InvalidInput);
}

}
