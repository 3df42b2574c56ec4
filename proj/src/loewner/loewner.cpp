#include "mcsle/loewner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "mcsle/errors.hpp"
#include "mcsle/random.hpp"

namespace mcsle {

namespace {

// f(w) = U + sqrt((w - U)^2 - 4 dt): inverse of the slit map, w in the closed upper
// half-plane. Both factors lie in the upper half-plane, so the product of principal
// roots picks the branch with nonnegative imaginary part, also on the real line.
Complex unzip_inverse(Complex w, double u, double dt) {
  const double s = 2.0 * std::sqrt(dt);
  Complex a = w - u - s, b = w - u + s;
  if (a.imag() == 0.0) a.imag(0.0);  // normalize -0
  if (b.imag() == 0.0) b.imag(0.0);
  return u + std::sqrt(a) * std::sqrt(b);
}

// g(z) = U + sqrt((z - U)^2 + 4 dt): maps the upper half-plane minus the slit onto it.
Complex zip_forward(Complex z, double u, double dt) {
  const Complex d = z - u;
  Complex r = std::sqrt(d * d + 4.0 * dt);
  if (r.imag() < 0.0 || (r.imag() == 0.0 && (r.real() < 0.0) != (d.real() < 0.0))) r = -r;
  return u + Complex(r.real(), std::max(r.imag(), 0.0));
}

struct Seg {
  Complex a, b;
};

double cross(Complex o, Complex p, Complex q) {
  return (p.real() - o.real()) * (q.imag() - o.imag()) - (p.imag() - o.imag()) * (q.real() - o.real());
}

bool on_segment(Complex p, Complex q, Complex r) {
  return std::min(p.real(), r.real()) <= q.real() && q.real() <= std::max(p.real(), r.real()) &&
         std::min(p.imag(), r.imag()) <= q.imag() && q.imag() <= std::max(p.imag(), r.imag());
}

bool segments_intersect(const Seg& s, const Seg& t) {
  const double d1 = cross(t.a, t.b, s.a), d2 = cross(t.a, t.b, s.b);
  const double d3 = cross(s.a, s.b, t.a), d4 = cross(s.a, s.b, t.b);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_segment(t.a, s.a, t.b)) return true;
  if (d2 == 0 && on_segment(t.a, s.b, t.b)) return true;
  if (d3 == 0 && on_segment(s.a, t.a, s.b)) return true;
  if (d4 == 0 && on_segment(s.a, t.b, s.b)) return true;
  return false;
}

// Piecewise-constant zipper curves are trees of tiny slits at the step scale, so the
// polyline through successive tips can cross itself a few indices back. Recovery only
// rejects crossings between segments further apart than this.
constexpr std::size_t kRecoverWindow = 8;

}  // namespace

double DrivingSeries::at(double t) const {
  if (times.empty()) throw InvalidInput("empty driving series");
  if (t <= times.front()) return values.front();
  if (t >= times.back()) return values.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - times.begin());
  const double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
  return values[k - 1] + w * (values[k] - values[k - 1]);
}

void DrivingSeries::validate() const {
  if (times.size() != values.size()) throw InvalidInput("driving times and values differ in length");
  if (times.empty()) return;
  if (times.front() != 0.0) throw InvalidInput("driving series must start at t = 0");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(times[k]) || !std::isfinite(values[k]))
      throw InvalidInput("driving series contains NaN or Inf");
    if (k > 0 && !(times[k] > times[k - 1]))
      throw InvalidInput("driving times must be strictly increasing");
  }
}

DrivingSeries brownian_driving(double kappa, double t_end, std::size_t steps, std::uint64_t seed,
                               std::uint64_t stream) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidParameter("kappa must be positive");
  if (!(t_end > 0.0)) throw InvalidParameter("t_end must be positive");
  if (steps == 0) throw InvalidParameter("steps must be positive");
  std::vector<double> z(steps);
  NormalStream(seed, stream).fill(0, z);
  DrivingSeries d;
  d.times.resize(steps + 1);
  d.values.resize(steps + 1);
  const double dt = t_end / static_cast<double>(steps);
  const double scale = std::sqrt(kappa * dt);
  d.times[0] = 0.0;
  d.values[0] = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    d.times[k] = t_end * static_cast<double>(k) / static_cast<double>(steps);
    d.values[k] = d.values[k - 1] + scale * z[k - 1];
  }
  return d;
}

void Curve::validate() const {
  if (points.size() != capacity_times.size())
    throw InvalidInput("curve points and capacity times differ in length");
  if (points.empty()) throw InvalidInput("curve has no points");
  if (points[0].imag() != 0.0) throw InvalidInput("curve must start on the real line");
  if (capacity_times[0] != 0.0) throw InvalidInput("capacity times must start at 0");
  for (std::size_t k = 1; k < points.size(); ++k) {
    if (!std::isfinite(points[k].real()) || !std::isfinite(points[k].imag()))
      throw InvalidInput("curve contains NaN or Inf");
    if (!(points[k].imag() > 0.0)) throw InvalidInput("curve leaves the open upper half-plane");
    if (!(capacity_times[k] > capacity_times[k - 1]))
      throw InvalidInput("capacity times must be strictly increasing");
  }
}

Curve Curve::prefix(std::size_t count) const {
  count = std::min(count, points.size());
  Curve c;
  c.points.assign(points.begin(), points.begin() + static_cast<std::ptrdiff_t>(count));
  c.capacity_times.assign(capacity_times.begin(),
                          capacity_times.begin() + static_cast<std::ptrdiff_t>(count));
  c.kappa = kappa;
  return c;
}

Curve trace_curve(const DrivingSeries& driving, const TraceOptions& opts) {
  driving.validate();
  if (opts.stride == 0) throw InvalidParameter("stride must be positive");
  Curve curve;
  if (driving.empty() || driving.t_end() == 0.0) {
    curve.points.push_back(driving.empty() ? 0.0 : driving.values.front());
    curve.capacity_times.push_back(0.0);
    return curve;
  }

  std::vector<double> t, u;
  if (opts.steps > 0) {
    t.resize(opts.steps + 1);
    u.resize(opts.steps + 1);
    for (std::size_t k = 0; k <= opts.steps; ++k) {
      t[k] = driving.t_end() * static_cast<double>(k) / static_cast<double>(opts.steps);
      u[k] = driving.at(t[k]);
    }
    t.back() = driving.t_end();
  } else {
    t = driving.times;
    u = driving.values;
  }
  const std::size_t n = t.size() - 1;
  std::vector<double> dt(n + 1, 0.0);
  for (std::size_t k = 1; k <= n; ++k) dt[k] = t[k] - t[k - 1];

  curve.points.push_back(u[1]);
  curve.capacity_times.push_back(0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    if (k % opts.stride != 0 && k != n) continue;
    Complex w(u[k], 2.0 * std::sqrt(dt[k]));
    for (std::size_t i = k - 1; i >= 1; --i) w = unzip_inverse(w, u[i], dt[i]);
    curve.points.push_back(w);
    curve.capacity_times.push_back(t[k]);
  }
  return curve;
}

DrivingSeries recover_driving(const Curve& curve) {
  curve.validate();
  DrivingSeries d;
  if (curve.points.size() < 2) return d;
  if (!is_simple_polyline(curve.points, kRecoverWindow)) throw InvalidInput("curve self-intersects");

  std::vector<Complex> z(curve.points.begin() + 1, curve.points.end());
  d.times.push_back(0.0);
  d.values.push_back(curve.points[0].real());
  double t = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double uk = z[k].real();
    const double dtk = 0.25 * z[k].imag() * z[k].imag();
    if (!(dtk > 0.0)) throw InvalidInput("curve point swallowed during unzipping");
    t += dtk;
    d.times.push_back(t);
    d.values.push_back(uk);
    for (std::size_t j = k + 1; j < z.size(); ++j) z[j] = zip_forward(z[j], uk, dtk);
  }
  return d;
}

bool is_simple_polyline(std::span<const Complex> pts, std::size_t local_window) {
  local_window = std::max<std::size_t>(local_window, 1);
  const std::size_t m = pts.size() < 2 ? 0 : pts.size() - 1;
  if (m < 2) return true;
  double xmin = pts[0].real(), xmax = xmin, ymin = pts[0].imag(), ymax = ymin;
  for (const auto& p : pts) {
    xmin = std::min(xmin, p.real());
    xmax = std::max(xmax, p.real());
    ymin = std::min(ymin, p.imag());
    ymax = std::max(ymax, p.imag());
  }
  const double side = std::max({xmax - xmin, ymax - ymin, 1e-300});
  const double cells_per_side = std::max(1.0, std::floor(std::sqrt(static_cast<double>(m))));
  const double cell = side / cells_per_side;
  const auto key = [](long long i, long long j) { return (i << 32) ^ (j & 0xFFFFFFFFLL); };
  std::unordered_map<long long, std::vector<std::size_t>> grid;
  for (std::size_t s = 0; s < m; ++s) {
    const Complex a = pts[s], b = pts[s + 1];
    const auto i0 = static_cast<long long>(std::floor((std::min(a.real(), b.real()) - xmin) / cell));
    const auto i1 = static_cast<long long>(std::floor((std::max(a.real(), b.real()) - xmin) / cell));
    const auto j0 = static_cast<long long>(std::floor((std::min(a.imag(), b.imag()) - ymin) / cell));
    const auto j1 = static_cast<long long>(std::floor((std::max(a.imag(), b.imag()) - ymin) / cell));
    for (long long i = i0; i <= i1; ++i)
      for (long long j = j0; j <= j1; ++j) {
        auto& bucket = grid[key(i, j)];
        for (std::size_t other : bucket) {
          if (s - other <= local_window) continue;
          if (segments_intersect({pts[other], pts[other + 1]}, {a, b})) return false;
        }
        bucket.push_back(s);
      }
  }
  return true;
}

LoewnerState loewner_evolve(const DrivingSeries& driving, std::span<const Complex> points) {
  driving.validate();
  LoewnerState st;
  st.driving = driving;
  st.points.assign(points.begin(), points.end());
  st.swallowed.assign(points.size(), false);
  for (std::size_t i = 0; i < st.points.size(); ++i)
    if (st.points[i].imag() < 0.0) throw InvalidInput("tracked points must lie in the closed upper half-plane");
  for (std::size_t k = 1; k < driving.size(); ++k) {
    const double u = driving.values[k];
    const double dt = driving.times[k] - driving.times[k - 1];
    const double half_width = 2.0 * std::sqrt(dt);
    for (std::size_t i = 0; i < st.points.size(); ++i) {
      if (st.swallowed[i]) continue;
      const Complex z = st.points[i];
      // A real point the slit base lands on (or an interior point mapped to the
      // boundary) has joined the hull.
      if (z.imag() == 0.0 && std::abs(z.real() - u) <= half_width * 1e-12) {
        st.swallowed[i] = true;
        continue;
      }
      const bool was_interior = z.imag() > 0.0;
      st.points[i] = zip_forward(z, u, dt);
      if (was_interior && st.points[i].imag() <= 0.0) st.swallowed[i] = true;
    }
  }
  st.total_capacity = 2.0 * driving.t_end();
  return st;
}

double hsiz_default_resolution(const Curve& curve) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymax = 0.0;
  for (const auto& p : curve.points) {
    const double v = std::max(p.imag(), 0.0);
    xmin = std::min(xmin, p.real() - v);
    xmax = std::max(xmax, p.real() + v);
    ymax = std::max(ymax, 2.0 * v);
  }
  const double side = std::max(xmax - xmin, ymax);
  return side > 0.0 ? side / 1000.0 : 1.0;
}

HsizResult hsiz(const Curve& curve, double resolution) {
  if (!(resolution > 0.0) || !std::isfinite(resolution))
    throw InvalidParameter("hsiz resolution must be positive");
  HsizResult res;
  res.resolution = resolution;
  const double h = resolution;

  // Disks (u, v) of radius v along the polyline, sampled at spacing <= h.
  struct Disk {
    double u, v;
  };
  std::vector<Disk> disks;
  auto add = [&](Complex z) {
    if (z.imag() > 0.0) disks.push_back({z.real(), z.imag()});
  };
  for (std::size_t k = 0; k < curve.points.size(); ++k) {
    add(curve.points[k]);
    if (k + 1 == curve.points.size()) break;
    const Complex a = curve.points[k], b = curve.points[k + 1];
    const auto sub = static_cast<std::size_t>(std::ceil(std::abs(b - a) / h));
    for (std::size_t s = 1; s < sub; ++s) add(a + (b - a) * (static_cast<double>(s) / static_cast<double>(sub)));
  }
  if (disks.empty()) return res;

  // Drop disks nested inside a larger kept disk; along a curve most of them are.
  std::sort(disks.begin(), disks.end(), [](const Disk& p, const Disk& q) { return p.v > q.v; });
  std::vector<Disk> kept;
  for (const Disk& d : disks) {
    bool inside = false;
    for (const Disk& k : kept) {
      if (std::hypot(d.u - k.u, d.v - k.v) + d.v <= k.v) {
        inside = true;
        break;
      }
    }
    if (!inside) kept.push_back(d);
  }

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymax = 0.0;
  for (const Disk& d : kept) {
    xmin = std::min(xmin, d.u - d.v);
    xmax = std::max(xmax, d.u + d.v);
    ymax = std::max(ymax, 2.0 * d.v);
  }
  std::sort(kept.begin(), kept.end(), [](const Disk& p, const Disk& q) { return p.u - p.v < q.u - q.v; });

  const auto columns = static_cast<std::size_t>(std::ceil((xmax - xmin) / h));
  std::vector<const Disk*> active;
  std::vector<std::pair<double, double>> spans;
  std::size_t next = 0;
  double total = 0.0;
  for (std::size_t c = 0; c < columns; ++c) {
    const double x = xmin + (static_cast<double>(c) + 0.5) * h;
    while (next < kept.size() && kept[next].u - kept[next].v < x) active.push_back(&kept[next++]);
    std::erase_if(active, [x](const Disk* d) { return d->u + d->v <= x; });
    spans.clear();
    for (const Disk* d : active) {
      const double dx = x - d->u;
      const double s2 = d->v * d->v - dx * dx;
      if (s2 <= 0.0) continue;
      const double s = std::sqrt(s2);
      spans.emplace_back(d->v - s, d->v + s);
    }
    std::sort(spans.begin(), spans.end());
    double lo = 0.0, hi = -1.0, len = 0.0;
    for (const auto& [a, b] : spans) {
      if (a > hi) {
        if (hi > lo) len += hi - lo;
        lo = a;
        hi = b;
      } else {
        hi = std::max(hi, b);
      }
    }
    if (hi > lo) len += hi - lo;
    total += len;
  }
  res.area = total * h;
  res.error_bound = h * 2.0 * ((xmax - xmin) + ymax);
  return res;
}

HsizResult hsiz_default(const Curve& curve) { return hsiz(curve, hsiz_default_resolution(curve)); }

HsizHcapReport hsiz_hcap_check(const Curve& curve, double resolution, double delta) {
  const HsizResult hr = hsiz(curve, resolution);
  HsizHcapReport r;
  r.hsiz = hr.area;
  r.error_bound = hr.error_bound;
  r.hcap = curve.hcap();
  if (r.hsiz == 0.0 && r.hcap == 0.0) return r;  // vacuous
  r.lower_ok = r.hsiz / 132.0 < r.hcap * (1.0 + delta);
  r.upper_ok = r.hcap < 7.0 / (4.0 * std::numbers::pi) * r.hsiz * (1.0 + delta);
  return r;
}

Complex Mobius::operator()(Complex z) const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (std::isinf(z.real()) || std::isinf(z.imag())) return c == 0.0 ? Complex(inf, 0.0) : Complex(a / c, 0.0);
  const Complex den = c * z + d;
  if (den == 0.0) return {inf, 0.0};
  return (a * z + b) / den;
}

Mobius Mobius::inverse() const { return {d, -b, -c, a}; }

ChordTransport chord_transport(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) throw InvalidParameter("chord endpoints must be finite");
  if (x == y) throw InvalidParameter("chord endpoints must differ");
  ChordTransport t;
  t.x = x;
  t.y = y;
  t.forward = x < y ? Mobius{1.0, -x, -1.0, y} : Mobius{1.0, -x, 1.0, -y};
  t.inverse = t.forward.inverse();
  return t;
}

Curve trace_chord(double x, double y, const DrivingSeries& driving, const TraceOptions& opts) {
  const ChordTransport phi = chord_transport(x, y);
  Curve c = trace_curve(driving, opts);
  for (auto& p : c.points) p = phi.inverse(p);
  c.points[0].imag(0.0);
  return c;
}

}  // namespace mcsle
