#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mcsle {

using Complex = std::complex<double>;

/// Real driving function sampled at increasing times starting at 0.
struct DrivingSeries {
  std::vector<double> times;
  std::vector<double> values;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  double t_end() const { return times.empty() ? 0.0 : times.back(); }
  /// Linear interpolation, clamped at the ends.
  double at(double t) const;
  void validate() const;
};

/// sqrt(kappa) B_t on a uniform grid of `steps` increments over [0, t_end].
DrivingSeries brownian_driving(double kappa, double t_end, std::size_t steps, std::uint64_t seed,
                               std::uint64_t stream = 0);

/// Planar curve in the closed upper half-plane, parameterized by half-plane capacity.
struct Curve {
  std::vector<Complex> points;
  std::vector<double> capacity_times;
  std::optional<double> kappa;

  std::size_t size() const { return points.size(); }
  double hcap() const { return capacity_times.empty() ? 0.0 : capacity_times.back(); }
  /// Throws InvalidInput if the base point is off the real line, later points are not
  /// strictly above it, or capacity times are not strictly increasing from 0.
  void validate() const;
  Curve prefix(std::size_t count) const;
};

struct TraceOptions {
  /// Number of uniform capacity steps; 0 uses the driving samples as given.
  std::size_t steps = 0;
  /// Keep every stride-th tip (the final tip is always kept). Cost is O(steps^2 / stride).
  std::size_t stride = 1;
};

/// Zipper tracing with piecewise-constant driving: on each interval the driving value is
/// frozen at its right endpoint and the hull grows by an exact vertical slit.
Curve trace_curve(const DrivingSeries& driving, const TraceOptions& opts = {});

/// Inverse of trace_curve: unzips the curve one point at a time, reading each driving
/// value and capacity increment off the image of the next point.
DrivingSeries recover_driving(const Curve& curve);

/// True if no two segments more than `local_window` indices apart intersect
/// (local_window = 1 tests every non-adjacent pair). recover_driving uses a window of 8.
bool is_simple_polyline(std::span<const Complex> points, std::size_t local_window = 1);

/// The hull-growth maps applied to tracked points: g_t(z) for z in the closed half-plane.
struct LoewnerState {
  DrivingSeries driving;
  std::vector<Complex> points;
  std::vector<bool> swallowed;
  double total_capacity = 0.0;  // 2t in the z + 2t/z normalization
};

LoewnerState loewner_evolve(const DrivingSeries& driving, std::span<const Complex> points);

struct HsizResult {
  double area = 0.0;
  double error_bound = 0.0;
  double resolution = 0.0;
};

/// Area of the union of the disks B_v(u + iv) over points u + iv of the curve, by column
/// sweep on a grid of width h (resolution <= 0 is rejected; use hsiz_default for
/// h = bounding-box side / 1000). Segments are densified to spacing <= h.
HsizResult hsiz(const Curve& curve, double resolution);
HsizResult hsiz_default(const Curve& curve);
double hsiz_default_resolution(const Curve& curve);

struct HsizHcapReport {
  double hsiz = 0.0;
  double hcap = 0.0;
  double error_bound = 0.0;
  bool lower_ok = true;  // hsiz / 132 < hcap (1 + delta)
  bool upper_ok = true;  // hcap < 7 / (4 pi) hsiz (1 + delta)
  bool ok() const { return lower_ok && upper_ok; }
};

HsizHcapReport hsiz_hcap_check(const Curve& curve, double resolution, double delta = 0.05);

/// Real Mobius map z -> (a z + b) / (c z + d) with ad - bc > 0.
struct Mobius {
  double a = 1, b = 0, c = 0, d = 1;
  Complex operator()(Complex z) const;
  Mobius inverse() const;
};

/// Self-map of the upper half-plane sending x to 0 and y to infinity.
struct ChordTransport {
  double x = 0, y = 0;
  Mobius forward;
  Mobius inverse;
};

ChordTransport chord_transport(double x, double y);

/// Chord from x to y: trace in (H; 0, inf) coordinates and pull back. Capacity times are
/// those of the 0-to-infinity chart.
Curve trace_chord(double x, double y, const DrivingSeries& driving, const TraceOptions& opts = {});

/// CSV with header "t,re,im".
void write_curve_csv(const Curve& c, std::ostream& out);
void write_curve_csv(const Curve& c, const std::string& path);
Curve read_curve_csv(std::istream& in);
Curve read_curve_csv(const std::string& path);

/// CSV with header "t,w".
void write_driving_csv(const DrivingSeries& d, std::ostream& out);
DrivingSeries read_driving_csv(std::istream& in);
DrivingSeries read_driving_csv(const std::string& path);

}  // namespace mcsle
