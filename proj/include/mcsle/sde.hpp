#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcsle/core.hpp"
#include "mcsle/partition.hpp"

namespace mcsle {

enum class DriftKind { dyson, pure, gff, sle_rho };

/// Which driving SDE to integrate. Construct through the named factories.
///
/// For sle_rho the state is the ordered tuple (V_left..., W, V_right...): the
/// driving point W sits at index rho_left.size() and is the only noisy coordinate.
class DriftSpec {
 public:
  static DriftSpec dyson(const ModelParams& params);
  static DriftSpec pure(PartitionFunction z_alpha, const ModelParams& params);
  /// Level lines of the GFF; kappa is fixed to 4.
  static DriftSpec gff();
  static DriftSpec sle_rho(std::vector<double> rho_left, std::vector<double> rho_right,
                           const ModelParams& params);

  DriftKind kind() const { return kind_; }
  const ModelParams& params() const { return params_; }
  const std::optional<PartitionFunction>& z_alpha() const { return z_alpha_; }
  const std::vector<double>& rho_left() const { return rho_left_; }
  const std::vector<double>& rho_right() const { return rho_right_; }
  std::string label() const;

  /// Throws InvalidConfig if this drift cannot drive p points.
  void check_arity(std::size_t p) const;
  /// Noise coefficient of coordinate j (sqrt(kappa), or 0 for SLE(rho) force points).
  double noise_scale(std::size_t j) const;

  /// Unchecked drift evaluation for hot loops; x must be ordered and of valid arity.
  void drift_into(std::span<const double> x, std::span<double> out) const;

 private:
  DriftSpec(DriftKind kind, const ModelParams& params) : kind_(kind), params_(params) {}

  DriftKind kind_;
  ModelParams params_;
  std::optional<PartitionFunction> z_alpha_;
  std::vector<double> rho_left_, rho_right_;
};

/// Closed-form drift vector. Throws InvalidConfig on unordered input or arity mismatch.
std::vector<double> drift(const DriftSpec& spec, const BoundaryConfig& x);

struct SimConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  /// Minimum-gap threshold; default 1e-6 times the initial diameter.
  std::optional<double> collision_eps;
  std::uint64_t seed = 0;
  std::size_t paths = 1;
  /// Snapshot times in (0, t_end]; t_end is always appended.
  std::vector<double> observation_times;
  bool store_trajectories = true;
  std::size_t threads = 0;
  double theta = 0.1;
  int max_halvings = 40;
  /// Kill paths whose accepted step hides a collision (Bessel-bridge crossing test).
  bool bridge_correction = true;

  void validate() const;
};

enum class PathStatus : std::uint8_t { survived = 0, collided = 1, numerically_absorbed = 2 };

/// Batch of simulated trajectories. Snapshot values after a path's death are NaN.
struct PathEnsemble {
  std::size_t p = 0;
  std::size_t paths = 0;
  std::vector<double> grid;
  std::vector<double> values;    // [path][grid][coordinate], empty unless stored
  std::vector<double> lifetime;  // +inf for survivors
  std::vector<PathStatus> status;
  double diffused_scale = 0.0;

  bool stored() const { return !values.empty(); }
  std::span<const double> snapshot(std::size_t path, std::size_t grid_index) const {
    return {values.data() + (path * grid.size() + grid_index) * p, p};
  }
  bool alive_at(std::size_t path, double t) const { return lifetime[path] > t; }
  double survival_fraction(double t) const;
  std::size_t survivors(double t) const;
  std::size_t count(PathStatus s) const;
};

/// Integrate one path; the ensemble produced by simulate() is the concatenation of these.
struct SinglePath {
  std::vector<double> snapshots;  // grid.size() * p, NaN after death
  double lifetime = std::numeric_limits<double>::infinity();
  PathStatus status = PathStatus::survived;
  std::size_t steps = 0;
};

std::vector<double> observation_grid(const SimConfig& cfg);
double collision_threshold(const SimConfig& cfg, const BoundaryConfig& x0);

SinglePath simulate_path(const DriftSpec& spec, const BoundaryConfig& x0, const SimConfig& cfg,
                         std::span<const double> grid, double eps, std::uint64_t path_index);

PathEnsemble simulate(const DriftSpec& spec, const BoundaryConfig& x0, const SimConfig& cfg);

/// CSV: header "path,t,x_1,...,x_p", one row per stored live snapshot.
void write_ensemble_csv(const PathEnsemble& e, std::ostream& out);
void write_ensemble_csv(const PathEnsemble& e, const std::string& path);

/// Binary layout (little endian): "MCSLEENS", u32 version = 1, u32 p, u64 paths,
/// u64 grid length, u8 stored flag, f64 grid[], f64 lifetime[], u8 status[],
/// f64 values[] when stored, f64 diffused_scale.
void write_ensemble_binary(const PathEnsemble& e, std::ostream& out);
void write_ensemble_binary(const PathEnsemble& e, const std::string& path);
PathEnsemble read_ensemble_binary(std::istream& in);
PathEnsemble read_ensemble_binary(const std::string& path);

}  // namespace mcsle
