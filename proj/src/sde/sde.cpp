#include "mcsle/sde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mcsle/errors.hpp"
#include "mcsle/parallel.hpp"
#include "mcsle/random.hpp"

namespace mcsle {

DriftSpec DriftSpec::dyson(const ModelParams& params) {
  derived_parameters(params.kappa);
  return DriftSpec(DriftKind::dyson, params);
}

DriftSpec DriftSpec::pure(PartitionFunction z_alpha, const ModelParams& params) {
  require_multichordal(params);
  if (z_alpha.arity() == 0 || z_alpha.arity() % 2 != 0)
    throw InvalidConfig("pure drift needs a partition function of fixed even arity");
  DriftSpec s(DriftKind::pure, params);
  s.z_alpha_ = std::move(z_alpha);
  return s;
}

DriftSpec DriftSpec::gff() { return DriftSpec(DriftKind::gff, derived_parameters(4.0)); }

DriftSpec DriftSpec::sle_rho(std::vector<double> rho_left, std::vector<double> rho_right,
                             const ModelParams& params) {
  derived_parameters(params.kappa);
  for (double r : rho_left)
    if (!std::isfinite(r)) throw InvalidParameter("rho weights must be finite");
  for (double r : rho_right)
    if (!std::isfinite(r)) throw InvalidParameter("rho weights must be finite");
  DriftSpec s(DriftKind::sle_rho, params);
  s.rho_left_ = std::move(rho_left);
  s.rho_right_ = std::move(rho_right);
  return s;
}

std::string DriftSpec::label() const {
  switch (kind_) {
    case DriftKind::dyson: return "dyson";
    case DriftKind::pure: return "pure(" + z_alpha_->label() + ")";
    case DriftKind::gff: return "gff";
    case DriftKind::sle_rho: return "sle_rho";
  }
  return "?";
}

void DriftSpec::check_arity(std::size_t p) const {
  switch (kind_) {
    case DriftKind::dyson:
      if (p < 1) throw InvalidConfig("dyson drift needs at least one point");
      return;
    case DriftKind::pure:
      if (p != z_alpha_->arity())
        throw InvalidConfig("pure drift: " + z_alpha_->label() + " expects " +
                            std::to_string(z_alpha_->arity()) + " points, got " + std::to_string(p));
      return;
    case DriftKind::gff:
      if (p == 0 || p % 2 != 0) throw InvalidConfig("gff drift needs an even number of points");
      return;
    case DriftKind::sle_rho:
      if (p != rho_left_.size() + rho_right_.size() + 1)
        throw InvalidConfig("sle_rho drift: expected one driving point plus " +
                            std::to_string(rho_left_.size() + rho_right_.size()) + " force points");
      return;
  }
}

double DriftSpec::noise_scale(std::size_t j) const {
  if (kind_ == DriftKind::sle_rho && j != rho_left_.size()) return 0.0;
  return std::sqrt(params_.kappa);
}

void DriftSpec::drift_into(std::span<const double> x, std::span<double> out) const {
  const std::size_t p = x.size();
  switch (kind_) {
    case DriftKind::dyson:
      for (std::size_t j = 0; j < p; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < p; ++k)
          if (k != j) s += 4.0 / (x[j] - x[k]);
        out[j] = s;
      }
      return;
    case DriftKind::pure:
      for (std::size_t j = 0; j < p; ++j) {
        double s = params_.kappa * z_alpha_->log_grad(x, j);
        for (std::size_t k = 0; k < p; ++k)
          if (k != j) s += 2.0 / (x[j] - x[k]);
        out[j] = s;
      }
      return;
    case DriftKind::gff:
      // 2((-1)^{j-k} + 1) is 4 for even index distance and 0 for odd.
      for (std::size_t j = 0; j < p; ++j) {
        double s = 0.0;
        for (std::size_t k = (j % 2); k < p; k += 2)
          if (k != j) s += 4.0 / (x[j] - x[k]);
        out[j] = s;
      }
      return;
    case DriftKind::sle_rho: {
      const std::size_t w = rho_left_.size();
      double s = 0.0;
      for (std::size_t i = 0; i < p; ++i) {
        if (i == w) continue;
        const double rho = i < w ? rho_left_[i] : rho_right_[i - w - 1];
        s += rho / (x[w] - x[i]);
        out[i] = 2.0 / (x[i] - x[w]);
      }
      out[w] = s;
      return;
    }
  }
}

std::vector<double> drift(const DriftSpec& spec, const BoundaryConfig& x) {
  if (!is_strictly_increasing(x.points()))
    throw InvalidConfig("drift: points must be strictly increasing");
  spec.check_arity(x.size());
  std::vector<double> out(x.size());
  spec.drift_into(x.points(), out);
  return out;
}

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameter("dt must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidParameter("t_end must be positive");
  if (collision_eps && !(*collision_eps > 0.0))
    throw InvalidParameter("collision_eps must be positive");
  if (paths < 1) throw InvalidParameter("paths must be at least 1");
  if (!(theta > 0.0)) throw InvalidParameter("theta must be positive");
  if (max_halvings < 0) throw InvalidParameter("max_halvings must be non-negative");
  for (double t : observation_times)
    if (!(t > 0.0) || t > t_end) throw InvalidParameter("observation times must lie in (0, t_end]");
}

double PathEnsemble::survival_fraction(double t) const {
  return paths == 0 ? 0.0 : static_cast<double>(survivors(t)) / static_cast<double>(paths);
}

std::size_t PathEnsemble::survivors(double t) const {
  return static_cast<std::size_t>(
      std::count_if(lifetime.begin(), lifetime.end(), [t](double T) { return T > t; }));
}

std::size_t PathEnsemble::count(PathStatus s) const {
  return static_cast<std::size_t>(std::count(status.begin(), status.end(), s));
}

std::vector<double> observation_grid(const SimConfig& cfg) {
  std::vector<double> g = cfg.observation_times;
  g.push_back(cfg.t_end);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

double collision_threshold(const SimConfig& cfg, const BoundaryConfig& x0) {
  if (cfg.collision_eps) return *cfg.collision_eps;
  const double d = x0.size() > 1 ? x0.diameter() : 1.0;
  return 1e-6 * d;
}

namespace {

// Kill test for a collision hidden inside an accepted step. Near a collision the gap of an
// adjacent pair is locally a Bessel process of dimension delta = 1 + 2 g d / s2 (d the gap
// drift, s2 its noise variance rate). Given both endpoints, the chance that the path met the
// threshold in between is sin(pi |nu|) exp(-2 a0 a1 / (s2 h)) with nu = delta / 2 - 1 in
// (-1, 0), and zero once delta >= 2; at delta = 1 this is the Brownian-bridge formula.
bool bridge_crossed(std::span<const double> x0, std::span<const double> x1, std::span<const double> mu,
                    std::span<const double> sigma, double h, double eps, const NormalStream& noise,
                    std::uint64_t& udraw) {
  for (std::size_t j = 0; j + 1 < x0.size(); ++j) {
    const double s2 = sigma[j] * sigma[j] + sigma[j + 1] * sigma[j + 1];
    if (s2 <= 0.0) continue;
    const double g0 = x0[j + 1] - x0[j];
    const double a0 = g0 - eps, a1 = x1[j + 1] - x1[j] - eps;
    if (a0 <= 0.0 || a1 <= 0.0) continue;
    const double nu = (2.0 * g0 * (mu[j + 1] - mu[j]) / s2 - 1.0) / 2.0;
    if (nu >= 0.0) continue;
    const double expo = 2.0 * a0 * a1 / (s2 * h);
    if (expo > 700.0) continue;
    const double weight = nu <= -1.0 ? 1.0 : std::sin(std::numbers::pi * -nu);
    if (noise.uniform(udraw++) < weight * std::exp(-expo)) return true;
  }
  return false;
}

}  // namespace

SinglePath simulate_path(const DriftSpec& spec, const BoundaryConfig& x0, const SimConfig& cfg,
                         std::span<const double> grid, double eps, std::uint64_t path_index) {
  const std::size_t p = x0.size();
  const NormalStream noise(cfg.seed, path_index);
  std::uint64_t draw = 0, udraw = 0;

  SinglePath out;
  out.snapshots.assign(grid.size() * p, std::numeric_limits<double>::quiet_NaN());

  std::vector<double> x = x0.vector();
  std::vector<double> y(p), mu(p), z(p), sigma(p);
  for (std::size_t j = 0; j < p; ++j) sigma[j] = spec.noise_scale(j);
  const double kappa = spec.params().kappa;
  const double inf = std::numeric_limits<double>::infinity();

  // Pending sub-steps, last in first out; increments live in a parallel flat pool.
  struct Segment {
    double h;
    int depth;
  };
  std::vector<Segment> stack;
  std::vector<double> pool, db(p);

  double t = 0.0;
  std::size_t gi = 0;
  while (gi < grid.size()) {
    const double target = grid[gi];
    const double gap = p > 1 ? min_gap(x) : inf;
    double h = std::min(cfg.dt, cfg.theta * gap * gap / kappa);
    const bool clipped = h >= target - t;
    if (clipped) h = target - t;

    // Each outer step owns one Brownian increment; sub-steps refine it with bridge draws
    // so that a rejected step never changes the underlying path.
    noise.fill(draw++, z);
    stack.assign(1, Segment{h, 0});
    pool.resize(p);
    for (std::size_t j = 0; j < p; ++j) pool[j] = std::sqrt(h) * z[j];

    double elapsed = 0.0;
    bool dead = false;
    while (!stack.empty() && !dead) {
      const Segment seg = stack.back();
      stack.pop_back();
      std::copy(pool.end() - static_cast<std::ptrdiff_t>(p), pool.end(), db.begin());
      pool.resize(pool.size() - p);

      const double g_now = p > 1 ? min_gap(x) : inf;
      bool ok = seg.depth == 0 || seg.h <= cfg.theta * g_now * g_now / kappa * (1.0 + 1e-9);
      if (ok) {
        spec.drift_into(x, mu);
        for (std::size_t j = 0; j < p; ++j) y[j] = x[j] + mu[j] * seg.h + sigma[j] * db[j];
        ok = is_strictly_increasing(y);
      }
      if (ok) {
        const bool crossed = cfg.bridge_correction && p > 1 && std::isfinite(eps) &&
                             bridge_crossed(x, y, mu, sigma, seg.h, eps, noise, udraw);
        x.swap(y);
        elapsed += seg.h;
        ++out.steps;
        if (p > 1 && (crossed || min_gap(x) < eps)) {
          out.lifetime = t + elapsed;
          out.status = PathStatus::collided;
          dead = true;
        }
        continue;
      }
      if (seg.depth >= cfg.max_halvings) {
        out.lifetime = t + elapsed;
        out.status = PathStatus::numerically_absorbed;
        dead = true;
        continue;
      }
      noise.fill(draw++, z);
      const double bridge = std::sqrt(seg.h / 4);
      const std::size_t base = pool.size();
      pool.resize(base + 2 * p);
      for (std::size_t j = 0; j < p; ++j) {
        const double first = db[j] / 2 + bridge * z[j];
        pool[base + j] = db[j] - first;  // second half, processed later
        pool[base + p + j] = first;
      }
      stack.push_back({seg.h / 2, seg.depth + 1});
      stack.push_back({seg.h / 2, seg.depth + 1});
    }
    if (dead) {
      if (out.lifetime <= 0.0) out.lifetime = std::numeric_limits<double>::denorm_min();
      break;
    }
    t = clipped ? target : t + h;
    if (clipped) {
      std::copy(x.begin(), x.end(), out.snapshots.begin() + static_cast<std::ptrdiff_t>(gi * p));
      ++gi;
    }
  }
  return out;
}

PathEnsemble simulate(const DriftSpec& spec, const BoundaryConfig& x0, const SimConfig& cfg) {
  cfg.validate();
  spec.check_arity(x0.size());
  if (!is_strictly_increasing(x0.points()))
    throw InvalidConfig("simulate: initial points must be strictly increasing");

  PathEnsemble e;
  e.p = x0.size();
  e.paths = cfg.paths;
  e.grid = observation_grid(cfg);
  e.lifetime.assign(cfg.paths, std::numeric_limits<double>::infinity());
  e.status.assign(cfg.paths, PathStatus::survived);
  e.diffused_scale = std::sqrt(spec.params().kappa);
  if (cfg.store_trajectories) e.values.assign(cfg.paths * e.grid.size() * e.p, 0.0);

  const double eps = collision_threshold(cfg, x0);
  const std::size_t stride = e.grid.size() * e.p;
  parallel_for(
      cfg.paths,
      [&](std::size_t i) {
        SinglePath r = simulate_path(spec, x0, cfg, e.grid, eps, i);
        e.lifetime[i] = r.lifetime;
        e.status[i] = r.status;
        if (cfg.store_trajectories)
          std::copy(r.snapshots.begin(), r.snapshots.end(),
                    e.values.begin() + static_cast<std::ptrdiff_t>(i * stride));
      },
      cfg.threads);
  return e;
}

}  // namespace mcsle
