#include "dla/walker.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dla/errors.hpp"

namespace dla {

namespace {

// Uniform unit vector on the circle (2D) or sphere (3D).
std::array<double, 3> random_direction(int dim, Rng& rng) {
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  if (dim == 2) return {std::cos(phi), std::sin(phi), 0.0};
  const double z = 2.0 * rng.uniform() - 1.0;
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {s * std::cos(phi), s * std::sin(phi), z};
}

LatticePoint offset_rounded(const LatticePoint& from, const std::array<double, 3>& dir, double length) {
  LatticePoint p = from;
  for (int a = 0; a < from.dim(); ++a) {
    p[a] = static_cast<std::int32_t>(std::lround(from[a] + length * dir[a]));
  }
  return p;
}

}  // namespace

void WalkerParams::validate() const {
  if (dim != 2 && dim != 3) throw std::invalid_argument("walker dim must be 2 or 3");
  if (n_particles < 1) throw std::invalid_argument("n_particles must be >= 1");
  if (!(launch_factor > 1.0)) throw std::invalid_argument("launch_factor must exceed 1");
  if (!(kill_factor >= 2.0 * launch_factor)) throw std::invalid_argument("kill_factor must be >= 2 * launch_factor");
  if (max_steps_per_walker < 1) throw std::invalid_argument("max_steps_per_walker must be >= 1");
}

WalkerGeometry WalkerGeometry::of(const Cluster& cluster, const WalkerParams& params) {
  WalkerGeometry g;
  g.bounding_radius = cluster.bounding_radius();
  g.launch_radius = params.launch_factor * std::max(g.bounding_radius, 1.0) + 5.0;
  g.kill_radius = params.kill_factor * g.launch_radius;
  return g;
}

LatticePoint launch_position(const Cluster& cluster, const WalkerGeometry& geom, Rng& rng) {
  // launch_radius >= R_max + 5, so the rounded point is never occupied.
  return offset_rounded(LatticePoint::origin(cluster.dim()), random_direction(cluster.dim(), rng),
                        geom.launch_radius);
}

StepResult walk_step(const LatticePoint& pos, const Cluster& cluster, const WalkerGeometry& geom, Rng& rng) {
  const int dim = cluster.dim();
  const double gap = pos.norm() - geom.bounding_radius;
  LatticePoint next;
  if (gap > 4.0) {
    // Rounding moves the endpoint by at most sqrt(3)/2 < 1, so the walker ends
    // at distance > R + 1 and cannot touch the cluster.
    next = offset_rounded(pos, random_direction(dim, rng), std::floor(gap - 2.0));
  } else {
    const auto move = rng.below(2 * static_cast<std::uint64_t>(dim));
    next = pos.step(static_cast<int>(move >> 1), (move & 1) ? 1 : -1);
  }
  if (next.norm() > geom.kill_radius) return Killed{};
  if (cluster.touches(next)) return Stuck{next};
  return next;
}

WalkerOutcome walk_particle(const Cluster& cluster, const WalkerGeometry& geom, std::uint64_t max_steps, Rng& rng,
                            std::vector<LatticePoint>* trace) {
  LatticePoint pos = launch_position(cluster, geom, rng);
  if (trace) trace->push_back(pos);
  for (std::uint64_t step = 0; step < max_steps; ++step) {
    StepResult r = walk_step(pos, cluster, geom, rng);
    if (auto* stuck = std::get_if<Stuck>(&r)) {
      if (trace) trace->push_back(stuck->at);
      return *stuck;
    }
    if (std::holds_alternative<Killed>(r)) return Killed{};
    pos = std::get<LatticePoint>(r);
    if (trace) trace->push_back(pos);
  }
  return Exhausted{};
}

std::pair<Cluster, GrowthHistory> grow(const WalkerParams& params, WalkerDebug debug) {
  params.validate();
  Cluster cluster(params.dim);
  GrowthHistory history;
  history.reserve(params.n_particles);
  Rng rng(params.seed);

  WalkerGeometry geom = WalkerGeometry::of(cluster, params);
  for (std::uint64_t n = 1; n <= params.n_particles; ++n) {
    std::uint64_t launches = 0;
    for (;;) {
      std::vector<LatticePoint> trace;
      WalkerOutcome outcome =
          walk_particle(cluster, geom, params.max_steps_per_walker, rng, debug.trajectories ? &trace : nullptr);
      if (debug.trajectories) debug.trajectories->push_back(std::move(trace));
      if (auto* stuck = std::get_if<Stuck>(&outcome)) {
        cluster.add_site(stuck->at);
        break;
      }
      if (++launches >= kMaxRelaunches) {
        throw GrowthStalled("growth stalled: particle " + std::to_string(n) + " relaunched " +
                            std::to_string(launches) + " times without sticking");
      }
    }
    geom = WalkerGeometry::of(cluster, params);
    history.push_back({n, cluster.radius_of_gyration(), cluster.bounding_radius()});
  }
  return {std::move(cluster), std::move(history)};
}

}  // namespace dla
