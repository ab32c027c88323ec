#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "dla/cluster.hpp"
#include "dla/rng.hpp"

namespace dla {

// Off-cluster random walkers launched on a far circle/sphere that stick on
// first contact (Witten-Sander aggregation).
struct WalkerParams {
  int dim = 2;
  std::uint64_t n_particles = 1000;
  // launch radius = launch_factor * max(R_max, 1) + 5
  double launch_factor = 1.5;
  // kill radius = kill_factor * launch radius
  double kill_factor = 20.0;
  std::uint64_t max_steps_per_walker = 10'000'000;
  RngSeed seed{};

  // Throws std::invalid_argument.
  void validate() const;
};

struct Stuck {
  LatticePoint at;
};
struct Killed {};
struct Exhausted {};

using WalkerOutcome = std::variant<Stuck, Killed, Exhausted>;

// A unit step or long jump either leaves the walker free at a new position or
// ends the walk.
using StepResult = std::variant<LatticePoint, Stuck, Killed>;

// Radii derived from the current cluster, recomputed after each sticking event.
struct WalkerGeometry {
  double bounding_radius = 0.0;
  double launch_radius = 0.0;
  double kill_radius = 0.0;

  static WalkerGeometry of(const Cluster& cluster, const WalkerParams& params);
};

// Point near the launch sphere in a uniformly random direction, rounded to the
// lattice.
LatticePoint launch_position(const Cluster& cluster, const WalkerGeometry& geom, Rng& rng);

// One move of a free walker at `pos` (unoccupied). Far from the cluster it
// jumps floor(d - R - 2) in a random direction, which cannot reach the
// bounding sphere; otherwise it takes a unit lattice step.
StepResult walk_step(const LatticePoint& pos, const Cluster& cluster, const WalkerGeometry& geom, Rng& rng);

// Runs a single walker from launch to termination. When `trace` is non-null
// every visited position (launch point included) is appended to it.
WalkerOutcome walk_particle(const Cluster& cluster, const WalkerGeometry& geom, std::uint64_t max_steps, Rng& rng,
                            std::vector<LatticePoint>* trace = nullptr);

struct WalkerDebug {
  // Receives the full trajectory of every walker, including killed ones.
  std::vector<std::vector<LatticePoint>>* trajectories = nullptr;
};

// Grows a cluster of 1 + n_particles sites. Throws GrowthStalled if one
// particle needs 10^4 relaunches.
std::pair<Cluster, GrowthHistory> grow(const WalkerParams& params, WalkerDebug debug = {});

inline constexpr std::uint64_t kMaxRelaunches = 10'000;

}  // namespace dla
