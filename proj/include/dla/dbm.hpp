#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dla/cluster.hpp"
#include "dla/rng.hpp"

namespace dla {

struct SolveReport {
  std::size_t sweeps = 0;
  double residual = 0.0;  // largest single-site update in the final sweep
  std::vector<double> checkpoints;  // residual every 50 sweeps
};

enum class SiteKind : std::uint8_t { Interior, ClusterBoundary, FarBoundary, Exterior };

// Scalar potential on the box [-half, half]^dim with Dirichlet masks:
// ClusterBoundary sites are pinned to 0, FarBoundary sites to 1, Exterior
// sites are never read. Interior sites must not touch the box edge.
class PotentialGrid {
 public:
  PotentialGrid(int dim, std::int32_t half);

  // Grid for `cluster` with the far boundary on the discrete sphere
  // |x| >= far_radius. Interior sites start at u = 1.
  static PotentialGrid for_cluster(const Cluster& cluster, double far_radius);

  // Enlarged grid for a new far radius; u of surviving interior sites is
  // copied from `old`, new sites start at 1.
  static PotentialGrid remesh(const PotentialGrid& old, const Cluster& cluster, double far_radius);

  int dim() const { return dim_; }
  std::int32_t half() const { return half_; }
  double far_radius() const { return far_radius_; }
  std::size_t size() const { return u_.size(); }

  bool in_box(const LatticePoint& p) const;
  std::size_t index(const LatticePoint& p) const;
  double u(const LatticePoint& p) const { return u_[index(p)]; }
  SiteKind kind(const LatticePoint& p) const { return mask_[index(p)]; }

  // Sets kind and, for the Dirichlet kinds, pins u to 0 or 1.
  void set_kind(const LatticePoint& p, SiteKind kind);
  void set_u(const LatticePoint& p, double value) { u_[index(p)] = value; }

  std::span<const double> values() const { return u_; }
  std::span<const SiteKind> mask() const { return mask_; }

 private:
  friend SolveReport solve_laplace(PotentialGrid&, double, std::size_t, double);

  int dim_;
  std::int32_t half_;
  std::size_t side_;
  double far_radius_ = 0.0;
  std::vector<double> u_;
  std::vector<SiteKind> mask_;
};

// Red-black successive over-relaxation until the largest per-site update of a
// sweep is <= tol * max(1, max|u|). Dirichlet sites are never written.
// Throws PreconditionViolation without both boundary kinds present and
// ConvergenceFailure after max_sweeps.
SolveReport solve_laplace(PotentialGrid& grid, double tol, std::size_t max_sweeps, double omega = 1.8);

struct DbmParams {
  int dim = 2;
  std::uint64_t n_particles = 1000;
  double grid_margin = 2.0;
  double eta = 1.0;
  double k = 1.0;
  double sor_omega = 1.8;
  double tol = 1e-6;
  std::size_t max_sweeps = 100'000;
  RngSeed seed{};

  // Throws std::invalid_argument.
  void validate() const;
};

struct GrowthCandidate {
  LatticePoint site;
  double weight = 0.0;
};

// Empty perimeter sites of the cluster in discovery order, weighted by
// (k * u)^eta. u at a perimeter site is the one-sided normal difference
// against the u = 0 cluster. Throws DegenerateField if all weights are 0.
std::vector<GrowthCandidate> growth_candidates(const Cluster& cluster, const PotentialGrid& grid, double k,
                                               double eta);

// Draws candidate i with probability weight_i / sum of weights.
LatticePoint select_growth_site(std::span<const GrowthCandidate> candidates, Rng& rng);

struct DbmStats {
  std::size_t total_sweeps = 0;
  std::size_t remeshes = 0;
};

// Dielectric-breakdown growth: solve, weight perimeter, select, add, repeat.
std::pair<Cluster, GrowthHistory> run_dbm(const DbmParams& params, DbmStats* stats = nullptr);

}  // namespace dla
