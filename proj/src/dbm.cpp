#include "dla/dbm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "dla/errors.hpp"

namespace dla {

PotentialGrid::PotentialGrid(int dim, std::int32_t half)
    : dim_(dim), half_(half), side_(2 * static_cast<std::size_t>(half) + 1) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("potential grid dimension must be 2 or 3");
  if (half < 1) throw std::invalid_argument("potential grid half-width must be >= 1");
  std::size_t cells = 1;
  for (int a = 0; a < dim; ++a) cells *= side_;
  u_.assign(cells, 0.0);
  mask_.assign(cells, SiteKind::Exterior);
}

bool PotentialGrid::in_box(const LatticePoint& p) const {
  if (p.dim() != dim_) return false;
  for (int a = 0; a < dim_; ++a) {
    if (p[a] < -half_ || p[a] > half_) return false;
  }
  return true;
}

std::size_t PotentialGrid::index(const LatticePoint& p) const {
  std::size_t i = 0;
  for (int a = dim_ - 1; a >= 0; --a) i = i * side_ + static_cast<std::size_t>(p[a] + half_);
  return i;
}

void PotentialGrid::set_kind(const LatticePoint& p, SiteKind kind) {
  const std::size_t i = index(p);
  mask_[i] = kind;
  if (kind == SiteKind::ClusterBoundary) u_[i] = 0.0;
  if (kind == SiteKind::FarBoundary) u_[i] = 1.0;
}

namespace {

template <typename Fn>
void for_each_site(int dim, std::int32_t half, Fn&& fn) {
  const std::int32_t zlo = dim == 3 ? -half : 0;
  const std::int32_t zhi = dim == 3 ? half : 0;
  for (std::int32_t z = zlo; z <= zhi; ++z) {
    for (std::int32_t y = -half; y <= half; ++y) {
      for (std::int32_t x = -half; x <= half; ++x) {
        fn(dim == 3 ? LatticePoint(x, y, z) : LatticePoint(x, y));
      }
    }
  }
}

SiteKind radial_kind(const LatticePoint& p, double far_radius) {
  const double r = p.norm();
  if (r >= far_radius + 1.0) return SiteKind::Exterior;
  if (r >= far_radius) return SiteKind::FarBoundary;
  return SiteKind::Interior;
}

}  // namespace

PotentialGrid PotentialGrid::for_cluster(const Cluster& cluster, double far_radius) {
  if (far_radius < cluster.bounding_radius() + 2.0) {
    throw std::invalid_argument("far boundary must lie outside the cluster's perimeter");
  }
  PotentialGrid grid(cluster.dim(), static_cast<std::int32_t>(std::ceil(far_radius)) + 1);
  grid.far_radius_ = far_radius;
  for_each_site(grid.dim_, grid.half_, [&](const LatticePoint& p) {
    const SiteKind kind = radial_kind(p, far_radius);
    grid.set_kind(p, kind);
    if (kind == SiteKind::Interior) grid.set_u(p, 1.0);
  });
  for (const auto& s : cluster.order()) grid.set_kind(s, SiteKind::ClusterBoundary);
  return grid;
}

PotentialGrid PotentialGrid::remesh(const PotentialGrid& old, const Cluster& cluster, double far_radius) {
  PotentialGrid grid = for_cluster(cluster, far_radius);
  for_each_site(old.dim_, old.half_, [&](const LatticePoint& p) {
    if (old.kind(p) == SiteKind::Interior && grid.kind(p) == SiteKind::Interior) grid.set_u(p, old.u(p));
  });
  return grid;
}

SolveReport solve_laplace(PotentialGrid& grid, double tol, std::size_t max_sweeps, double omega) {
  if (!(tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  bool has_cluster = false, has_far = false;
  double scale = 1.0;
  for (std::size_t i = 0; i < grid.mask_.size(); ++i) {
    has_cluster |= grid.mask_[i] == SiteKind::ClusterBoundary;
    has_far |= grid.mask_[i] == SiteKind::FarBoundary;
    if (grid.mask_[i] != SiteKind::Exterior) scale = std::max(scale, std::abs(grid.u_[i]));
  }
  if (!has_cluster || !has_far) {
    throw PreconditionViolation("Laplace solve needs both a cluster boundary and a far boundary");
  }

  const int dim = grid.dim_;
  const auto side = static_cast<std::ptrdiff_t>(grid.side_);
  const std::ptrdiff_t stride_z = side * side;
  const double inv = 1.0 / (2.0 * dim);
  std::vector<std::size_t> color[2];
  for_each_site(dim, grid.half_, [&](const LatticePoint& p) {
    const std::size_t i = grid.index(p);
    if (grid.mask_[i] != SiteKind::Interior) return;
    for (int a = 0; a < dim; ++a) {
      if (p[a] <= -grid.half_ || p[a] >= grid.half_) {
        throw std::invalid_argument("interior site on the edge of the potential grid");
      }
    }
    const int parity = (p[0] + p[1] + (dim == 3 ? p[2] : 0)) & 1;
    color[parity].push_back(i);
  });

  double* u = grid.u_.data();
  SolveReport report;
  for (std::size_t sweep = 1; sweep <= max_sweeps; ++sweep) {
    double max_update = 0.0;
    for (const auto& sites : color) {
      if (dim == 2) {
        for (const std::size_t i : sites) {
          const double avg = (u[i - 1] + u[i + 1] + u[i - side] + u[i + side]) * inv;
          const double delta = omega * (avg - u[i]);
          u[i] += delta;
          max_update = std::max(max_update, std::abs(delta));
        }
      } else {
        for (const std::size_t i : sites) {
          const double avg =
              (u[i - 1] + u[i + 1] + u[i - side] + u[i + side] + u[i - stride_z] + u[i + stride_z]) * inv;
          const double delta = omega * (avg - u[i]);
          u[i] += delta;
          max_update = std::max(max_update, std::abs(delta));
        }
      }
    }
    report.sweeps = sweep;
    report.residual = max_update;
    if (sweep % 50 == 0) report.checkpoints.push_back(max_update);
    if (max_update <= tol * scale) return report;
  }
  throw ConvergenceFailure("Laplace solver: no convergence after " + std::to_string(max_sweeps) +
                               " sweeps (residual " + std::to_string(report.residual) + ")",
                           report.residual, report.sweeps);
}

void DbmParams::validate() const {
  if (dim != 2 && dim != 3) throw std::invalid_argument("dbm dim must be 2 or 3");
  if (n_particles < 1) throw std::invalid_argument("n_particles must be >= 1");
  if (!(grid_margin > 1.2)) throw std::invalid_argument("grid_margin must exceed 1.2");
  if (!(eta >= 0.0)) throw std::invalid_argument("eta must be >= 0");
  if (!(k > 0.0)) throw std::invalid_argument("k must be positive");
  if (!(sor_omega > 1.0 && sor_omega < 2.0)) throw std::invalid_argument("sor_omega must lie in (1, 2)");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_sweeps < 1) throw std::invalid_argument("max_sweeps must be >= 1");
}

std::vector<GrowthCandidate> growth_candidates(const Cluster& cluster, const PotentialGrid& grid, double k,
                                               double eta) {
  std::vector<GrowthCandidate> out;
  std::unordered_set<std::uint64_t> seen;
  bool any_positive = false;
  for (const auto& s : cluster.order()) {
    for (int a = 0; a < cluster.dim(); ++a) {
      for (const int sign : {-1, 1}) {
        const LatticePoint q = s.step(a, sign);
        if (cluster.contains(q) || !seen.insert(q.key()).second) continue;
        if (!grid.in_box(q) || grid.kind(q) != SiteKind::Interior) {
          throw PreconditionViolation("perimeter site outside the solved region");
        }
        // SOR stops within tol of the discrete solution, so u next to the
        // cluster can come out a hair below 0; the true field is >= 0.
        const double w = std::pow(k * std::max(grid.u(q), 0.0), eta);
        any_positive |= w > 0.0;
        out.push_back({q, w});
      }
    }
  }
  if (!any_positive) throw DegenerateField("potential vanishes on every perimeter site");
  return out;
}

LatticePoint select_growth_site(std::span<const GrowthCandidate> candidates, Rng& rng) {
  if (candidates.empty()) throw PreconditionViolation("no growth candidates");
  double total = 0.0;
  for (const auto& c : candidates) total += c.weight;
  if (!(total > 0.0)) throw PreconditionViolation("growth candidates carry no positive weight");
  const double target = rng.uniform() * total;
  double acc = 0.0;
  const GrowthCandidate* last_positive = nullptr;
  for (const auto& c : candidates) {
    if (c.weight <= 0.0) continue;
    acc += c.weight;
    last_positive = &c;
    if (target < acc) return c.site;
  }
  // Rounding can leave target just above the accumulated sum.
  return last_positive->site;
}

namespace {

double required_far_radius(const Cluster& cluster, double margin) {
  const double r = cluster.bounding_radius();
  return std::max({margin * r, r + 4.0, 6.0});
}

}  // namespace

std::pair<Cluster, GrowthHistory> run_dbm(const DbmParams& params, DbmStats* stats) {
  params.validate();
  Cluster cluster(params.dim);
  GrowthHistory history;
  history.reserve(params.n_particles);
  Rng rng(params.seed);
  DbmStats local;

  PotentialGrid grid = PotentialGrid::for_cluster(cluster, 1.25 * required_far_radius(cluster, params.grid_margin));
  for (std::uint64_t n = 1; n <= params.n_particles; ++n) {
    const double needed = required_far_radius(cluster, params.grid_margin);
    if (needed > grid.far_radius()) {
      grid = PotentialGrid::remesh(grid, cluster, 1.25 * needed);
      ++local.remeshes;
    }
    local.total_sweeps += solve_laplace(grid, params.tol, params.max_sweeps, params.sor_omega).sweeps;
    const auto candidates = growth_candidates(cluster, grid, params.k, params.eta);
    const LatticePoint site = select_growth_site(candidates, rng);
    cluster.add_site(site);
    grid.set_kind(site, SiteKind::ClusterBoundary);
    history.push_back({n, cluster.radius_of_gyration(), cluster.bounding_radius()});
  }
  if (stats) *stats = local;
  return {std::move(cluster), std::move(history)};
}

}  // namespace dla
