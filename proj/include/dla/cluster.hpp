#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "dla/rng.hpp"

namespace dla {

// Integer lattice point of arity 1, 2 or 3. Unused trailing coordinates are 0.
class LatticePoint {
 public:
  static constexpr int kMaxDim = 3;

  LatticePoint() = default;
  LatticePoint(std::int32_t x) : c_{x, 0, 0}, dim_(1) {}
  LatticePoint(std::int32_t x, std::int32_t y) : c_{x, y, 0}, dim_(2) {}
  LatticePoint(std::int32_t x, std::int32_t y, std::int32_t z) : c_{x, y, z}, dim_(3) {}

  static LatticePoint origin(int dim);

  int dim() const { return dim_; }
  std::int32_t operator[](int axis) const { return c_[axis]; }
  std::int32_t& operator[](int axis) { return c_[axis]; }

  double norm() const;
  std::int64_t norm2() const;

  // Neighbor along `axis` in direction `sign` (+1 or -1).
  LatticePoint step(int axis, int sign) const {
    LatticePoint p = *this;
    p.c_[axis] += sign;
    return p;
  }

  // Coordinates must satisfy |c| < 2^20.
  std::uint64_t key() const;

  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;

 private:
  std::array<std::int32_t, kMaxDim> c_{};
  int dim_ = 0;
};

// True when a and b differ by a unit step along exactly one axis.
bool lattice_adjacent(const LatticePoint& a, const LatticePoint& b);

struct LatticePointHash {
  std::size_t operator()(const LatticePoint& p) const { return std::hash<std::uint64_t>{}(p.key()); }
};

// One record per sticking event: particle count n (seed excluded), radius of
// gyration and bounding radius of the cluster right after that particle.
struct GrowthRecord {
  std::uint64_t n = 0;
  double rg = 0.0;
  double rmax = 0.0;
};

using GrowthHistory = std::vector<GrowthRecord>;

// On-lattice aggregate seeded at the origin. Every site added after the seed
// is adjacent to an earlier one, so the cluster is connected by construction.
//
// Membership is answered from a dense occupancy bitmap ("window") centered on
// the origin that is enlarged as the cluster grows; the hash set mirrors it and
// serves callers that need set semantics outside the hot path.
class Cluster {
 public:
  explicit Cluster(int dim);

  int dim() const { return dim_; }
  std::size_t size() const { return order_.size(); }
  const std::vector<LatticePoint>& order() const { return order_; }
  const std::unordered_set<LatticePoint, LatticePointHash>& sites() const { return sites_; }
  LatticePoint seed() const { return LatticePoint::origin(dim_); }

  bool contains(const LatticePoint& p) const {
    if (!in_window(p)) return false;
    const std::size_t i = window_index(p);
    return (window_[i >> 6] >> (i & 63)) & 1U;
  }

  // True when some lattice neighbor of p is occupied.
  bool touches(const LatticePoint& p) const;

  // Throws PreconditionViolation for duplicates and for sites not adjacent to
  // the cluster; std::invalid_argument on arity mismatch.
  void add_site(const LatticePoint& p);

  double bounding_radius() const { return bounding_radius_; }
  double radius_of_gyration() const;

 private:
  bool in_window(const LatticePoint& p) const {
    for (int a = 0; a < dim_; ++a) {
      if (p[a] < -half_ || p[a] > half_) return false;
    }
    return true;
  }
  std::size_t window_index(const LatticePoint& p) const {
    const std::size_t side = 2 * static_cast<std::size_t>(half_) + 1;
    std::size_t i = 0;
    for (int a = dim_ - 1; a >= 0; --a) i = i * side + static_cast<std::size_t>(p[a] + half_);
    return i;
  }
  void set_bit(const LatticePoint& p);
  void grow_window(std::int32_t needed);

  int dim_;
  std::vector<LatticePoint> order_;
  std::unordered_set<LatticePoint, LatticePointHash> sites_;
  std::int32_t half_ = 0;
  std::vector<std::uint64_t> window_;
  double bounding_radius_ = 0.0;
  // Running sums for the radius of gyration.
  std::array<double, LatticePoint::kMaxDim> sum_{};
  double sum_sq_ = 0.0;
};

// Reference computations by exhaustive scan over the sites; used to
// cross-check the incremental quantities.
double bounding_radius_scan(const Cluster& cluster);
double radius_of_gyration_scan(std::span<const LatticePoint> points);

// Breadth-first search from the seed over lattice adjacency.
bool is_connected(const Cluster& cluster);

}  // namespace dla
