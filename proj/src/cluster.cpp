#include "dla/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

#include "dla/errors.hpp"

namespace dla {

namespace {
constexpr std::int32_t kInitialHalfWidth = 16;
constexpr std::int64_t kKeyOffset = std::int64_t{1} << 20;
}  // namespace

LatticePoint LatticePoint::origin(int dim) {
  switch (dim) {
    case 1: return LatticePoint(0);
    case 2: return LatticePoint(0, 0);
    case 3: return LatticePoint(0, 0, 0);
    default: throw std::invalid_argument("lattice dimension must be 1, 2 or 3");
  }
}

double LatticePoint::norm() const { return std::sqrt(static_cast<double>(norm2())); }

std::int64_t LatticePoint::norm2() const {
  std::int64_t s = 0;
  for (int a = 0; a < dim_; ++a) s += std::int64_t{c_[a]} * c_[a];
  return s;
}

std::uint64_t LatticePoint::key() const {
  std::uint64_t k = static_cast<std::uint64_t>(dim_);
  for (int a = 0; a < kMaxDim; ++a) {
    k = (k << 21) | static_cast<std::uint64_t>(c_[a] + kKeyOffset);
  }
  return k;
}

bool lattice_adjacent(const LatticePoint& a, const LatticePoint& b) {
  if (a.dim() != b.dim()) return false;
  std::int64_t l1 = 0;
  for (int i = 0; i < a.dim(); ++i) l1 += std::abs(std::int64_t{a[i]} - b[i]);
  return l1 == 1;
}

Cluster::Cluster(int dim) : dim_(dim) {
  if (dim != 2 && dim != 3) {
    throw std::invalid_argument("cluster dimension must be 2 or 3, got " + std::to_string(dim));
  }
  half_ = kInitialHalfWidth;
  std::size_t cells = 1;
  for (int a = 0; a < dim_; ++a) cells *= 2 * static_cast<std::size_t>(half_) + 1;
  window_.assign((cells + 63) / 64, 0);

  const LatticePoint s = seed();
  order_.push_back(s);
  sites_.insert(s);
  set_bit(s);
}

bool Cluster::touches(const LatticePoint& p) const {
  for (int a = 0; a < dim_; ++a) {
    if (contains(p.step(a, 1)) || contains(p.step(a, -1))) return true;
  }
  return false;
}

void Cluster::set_bit(const LatticePoint& p) {
  const std::size_t i = window_index(p);
  window_[i >> 6] |= std::uint64_t{1} << (i & 63);
}

void Cluster::grow_window(std::int32_t needed) {
  half_ = std::max(half_ + half_ / 2, needed + 8);
  std::size_t cells = 1;
  for (int a = 0; a < dim_; ++a) cells *= 2 * static_cast<std::size_t>(half_) + 1;
  window_.assign((cells + 63) / 64, 0);
  for (const auto& p : order_) set_bit(p);
}

void Cluster::add_site(const LatticePoint& p) {
  if (p.dim() != dim_) {
    throw std::invalid_argument("site arity " + std::to_string(p.dim()) + " does not match cluster dimension " +
                                std::to_string(dim_));
  }
  if (contains(p)) throw PreconditionViolation("duplicate site");
  if (!touches(p)) throw PreconditionViolation("site is not adjacent to the cluster");

  std::int32_t extent = 0;
  for (int a = 0; a < dim_; ++a) extent = std::max(extent, std::abs(p[a]));
  if (extent > half_ - 2) grow_window(extent);

  order_.push_back(p);
  sites_.insert(p);
  set_bit(p);
  bounding_radius_ = std::max(bounding_radius_, p.norm());
  for (int a = 0; a < dim_; ++a) sum_[a] += p[a];
  sum_sq_ += static_cast<double>(p.norm2());
}

double Cluster::radius_of_gyration() const {
  const double n = static_cast<double>(order_.size());
  double centroid2 = 0.0;
  for (int a = 0; a < dim_; ++a) centroid2 += (sum_[a] / n) * (sum_[a] / n);
  return std::sqrt(std::max(0.0, sum_sq_ / n - centroid2));
}

double bounding_radius_scan(const Cluster& cluster) {
  double r = 0.0;
  for (const auto& p : cluster.order()) r = std::max(r, p.norm());
  return r;
}

double radius_of_gyration_scan(std::span<const LatticePoint> points) {
  if (points.empty()) return 0.0;
  const int dim = points.front().dim();
  std::array<double, LatticePoint::kMaxDim> centroid{};
  for (const auto& p : points) {
    for (int a = 0; a < dim; ++a) centroid[a] += p[a];
  }
  for (auto& c : centroid) c /= static_cast<double>(points.size());
  double acc = 0.0;
  for (const auto& p : points) {
    for (int a = 0; a < dim; ++a) acc += (p[a] - centroid[a]) * (p[a] - centroid[a]);
  }
  return std::sqrt(acc / static_cast<double>(points.size()));
}

bool is_connected(const Cluster& cluster) {
  std::unordered_set<LatticePoint, LatticePointHash> seen{cluster.seed()};
  std::deque<LatticePoint> queue{cluster.seed()};
  while (!queue.empty()) {
    const LatticePoint p = queue.front();
    queue.pop_front();
    for (int a = 0; a < cluster.dim(); ++a) {
      for (int s : {-1, 1}) {
        const LatticePoint q = p.step(a, s);
        if (cluster.contains(q) && seen.insert(q).second) queue.push_back(q);
      }
    }
  }
  return seen.size() == cluster.size();
}

}  // namespace dla
