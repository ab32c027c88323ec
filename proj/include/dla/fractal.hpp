#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dla/cluster.hpp"

namespace dla {

// Finite set of distinct lattice points sharing one arity (1, 2 or 3).
class PointSet {
 public:
  PointSet() = default;
  // Duplicates are dropped; first-occurrence order is kept. Throws
  // std::invalid_argument on mixed arity or dim outside 1..3.
  PointSet(int dim, std::vector<LatticePoint> points);

  int dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<LatticePoint>& points() const { return points_; }

  PointSet translated(const LatticePoint& by) const;

 private:
  int dim_ = 0;
  std::vector<LatticePoint> points_;
};

struct ScaleSample {
  std::int64_t epsilon = 0;
  std::uint64_t count = 0;
};

using ScaleSeries = std::vector<ScaleSample>;

struct ScaleWindow {
  double eps_min = 0.0;
  double eps_max = 0.0;
};

struct DimensionEstimate {
  double d = 0.0;
  double std_error = 0.0;
  double r2 = 0.0;
  ScaleWindow window{};
  std::size_t n_scales = 0;
};

// Occupied sites with at least one empty lattice neighbor.
PointSet extract_interface(const Cluster& cluster);

PointSet to_point_set(const Cluster& cluster);

// Powers of two 2^lo .. 2^hi.
std::vector<std::int64_t> dyadic_ladder(int lo, int hi);
// Powers of three 3^lo .. 3^hi, for the ternary fixtures.
std::vector<std::int64_t> ternary_ladder(int lo, int hi);

// Dyadic ladder from 1 up to the first power of two covering the set's extent.
std::vector<std::int64_t> covering_dyadic_ladder(const PointSet& points);

// Counts origin-anchored boxes floor(x / eps) that hold at least one point.
// The ladder must be strictly increasing powers of two (std::invalid_argument
// otherwise); `points` must be nonempty.
ScaleSeries box_count(const PointSet& points, std::span<const std::int64_t> ladder);
// Same counting rule on a powers-of-three ladder.
ScaleSeries box_count_ternary(const PointSet& points, std::span<const std::int64_t> ladder);

// OLS of log N against log(1/eps) over samples with eps in the window.
// Throws InsufficientScales with fewer than 3 samples in the window.
DimensionEstimate fit_dimension(const ScaleSeries& series, ScaleWindow window);

// Outer bounds for fits on grown clusters: from 2 lattice units (below, the
// lattice grain dominates) up to R_g (above, the finite cluster size does).
ScaleWindow cluster_scale_bounds(double radius_of_gyration);

// Scaling-range selection: among the runs of `span` consecutive samples with
// epsilon inside `bounds`, returns the window whose fitted slope is largest.
// Discreteness at small eps and finite size at large eps both flatten the
// log-log curve of a finite sample, so the steepest run is its scaling range.
// Ties go to the smaller scales. Throws InsufficientScales when fewer than
// `span` samples fall inside `bounds`.
ScaleWindow plateau_window(const ScaleSeries& series, ScaleWindow bounds, std::size_t span = 3);

// OLS of log n against log R_g over records whose R_g lies in
// [lo, hi] * final R_g. The returned window is expressed in R_g units.
DimensionEstimate mass_radius_dimension(const GrowthHistory& history, std::pair<double, double> window_fraction = {0.05, 1.0});

// Keeps points whose coordinates on each dropped axis lie in
// [offset, offset + thickness) and removes those coordinates. An empty result
// is valid.
PointSet slice(const PointSet& points, std::span<const int> drop_axes, std::span<const std::int32_t> offsets,
               std::int32_t thickness = 1);

struct SliceFit {
  std::vector<std::int32_t> offsets;
  std::size_t n_points = 0;
  DimensionEstimate estimate;
  ScaleSeries series;
};

struct SlicedDimension {
  DimensionEstimate estimate;  // full-space value: slice average + codim
  std::vector<SliceFit> slices;
};

// Slices a 3D set with planes (codim 1, normal to z) or lines (codim 2,
// along x), n_slices evenly spaced offsets over the central 50% of the
// extent of each dropped axis. Per-slice dimensions are averaged weighted by
// slice point count and the codimension is added back. Throws
// DegenerateSlicing when no slice yields a fit.
SlicedDimension sliced_dimension(const PointSet& points, int codim, std::size_t n_slices,
                                 std::span<const std::int64_t> ladder, ScaleWindow window);

// Offsets of the slices used by sliced_dimension, one vector per slice.
std::vector<std::vector<std::int32_t>> slice_offsets(const PointSet& points, int codim, std::size_t n_slices);

// Axes dropped for a given slicing codimension.
std::vector<int> slice_axes(int codim);

// Box counts summed over all slices, for picking a common fit window.
ScaleSeries pooled_slice_series(const PointSet& points, int codim, std::size_t n_slices,
                                std::span<const std::int64_t> ladder);

// Estimators as applied to grown clusters, with the scaling window chosen by
// plateau_window inside cluster_scale_bounds.
struct ClusterBoxDimension {
  DimensionEstimate estimate;
  ScaleSeries series;
};
ClusterBoxDimension cluster_box_dimension(const PointSet& points, double radius_of_gyration);

struct ClusterSlicedDimension {
  SlicedDimension sliced;
  ScaleSeries pooled;
};
ClusterSlicedDimension cluster_sliced_dimension(const PointSet& points, double radius_of_gyration, int codim,
                                                std::size_t n_slices);

enum class FixtureKind { CantorDust1D, SierpinskiCarpet2D, MengerSponge3D, FilledSquare, LatticeLine };

// Exact lattice prefractals of side 3^depth anchored at the origin. The
// FilledSquare and LatticeLine controls have side 2^depth.
PointSet generate_fixture(FixtureKind kind, int depth);

double similarity_dimension(FixtureKind kind);

}  // namespace dla
