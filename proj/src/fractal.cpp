#include "dla/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "dla/errors.hpp"

namespace dla {

namespace {

std::int64_t floor_div(std::int64_t x, std::int64_t e) { return x >= 0 ? x / e : -((-x + e - 1) / e); }

bool is_power_of(std::int64_t value, std::int64_t base) {
  if (value < 1) return false;
  while (value % base == 0) value /= base;
  return value == 1;
}

void check_ladder(std::span<const std::int64_t> ladder, std::int64_t base) {
  if (ladder.empty()) throw std::invalid_argument("box-count ladder is empty");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!is_power_of(ladder[i], base)) {
      throw std::invalid_argument("box size " + std::to_string(ladder[i]) + " is not a power of " +
                                  std::to_string(base));
    }
    if (i > 0 && ladder[i] <= ladder[i - 1]) throw std::invalid_argument("box-count ladder must be strictly increasing");
  }
}

ScaleSeries count_boxes(const PointSet& points, std::span<const std::int64_t> ladder) {
  if (points.empty()) throw std::invalid_argument("box counting needs a nonempty point set");
  ScaleSeries series;
  std::vector<std::uint64_t> keys(points.size());
  for (const std::int64_t eps : ladder) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      const LatticePoint& p = points.points()[i];
      LatticePoint box = p;
      for (int a = 0; a < p.dim(); ++a) box[a] = static_cast<std::int32_t>(floor_div(p[a], eps));
      keys[i] = box.key();
    }
    std::sort(keys.begin(), keys.end());
    const auto distinct = std::unique(keys.begin(), keys.end()) - keys.begin();
    series.push_back({eps, static_cast<std::uint64_t>(distinct)});
  }
  return series;
}

struct LineFit {
  double slope = 0.0;
  double slope_se = 0.0;
  double r2 = 0.0;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (my + fit.slope * (x[i] - mx));
    ssr += r * r;
  }
  fit.slope_se = (x.size() > 2 && sxx > 0.0) ? std::sqrt(ssr / (n - 2.0) / sxx) : 0.0;
  // A flat series (one box at every scale) is fitted exactly by slope 0.
  fit.r2 = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
  return fit;
}

}  // namespace

PointSet::PointSet(int dim, std::vector<LatticePoint> points) : dim_(dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("point set dimension must be 1, 2 or 3");
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(points.size());
  points_.reserve(points.size());
  for (const auto& p : points) {
    if (p.dim() != dim) throw std::invalid_argument("point arity does not match point set dimension");
    if (seen.insert(p.key()).second) points_.push_back(p);
  }
}

PointSet PointSet::translated(const LatticePoint& by) const {
  std::vector<LatticePoint> moved = points_;
  for (auto& p : moved) {
    for (int a = 0; a < dim_; ++a) p[a] += by[a];
  }
  return PointSet(dim_, std::move(moved));
}

PointSet extract_interface(const Cluster& cluster) {
  std::vector<LatticePoint> surface;
  for (const auto& p : cluster.order()) {
    bool exposed = false;
    for (int a = 0; a < cluster.dim() && !exposed; ++a) {
      exposed = !cluster.contains(p.step(a, 1)) || !cluster.contains(p.step(a, -1));
    }
    if (exposed) surface.push_back(p);
  }
  return PointSet(cluster.dim(), std::move(surface));
}

PointSet to_point_set(const Cluster& cluster) { return PointSet(cluster.dim(), cluster.order()); }

std::vector<std::int64_t> dyadic_ladder(int lo, int hi) {
  std::vector<std::int64_t> out;
  for (int j = lo; j <= hi; ++j) out.push_back(std::int64_t{1} << j);
  return out;
}

std::vector<std::int64_t> ternary_ladder(int lo, int hi) {
  std::vector<std::int64_t> out;
  std::int64_t v = 1;
  for (int j = 0; j <= hi; ++j, v *= 3) {
    if (j >= lo) out.push_back(v);
  }
  return out;
}

std::vector<std::int64_t> covering_dyadic_ladder(const PointSet& points) {
  std::int64_t extent = 1;
  if (!points.empty()) {
    for (int a = 0; a < points.dim(); ++a) {
      const auto [lo, hi] = std::minmax_element(points.points().begin(), points.points().end(),
                                                [a](const auto& p, const auto& q) { return p[a] < q[a]; });
      extent = std::max<std::int64_t>(extent, std::int64_t{(*hi)[a]} - (*lo)[a] + 1);
    }
  }
  int top = 0;
  while ((std::int64_t{1} << top) < extent) ++top;
  return dyadic_ladder(0, top);
}

ScaleSeries box_count(const PointSet& points, std::span<const std::int64_t> ladder) {
  check_ladder(ladder, 2);
  return count_boxes(points, ladder);
}

ScaleSeries box_count_ternary(const PointSet& points, std::span<const std::int64_t> ladder) {
  check_ladder(ladder, 3);
  return count_boxes(points, ladder);
}

DimensionEstimate fit_dimension(const ScaleSeries& series, ScaleWindow window) {
  std::vector<double> x, y;
  double lo = 0.0, hi = 0.0;
  for (const auto& s : series) {
    const auto eps = static_cast<double>(s.epsilon);
    if (eps < window.eps_min || eps > window.eps_max) continue;
    if (x.empty()) lo = eps;
    hi = eps;
    x.push_back(-std::log(eps));
    y.push_back(std::log(static_cast<double>(s.count)));
  }
  if (x.size() < 3) {
    throw InsufficientScales("only " + std::to_string(x.size()) + " box sizes in window [" +
                             std::to_string(window.eps_min) + ", " + std::to_string(window.eps_max) + "]");
  }
  const LineFit fit = least_squares(x, y);
  return {fit.slope, fit.slope_se, fit.r2, {lo, hi}, x.size()};
}

ScaleWindow cluster_scale_bounds(double radius_of_gyration) { return {2.0, radius_of_gyration}; }

ScaleWindow plateau_window(const ScaleSeries& series, ScaleWindow bounds, std::size_t span) {
  if (span < 3) throw std::invalid_argument("scaling window needs at least 3 scales");
  ScaleSeries inside;
  for (const auto& s : series) {
    const auto eps = static_cast<double>(s.epsilon);
    if (eps >= bounds.eps_min && eps <= bounds.eps_max) inside.push_back(s);
  }
  if (inside.size() < span) {
    throw InsufficientScales("only " + std::to_string(inside.size()) + " box sizes between " +
                             std::to_string(bounds.eps_min) + " and " + std::to_string(bounds.eps_max));
  }
  ScaleWindow best{};
  double best_slope = -1.0;
  for (std::size_t i = 0; i + span <= inside.size(); ++i) {
    const ScaleWindow w{static_cast<double>(inside[i].epsilon), static_cast<double>(inside[i + span - 1].epsilon)};
    const double slope = fit_dimension(inside, w).d;
    if (slope > best_slope) {
      best_slope = slope;
      best = w;
    }
  }
  return best;
}

DimensionEstimate mass_radius_dimension(const GrowthHistory& history, std::pair<double, double> window_fraction) {
  if (history.size() < 100) {
    throw InsufficientScales("mass-radius fit needs at least 100 growth records, got " +
                             std::to_string(history.size()));
  }
  const double rg_final = history.back().rg;
  const double lo = window_fraction.first * rg_final;
  const double hi = window_fraction.second * rg_final;
  std::vector<double> x, y;
  for (const auto& rec : history) {
    if (rec.rg < lo || rec.rg > hi || rec.rg <= 0.0) continue;
    x.push_back(std::log(rec.rg));
    y.push_back(std::log(static_cast<double>(rec.n)));
  }
  if (x.size() < 3) throw InsufficientScales("fewer than 3 growth records inside the R_g window");
  const LineFit fit = least_squares(x, y);
  return {fit.slope, fit.slope_se, fit.r2, {lo, hi}, x.size()};
}

PointSet slice(const PointSet& points, std::span<const int> drop_axes, std::span<const std::int32_t> offsets,
               std::int32_t thickness) {
  const int dim = points.dim();
  const auto dropped = static_cast<int>(drop_axes.size());
  if (dropped < 1 || dropped >= dim) throw std::invalid_argument("slice must drop between 1 and dim-1 axes");
  if (offsets.size() != drop_axes.size()) throw std::invalid_argument("one offset per dropped axis is required");
  if (thickness < 1) throw std::invalid_argument("slice thickness must be >= 1");
  std::array<bool, 3> drop{};
  for (const int a : drop_axes) {
    if (a < 0 || a >= dim || drop[a]) throw std::invalid_argument("dropped axes must be distinct and < dim");
    drop[a] = true;
  }

  std::vector<LatticePoint> kept;
  for (const auto& p : points.points()) {
    bool inside = true;
    for (std::size_t i = 0; i < drop_axes.size() && inside; ++i) {
      const std::int32_t c = p[drop_axes[i]];
      inside = c >= offsets[i] && c < offsets[i] + thickness;
    }
    if (!inside) continue;
    LatticePoint q = LatticePoint::origin(dim - dropped);
    int out = 0;
    for (int a = 0; a < dim; ++a) {
      if (!drop[a]) q[out++] = p[a];
    }
    kept.push_back(q);
  }
  return PointSet(dim - dropped, std::move(kept));
}

namespace {

std::vector<std::int32_t> central_offsets(const PointSet& points, int axis, std::size_t n) {
  const auto [lo_it, hi_it] = std::minmax_element(points.points().begin(), points.points().end(),
                                                  [axis](const auto& p, const auto& q) { return p[axis] < q[axis]; });
  const double lo = (*lo_it)[axis];
  const double hi = (*hi_it)[axis];
  const double a = lo + 0.25 * (hi - lo);
  const double b = hi - 0.25 * (hi - lo);
  std::vector<std::int32_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.5;
    out.push_back(static_cast<std::int32_t>(std::lround(a + t * (b - a))));
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<int> slice_axes(int codim) {
  // Planes normal to z; lines parallel to x.
  if (codim == 1) return {2};
  if (codim == 2) return {1, 2};
  throw std::invalid_argument("slicing codimension must be 1 or 2");
}

std::vector<std::vector<std::int32_t>> slice_offsets(const PointSet& points, int codim, std::size_t n_slices) {
  if (points.dim() != 3) throw std::invalid_argument("slicing requires a 3D point set");
  if (n_slices < 3) throw std::invalid_argument("at least 3 slices are required");
  if (points.empty()) throw DegenerateSlicing("cannot slice an empty point set");
  const std::vector<int> axes = slice_axes(codim);
  std::vector<std::vector<std::int32_t>> per_axis;
  for (const int a : axes) per_axis.push_back(central_offsets(points, a, n_slices));

  std::vector<std::vector<std::int32_t>> combos;
  if (codim == 1) {
    for (const auto o : per_axis[0]) combos.push_back({o});
  } else {
    for (const auto o1 : per_axis[0]) {
      for (const auto o2 : per_axis[1]) combos.push_back({o1, o2});
    }
  }
  return combos;
}

ScaleSeries pooled_slice_series(const PointSet& points, int codim, std::size_t n_slices,
                                std::span<const std::int64_t> ladder) {
  const std::vector<int> axes = slice_axes(codim);
  ScaleSeries pooled;
  for (const auto& offsets : slice_offsets(points, codim, n_slices)) {
    const PointSet cut = slice(points, axes, offsets, 1);
    if (cut.empty()) continue;
    const ScaleSeries series = box_count(cut, ladder);
    if (pooled.empty()) {
      pooled = series;
    } else {
      for (std::size_t i = 0; i < series.size(); ++i) pooled[i].count += series[i].count;
    }
  }
  if (pooled.empty()) throw DegenerateSlicing("every slice is empty");
  return pooled;
}

SlicedDimension sliced_dimension(const PointSet& points, int codim, std::size_t n_slices,
                                 std::span<const std::int64_t> ladder, ScaleWindow window) {
  const std::vector<int> axes = slice_axes(codim);
  const auto combos = slice_offsets(points, codim, n_slices);

  SlicedDimension result;
  double weight_sum = 0.0, weighted_d = 0.0, weighted_var = 0.0;
  for (const auto& offsets : combos) {
    const PointSet cut = slice(points, axes, offsets, 1);
    if (cut.empty()) continue;
    SliceFit sf;
    sf.offsets = offsets;
    sf.n_points = cut.size();
    sf.series = box_count(cut, ladder);
    try {
      sf.estimate = fit_dimension(sf.series, window);
    } catch (const InsufficientScales&) {
      continue;
    }
    const auto w = static_cast<double>(sf.n_points);
    weight_sum += w;
    weighted_d += w * sf.estimate.d;
    weighted_var += w * w * sf.estimate.std_error * sf.estimate.std_error;
    result.slices.push_back(std::move(sf));
  }
  if (result.slices.empty()) throw DegenerateSlicing("every slice was empty or too small to fit");

  DimensionEstimate& est = result.estimate;
  est.d = weighted_d / weight_sum + codim;
  est.std_error = std::sqrt(weighted_var) / weight_sum;
  double r2 = 0.0;
  for (const auto& sf : result.slices) r2 += static_cast<double>(sf.n_points) * sf.estimate.r2;
  est.r2 = r2 / weight_sum;
  est.window = result.slices.front().estimate.window;
  est.n_scales = result.slices.front().estimate.n_scales;
  return result;
}

ClusterBoxDimension cluster_box_dimension(const PointSet& points, double radius_of_gyration) {
  ClusterBoxDimension out;
  out.series = box_count(points, covering_dyadic_ladder(points));
  const ScaleWindow window = plateau_window(out.series, cluster_scale_bounds(radius_of_gyration));
  out.estimate = fit_dimension(out.series, window);
  return out;
}

ClusterSlicedDimension cluster_sliced_dimension(const PointSet& points, double radius_of_gyration, int codim,
                                                std::size_t n_slices) {
  const auto ladder = covering_dyadic_ladder(points);
  ClusterSlicedDimension out;
  out.pooled = pooled_slice_series(points, codim, n_slices, ladder);
  const ScaleWindow window = plateau_window(out.pooled, cluster_scale_bounds(radius_of_gyration));
  out.sliced = sliced_dimension(points, codim, n_slices, ladder, window);
  return out;
}

namespace {

constexpr std::int64_t kMaxFixtureSide = std::int64_t{1} << 20;
constexpr std::uint64_t kMaxFixturePoints = 100'000'000;

// True when, at some ternary digit position, at least `need` of the
// coordinates carry the digit 1 (the cell removed by the construction).
bool removed_cell(std::int64_t x, std::int64_t y, std::int64_t z, int depth, int need) {
  for (int i = 0; i < depth; ++i) {
    const int ones = (x % 3 == 1) + (y % 3 == 1) + (z % 3 == 1);
    if (ones >= need) return true;
    x /= 3;
    y /= 3;
    z /= 3;
  }
  return false;
}

}  // namespace

double similarity_dimension(FixtureKind kind) {
  switch (kind) {
    case FixtureKind::CantorDust1D: return std::log(2.0) / std::log(3.0);
    case FixtureKind::SierpinskiCarpet2D: return std::log(8.0) / std::log(3.0);
    case FixtureKind::MengerSponge3D: return std::log(20.0) / std::log(3.0);
    case FixtureKind::FilledSquare: return 2.0;
    case FixtureKind::LatticeLine: return 1.0;
  }
  return 0.0;
}

PointSet generate_fixture(FixtureKind kind, int depth) {
  if (depth < 1) throw std::invalid_argument("fixture depth must be >= 1");
  const bool ternary = kind == FixtureKind::CantorDust1D || kind == FixtureKind::SierpinskiCarpet2D ||
                       kind == FixtureKind::MengerSponge3D;
  std::int64_t side = 1;
  for (int i = 0; i < depth; ++i) {
    side *= ternary ? 3 : 2;
    if (side > kMaxFixtureSide) throw std::invalid_argument("fixture side exceeds the coordinate range");
  }
  const int ambient = kind == FixtureKind::CantorDust1D || kind == FixtureKind::LatticeLine ? 1
                      : kind == FixtureKind::MengerSponge3D                                 ? 3
                                                                                            : 2;
  double count = 1.0;
  switch (kind) {
    case FixtureKind::CantorDust1D: count = std::pow(2.0, depth); break;
    case FixtureKind::SierpinskiCarpet2D: count = std::pow(8.0, depth); break;
    case FixtureKind::MengerSponge3D: count = std::pow(20.0, depth); break;
    case FixtureKind::FilledSquare: count = static_cast<double>(side) * static_cast<double>(side); break;
    case FixtureKind::LatticeLine: count = static_cast<double>(side); break;
  }
  if (count > static_cast<double>(kMaxFixturePoints)) throw std::invalid_argument("fixture too large");

  std::vector<LatticePoint> pts;
  pts.reserve(static_cast<std::size_t>(count));
  const auto s = static_cast<std::int32_t>(side);
  switch (kind) {
    case FixtureKind::LatticeLine:
      for (std::int32_t x = 0; x < s; ++x) pts.emplace_back(x);
      break;
    case FixtureKind::FilledSquare:
      for (std::int32_t y = 0; y < s; ++y)
        for (std::int32_t x = 0; x < s; ++x) pts.emplace_back(x, y);
      break;
    case FixtureKind::CantorDust1D:
      for (std::int32_t x = 0; x < s; ++x)
        if (!removed_cell(x, 0, 0, depth, 1)) pts.emplace_back(x);
      break;
    case FixtureKind::SierpinskiCarpet2D:
      for (std::int32_t y = 0; y < s; ++y)
        for (std::int32_t x = 0; x < s; ++x)
          if (!removed_cell(x, y, 0, depth, 2)) pts.emplace_back(x, y);
      break;
    case FixtureKind::MengerSponge3D:
      for (std::int32_t z = 0; z < s; ++z)
        for (std::int32_t y = 0; y < s; ++y)
          for (std::int32_t x = 0; x < s; ++x)
            if (!removed_cell(x, y, z, depth, 2)) pts.emplace_back(x, y, z);
      break;
  }
  return PointSet(ambient, std::move(pts));
}

}  // namespace dla
