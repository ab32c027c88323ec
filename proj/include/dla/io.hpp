#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dla/cluster.hpp"
#include "dla/fractal.hpp"

namespace dla::io {

// Text snapshot, growth order preserved:
//   dla-snapshot v1 dim=<2|3> n=<sites> seed=<u64>
//   <x> <y> [<z>]            one line per site, seed first
struct Snapshot {
  Cluster cluster{2};
  std::uint64_t seed = 0;
};

void write_snapshot(std::ostream& out, const Cluster& cluster, std::uint64_t seed);
void write_snapshot(const std::filesystem::path& path, const Cluster& cluster, std::uint64_t seed);

// Throws ParseError naming the offending line for header, arity, duplicate,
// adjacency and count problems.
Snapshot read_snapshot(std::istream& in);
Snapshot read_snapshot(const std::filesystem::path& path);

// `n,rg,rmax` rows with round-trip precision.
void write_history(const std::filesystem::path& path, const GrowthHistory& history);
GrowthHistory read_history(const std::filesystem::path& path);

// `epsilon,count` rows.
void write_series(const std::filesystem::path& path, const ScaleSeries& series);

// 8-bit grayscale image, row 0 at the top.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;
};

// One pixel per lattice site over the tight bounding box plus a 2-pixel
// margin; occupied sites are 255 on 0. +y points up. `points` must be 2D.
GrayImage render_points(const PointSet& points);

// Binary P5 PGM.
void write_pgm(std::ostream& out, const GrayImage& image);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

}  // namespace dla::io
