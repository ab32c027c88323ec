#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace dla::report {

// Measured dimensions of the turbulent/non-turbulent interface in classical
// shear flows, by 2-D and 1-D slicing. Absent cells were not measured.
struct ReferenceRow {
  std::string flow;
  std::optional<double> slicing_2d;
  std::optional<double> slicing_1d;
};

const std::array<ReferenceRow, 4>& reference_table();

// Measurement error quoted for the turbulence values.
inline constexpr double kTurbulenceError = 0.04;

struct SliceEstimate {
  double d = 0.0;
  double std_error = 0.0;
  std::size_t sources = 0;
};

struct Cell {
  std::optional<double> reference;
  double delta = 0.0;
  bool within = false;
};

struct Row {
  std::string flow;
  Cell slicing_2d;
  Cell slicing_1d;
};

struct Comparison {
  std::string basis;  // "2-D slicing" or "1-D slicing"
  SliceEstimate estimate;
  std::vector<Row> rows;
};

struct Report {
  // DLA value from plane cuts (the usual headline measurement)
  // against every reference cell.
  Comparison primary;
  // Column-matched line-cut comparison, when a codim-2 estimate exists.
  std::optional<Comparison> matched_1d;
};

// Within-tolerance rule: |delta| <= 0.04 + estimate standard error.
Cell compare(std::optional<double> reference, const SliceEstimate& estimate);

Comparison compare_all(const std::string& basis, const SliceEstimate& estimate, bool one_d_only = false);

// Collects the 3D slicedim estimates of the given results documents
// (several files are averaged, errors combined in quadrature). Throws
// std::invalid_argument when none carries a 3D slicedim estimate.
Report build_report(const std::vector<nlohmann::json>& results);

std::string render_text(const Report& report);
nlohmann::json to_json(const Report& report);

}  // namespace dla::report
