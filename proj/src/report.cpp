#include "dla/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace dla::report {

const std::array<ReferenceRow, 4>& reference_table() {
  static const std::array<ReferenceRow, 4> rows{{
      {"Boundary layer", 2.38, 2.40},
      {"Axisymmetric jet", 2.33, 2.32},
      {"Plane wake", std::nullopt, 2.37},
      {"Mixing layer", std::nullopt, 2.40},
  }};
  return rows;
}

Cell compare(std::optional<double> reference, const SliceEstimate& estimate) {
  Cell c;
  c.reference = reference;
  if (!reference) return c;
  c.delta = std::abs(estimate.d - *reference);
  // Slack for decimal inputs such as 2.33 - 2.29 that are not exact in binary.
  c.within = c.delta <= kTurbulenceError + estimate.std_error + 1e-12;
  return c;
}

Comparison compare_all(const std::string& basis, const SliceEstimate& estimate, bool one_d_only) {
  Comparison cmp{basis, estimate, {}};
  for (const auto& ref : reference_table()) {
    Row row{ref.flow, {}, {}};
    if (!one_d_only) row.slicing_2d = compare(ref.slicing_2d, estimate);
    row.slicing_1d = compare(ref.slicing_1d, estimate);
    cmp.rows.push_back(row);
  }
  return cmp;
}

namespace {

std::optional<SliceEstimate> pooled(const std::vector<nlohmann::json>& results, int codim) {
  SliceEstimate acc;
  double var = 0.0;
  for (const auto& doc : results) {
    if (doc.value("/snapshot/dim"_json_pointer, 0) != 3) continue;
    for (const auto& e : doc.value("estimates", nlohmann::json::array())) {
      if (e.value("analysis", "") != "slicedim" || e.value("codim", 0) != codim) continue;
      acc.d += e.at("d").get<double>();
      var += std::pow(e.at("stderr").get<double>(), 2);
      ++acc.sources;
    }
  }
  if (acc.sources == 0) return std::nullopt;
  const auto n = static_cast<double>(acc.sources);
  acc.d /= n;
  acc.std_error = std::sqrt(var) / n;
  return acc;
}

std::string fmt(const char* spec, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

nlohmann::json cell_json(const Cell& c) {
  if (!c.reference) return nullptr;
  return {{"reference", *c.reference}, {"delta", c.delta}, {"within", c.within}};
}

void render_comparison(std::ostringstream& out, const Comparison& cmp, bool one_d_only) {
  out << "DLA estimate (" << cmp.basis << "): " << fmt("%.3f", cmp.estimate.d) << " +/- "
      << fmt("%.3f", cmp.estimate.std_error) << "  (from " << cmp.estimate.sources << " result"
      << (cmp.estimate.sources == 1 ? "" : "s") << ")\n";
  out << "tolerance: |delta| <= " << fmt("%.2f", kTurbulenceError) << " + " << fmt("%.3f", cmp.estimate.std_error)
      << " = " << fmt("%.3f", kTurbulenceError + cmp.estimate.std_error) << "\n\n";
  char line[160];
  if (one_d_only) {
    std::snprintf(line, sizeof line, "%-18s %-12s %-7s %s\n", "Flow", "1-D slicing", "|delta|", "within");
  } else {
    std::snprintf(line, sizeof line, "%-18s %-12s %-7s %-7s %-12s %-7s %s\n", "Flow", "2-D slicing", "|delta|",
                  "within", "1-D slicing", "|delta|", "within");
  }
  out << line;
  auto cols = [](const Cell& c) {
    if (!c.reference) return std::array<std::string, 3>{"—", "—", "—"};
    return std::array<std::string, 3>{fmt("%.2f", *c.reference), fmt("%.3f", c.delta), c.within ? "yes" : "no"};
  };
  // printf width counts bytes; pad the em dash by hand.
  auto pad = [](const std::string& s, std::size_t width) {
    const std::size_t shown = s == "—" ? 1 : s.size();
    return s + std::string(width > shown ? width - shown : 0, ' ');
  };
  for (const auto& row : cmp.rows) {
    const auto c1 = cols(row.slicing_1d);
    out << pad(row.flow, 19);
    if (!one_d_only) {
      const auto c2 = cols(row.slicing_2d);
      out << pad(c2[0], 13) << pad(c2[1], 8) << pad(c2[2], 8);
    }
    out << pad(c1[0], 13) << pad(c1[1], 8) << c1[2] << '\n';
  }
}

nlohmann::json comparison_json(const Comparison& cmp) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : cmp.rows) {
    rows.push_back({{"flow", r.flow}, {"slicing_2d", cell_json(r.slicing_2d)}, {"slicing_1d", cell_json(r.slicing_1d)}});
  }
  return {{"basis", cmp.basis},
          {"d", cmp.estimate.d},
          {"stderr", cmp.estimate.std_error},
          {"sources", cmp.estimate.sources},
          {"tolerance", kTurbulenceError + cmp.estimate.std_error},
          {"rows", rows}};
}

}  // namespace

Report build_report(const std::vector<nlohmann::json>& results) {
  const auto plane = pooled(results, 1);
  const auto line = pooled(results, 2);
  if (!plane && !line) throw std::invalid_argument("no 3D slicedim estimate in the given results");
  Report rep;
  if (plane) {
    rep.primary = compare_all("2-D slicing", *plane);
    if (line) rep.matched_1d = compare_all("1-D slicing", *line, true);
  } else {
    rep.primary = compare_all("1-D slicing", *line);
  }
  return rep;
}

std::string render_text(const Report& report) {
  std::ostringstream out;
  out << "Fractal dimension of the turbulent/non-turbulent interface vs. DLA\n\n";
  render_comparison(out, report.primary, false);
  if (report.matched_1d) {
    out << '\n';
    render_comparison(out, *report.matched_1d, true);
  }
  return out.str();
}

nlohmann::json to_json(const Report& report) {
  nlohmann::json j{{"turbulence_error", kTurbulenceError}, {"primary", comparison_json(report.primary)}};
  j["matched_1d"] = report.matched_1d ? comparison_json(*report.matched_1d) : nlohmann::json(nullptr);
  return j;
}

}  // namespace dla::report
