#include "dla/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "dla/errors.hpp"

namespace dla::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

template <typename T>
bool parse_number(std::string_view text, T& value) {
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc{} && ptr == end;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_snapshot(std::ostream& out, const Cluster& cluster, std::uint64_t seed) {
  out << "dla-snapshot v1 dim=" << cluster.dim() << " n=" << cluster.size() << " seed=" << seed << '\n';
  for (const auto& p : cluster.order()) {
    out << p[0];
    for (int a = 1; a < cluster.dim(); ++a) out << ' ' << p[a];
    out << '\n';
  }
}

void write_snapshot(const std::filesystem::path& path, const Cluster& cluster, std::uint64_t seed) {
  auto out = open_out(path);
  write_snapshot(out, cluster, seed);
}

Snapshot read_snapshot(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty snapshot: missing header", 1);

  const auto head = split_ws(line);
  int dim = 0;
  std::uint64_t n = 0;
  Snapshot snap;
  if (head.size() != 5 || head[0] != "dla-snapshot" || head[1] != "v1" || !head[2].starts_with("dim=") ||
      !head[3].starts_with("n=") || !head[4].starts_with("seed=") || !parse_number(head[2].substr(4), dim) ||
      !parse_number(head[3].substr(2), n) || !parse_number(head[4].substr(5), snap.seed)) {
    throw ParseError("header mismatch: expected 'dla-snapshot v1 dim=<2|3> n=<count> seed=<u64>'", 1);
  }
  if (dim != 2 && dim != 3) throw ParseError("header mismatch: dim must be 2 or 3", 1);

  snap.cluster = Cluster(dim);
  std::size_t line_no = 1;
  std::uint64_t sites = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (static_cast<int>(fields.size()) != dim) {
      throw ParseError("arity: expected " + std::to_string(dim) + " coordinates, got " + std::to_string(fields.size()),
                       line_no);
    }
    LatticePoint p = LatticePoint::origin(dim);
    for (int a = 0; a < dim; ++a) {
      std::int32_t c = 0;
      if (!parse_number(fields[a], c) || c <= -(1 << 20) || c >= (1 << 20)) {
        throw ParseError("malformed coordinate '" + std::string(fields[a]) + "'", line_no);
      }
      p[a] = c;
    }
    if (++sites > n) {
      throw ParseError("count mismatch: header declares " + std::to_string(n) + " sites, found more", line_no);
    }
    if (sites == 1) {
      if (p != LatticePoint::origin(dim)) throw ParseError("first site must be the seed at the origin", line_no);
      continue;
    }
    if (snap.cluster.contains(p)) throw ParseError("duplicate site", line_no);
    if (!snap.cluster.touches(p)) throw ParseError("site not adjacent to earlier sites", line_no);
    snap.cluster.add_site(p);
  }
  if (sites != n) {
    // Reported at the first missing record.
    throw ParseError("count mismatch: header declares " + std::to_string(n) + " sites, found " + std::to_string(sites),
                     line_no + 1);
  }
  return snap;
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_snapshot(in);
}

void write_history(const std::filesystem::path& path, const GrowthHistory& history) {
  auto out = open_out(path);
  out << "n,rg,rmax\n";
  for (const auto& r : history) out << r.n << ',' << format_real(r.rg) << ',' << format_real(r.rmax) << '\n';
}

GrowthHistory read_history(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line.rfind("n,rg,rmax", 0) != 0) throw ParseError("history header mismatch", 1);
  GrowthHistory history;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    GrowthRecord r;
    if (c1 == std::string::npos || c2 == std::string::npos) throw ParseError("history row needs 3 fields", line_no);
    const std::string_view v(line);
    if (!parse_number(v.substr(0, c1), r.n)) throw ParseError("malformed particle count", line_no);
    try {
      r.rg = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
      r.rmax = std::stod(line.substr(c2 + 1));
    } catch (const std::exception&) {
      throw ParseError("malformed radius", line_no);
    }
    history.push_back(r);
  }
  return history;
}

void write_series(const std::filesystem::path& path, const ScaleSeries& series) {
  auto out = open_out(path);
  out << "epsilon,count\n";
  for (const auto& s : series) out << s.epsilon << ',' << s.count << '\n';
}

GrayImage render_points(const PointSet& points) {
  if (points.dim() != 2) throw std::invalid_argument("only 2D point sets can be rendered");
  if (points.empty()) throw std::invalid_argument("nothing to render");
  std::int32_t xmin = std::numeric_limits<std::int32_t>::max(), ymin = xmin;
  std::int32_t xmax = std::numeric_limits<std::int32_t>::min(), ymax = xmax;
  for (const auto& p : points.points()) {
    xmin = std::min(xmin, p[0]);
    xmax = std::max(xmax, p[0]);
    ymin = std::min(ymin, p[1]);
    ymax = std::max(ymax, p[1]);
  }
  constexpr std::int32_t kMargin = 2;
  GrayImage img;
  img.width = static_cast<std::size_t>(xmax - xmin + 1 + 2 * kMargin);
  img.height = static_cast<std::size_t>(ymax - ymin + 1 + 2 * kMargin);
  img.pixels.assign(img.width * img.height, 0);
  for (const auto& p : points.points()) {
    const auto col = static_cast<std::size_t>(p[0] - xmin + kMargin);
    const auto row = static_cast<std::size_t>(ymax - p[1] + kMargin);
    img.pixels[row * img.width + col] = 255;
  }
  return img;
}

void write_pgm(std::ostream& out, const GrayImage& image) {
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  write_pgm(out, image);
}

}  // namespace dla::io
