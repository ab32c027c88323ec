#include <doctest.h>

#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dla/cli.hpp"
#include "dla/fractal.hpp"
#include "dla/io.hpp"

namespace fs = std::filesystem;
using namespace dla;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run dlagrow(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dla_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Breadth-first order from the origin, so every site touches an earlier one.
Cluster bfs_cluster(const PointSet& ps) {
  std::unordered_set<std::uint64_t> left;
  for (const auto& p : ps.points()) left.insert(p.key());
  Cluster c(ps.dim());
  left.erase(LatticePoint::origin(ps.dim()).key());
  std::deque<LatticePoint> queue{LatticePoint::origin(ps.dim())};
  while (!queue.empty()) {
    const LatticePoint p = queue.front();
    queue.pop_front();
    for (int a = 0; a < ps.dim(); ++a)
      for (const int s : {-1, 1}) {
        const LatticePoint q = p.step(a, s);
        if (left.erase(q.key()) == 0) continue;
        c.add_site(q);
        queue.push_back(q);
      }
  }
  return c;
}

}  // namespace

TEST_CASE("grow writes a snapshot of n+1 sites and a summary line") {
  const auto dir = scratch("grow");
  const Run r = dlagrow({"grow", "--engine", "walker", "--dim", "2", "--n", "100", "--seed", "1", "--out", dir.string()});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.rfind("grown n=100 dim=2 engine=walker seed=1 Rg=", 0) == 0);
  const auto snap = io::read_snapshot(dir / "cluster.snap");
  CHECK(snap.cluster.size() == 101);
  CHECK(io::read_history(dir / "history.csv").size() == 100);
  CHECK(fs::exists(dir / "grow.json"));
}

TEST_CASE("grow and analyze are byte-for-byte deterministic") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  for (const auto& dir : {a, b}) {
    REQUIRE(dlagrow({"grow", "--n", "1500", "--seed", "8", "--out", dir.string()}).code == 0);
    REQUIRE(dlagrow({"analyze", (dir / "cluster.snap").string(), "--boxdim", "--rgdim"}).code == 0);
  }
  CHECK(slurp(a / "cluster.snap") == slurp(b / "cluster.snap"));
  CHECK(slurp(a / "history.csv") == slurp(b / "history.csv"));
  CHECK(slurp(a / "results.json") == slurp(b / "results.json"));

  const auto results = nlohmann::json::parse(slurp(a / "results.json"));
  CHECK(results["version"] == cli::kVersion);
  CHECK(results["snapshot"]["sites"] == 1501);
  CHECK(results["grow_config"]["seed"] == 8);
  REQUIRE(results["estimates"].size() == 2);
  CHECK(results["estimates"][0]["analysis"] == "boxdim");
  CHECK(results["estimates"][1]["analysis"] == "rgdim");
  CHECK(fs::exists(a / "boxdim.csv"));
  CHECK(fs::exists(a / "rgdim.csv"));
}

TEST_CASE("a config file is read and flags override it") {
  const auto dir = scratch("config");
  std::ofstream(dir / "cfg.json") << R"({"n": 50, "seed": 4, "dim": 2})";
  REQUIRE(dlagrow({"grow", "--config", (dir / "cfg.json").string(), "--n", "30", "--out", dir.string()}).code == 0);
  const auto snap = io::read_snapshot(dir / "cluster.snap");
  CHECK(snap.cluster.size() == 31);
  CHECK(snap.seed == 4);

  std::ofstream(dir / "bad.json") << R"({"n": 50, "particles": 4})";
  CHECK(dlagrow({"grow", "--config", (dir / "bad.json").string(), "--out", dir.string()}).code == cli::kInvalidConfig);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  const Run conv = dlagrow({"grow", "--engine", "dbm", "--n", "5", "--tol", "1e-99", "--max-sweeps", "10", "--out",
                            dir.string()});
  CHECK(conv.code == cli::kGrowthFailure);
  CHECK(conv.err.find("convergence") != std::string::npos);

  CHECK(dlagrow({"grow", "--dim", "4", "--out", dir.string()}).code == cli::kInvalidConfig);
  CHECK(dlagrow({"grow", "--engine", "eden", "--out", dir.string()}).code == cli::kInvalidConfig);
  CHECK(dlagrow({"grow", "--bogus"}).code == cli::kInvalidConfig);
  CHECK(dlagrow({}).code == cli::kInvalidConfig);

  REQUIRE(dlagrow({"grow", "--n", "200", "--seed", "2", "--out", dir.string()}).code == 0);
  const Run slice2d = dlagrow({"analyze", (dir / "cluster.snap").string(), "--slicedim", "1"});
  CHECK(slice2d.code == cli::kInvalidConfig);
  CHECK(slice2d.err.find("slicedim requires dim=3") != std::string::npos);

  std::ofstream(dir / "corrupt.snap") << "dla-snapshot v1 dim=2 n=3 seed=0\n0 0\n1 0\n1 2 3\n";
  const Run corrupt = dlagrow({"analyze", (dir / "corrupt.snap").string(), "--boxdim"});
  CHECK(corrupt.code == cli::kInvalidConfig);
  CHECK(corrupt.err.find("line 4") != std::string::npos);
  CHECK(corrupt.err.find("arity") != std::string::npos);

  // A 2D-only results file carries no 3D slicing estimate.
  REQUIRE(dlagrow({"analyze", (dir / "cluster.snap").string(), "--boxdim"}).code == 0);
  const Run rep = dlagrow({"report", (dir / "results.json").string()});
  CHECK(rep.code == cli::kInvalidConfig);
}

TEST_CASE("boxdim of a Sierpinski carpet snapshot") {
  const auto dir = scratch("carpet");
  const Cluster carpet = bfs_cluster(generate_fixture(FixtureKind::SierpinskiCarpet2D, 4));
  REQUIRE(carpet.size() == 4096);
  io::write_snapshot(dir / "cluster.snap", carpet, 0);
  // Ternary fixtures are counted on their own base-3 ladder.
  REQUIRE(dlagrow({"analyze", (dir / "cluster.snap").string(), "--boxdim", "--ladder", "ternary"}).code == 0);
  const auto results = nlohmann::json::parse(slurp(dir / "results.json"));
  const double d = results["estimates"][0]["d"];
  CHECK(d == doctest::Approx(similarity_dimension(FixtureKind::SierpinskiCarpet2D)).epsilon(0.03 / 1.8928));
}

TEST_CASE("analyze and report on a small 3D cluster") {
  const auto dir = scratch("threed");
  REQUIRE(dlagrow({"grow", "--dim", "3", "--n", "4000", "--seed", "3", "--out", dir.string()}).code == 0);
  const Run an = dlagrow({"analyze", (dir / "cluster.snap").string(), "--slicedim", "1", "--slicedim", "2",
                          "--slices", "5"});
  REQUIRE(an.code == 0);
  const auto results = nlohmann::json::parse(slurp(dir / "results.json"));
  REQUIRE(results["estimates"].size() == 2);
  CHECK(results["estimates"][0]["codim"] == 1);
  CHECK(results["estimates"][1]["codim"] == 2);
  CHECK(results["estimates"][0]["n_slices"] == 5);

  const Run rep = dlagrow({"report", (dir / "results.json").string(), "--out", dir.string()});
  REQUIRE(rep.code == 0);
  CHECK(rep.out.find("Boundary layer") != std::string::npos);
  CHECK(rep.out.find("—") != std::string::npos);
  CHECK(slurp(dir / "report.txt") == rep.out);
  CHECK(nlohmann::json::parse(slurp(dir / "report.json")).contains("primary"));
}

TEST_CASE("render") {
  const auto dir = scratch("render");
  Cluster block(2);
  for (const auto& p : {LatticePoint(1, 0), LatticePoint(1, 1), LatticePoint(0, 1), LatticePoint(-1, 1),
                        LatticePoint(-1, 0), LatticePoint(-1, -1), LatticePoint(0, -1), LatticePoint(1, -1)})
    block.add_site(p);
  io::write_snapshot(dir / "block.snap", block, 0);
  REQUIRE(dlagrow({"render", (dir / "block.snap").string(), "--out", (dir / "block.pgm").string()}).code == 0);
  const std::string pgm = slurp(dir / "block.pgm");
  const std::string header = "P5\n7 7\n255\n";
  REQUIRE(pgm.size() == header.size() + 49);
  CHECK(pgm.substr(0, header.size()) == header);
  for (int r = 0; r < 7; ++r)
    for (int c = 0; c < 7; ++c) {
      const bool lit = r >= 2 && r <= 4 && c >= 2 && c <= 4;
      CHECK(static_cast<unsigned char>(pgm[header.size() + r * 7 + c]) == (lit ? 255 : 0));
    }

  REQUIRE(dlagrow({"grow", "--dim", "3", "--n", "50", "--out", dir.string()}).code == 0);
  CHECK(dlagrow({"render", (dir / "cluster.snap").string(), "--out", (dir / "x.pgm").string()}).code ==
        cli::kInvalidConfig);
  CHECK(dlagrow({"render", (dir / "cluster.snap").string(), "--out", (dir / "x.pgm").string(), "--slice-axis", "2",
                 "--slice-offset", "0"})
            .code == 0);
}
