#include "dla/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>

#include "dla/dbm.hpp"
#include "dla/errors.hpp"
#include "dla/fractal.hpp"
#include "dla/io.hpp"
#include "dla/report.hpp"
#include "dla/walker.hpp"

namespace dla::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Bad user input: reported with exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json load_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
}

// Copies `key` from the config file into `target` unless the flag was given
// on the command line.
template <typename T>
void from_config(const json& cfg, const char* key, const CLI::Option* flag, T& target) {
  if (!cfg.contains(key) || flag->count() > 0) return;
  try {
    target = cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

void reject_unknown_keys(const json& cfg, const std::set<std::string>& known) {
  if (!cfg.is_object()) throw ConfigError("config file must hold a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

json estimate_json(const std::string& analysis, const DimensionEstimate& e) {
  return {{"analysis", analysis},   {"d", e.d},
          {"stderr", e.std_error},  {"r2", e.r2},
          {"eps_min", e.window.eps_min}, {"eps_max", e.window.eps_max},
          {"n_scales", e.n_scales}};
}

// ---------------------------------------------------------------- grow

struct GrowOptions {
  std::string engine = "walker";
  int dim = 2;
  std::uint64_t n = 1000;
  std::uint64_t seed = 1;
  std::string out = ".";
  std::string config;
  WalkerParams walker;
  DbmParams dbm;
};

struct GrowFlags {
  CLI::Option *engine, *dim, *n, *seed, *out;
  CLI::Option *launch, *kill, *max_steps;
  CLI::Option *margin, *eta, *k, *omega, *tol, *max_sweeps;
};

GrowFlags add_grow_flags(CLI::App& sub, GrowOptions& o) {
  GrowFlags f{};
  f.engine = sub.add_option("--engine", o.engine, "Growth engine: walker or dbm");
  f.dim = sub.add_option("--dim", o.dim, "Lattice dimension (2 or 3)");
  f.n = sub.add_option("--n", o.n, "Number of particles to add to the seed");
  f.seed = sub.add_option("--seed", o.seed, "RNG seed");
  f.out = sub.add_option("--out", o.out, "Output directory");
  sub.add_option("--config", o.config, "JSON config file; flags override it");
  f.launch = sub.add_option("--launch-factor", o.walker.launch_factor, "walker: launch radius factor");
  f.kill = sub.add_option("--kill-factor", o.walker.kill_factor, "walker: kill radius factor");
  f.max_steps = sub.add_option("--max-steps", o.walker.max_steps_per_walker, "walker: step budget per launch");
  f.margin = sub.add_option("--margin", o.dbm.grid_margin, "dbm: far boundary radius / R_max");
  f.eta = sub.add_option("--eta", o.dbm.eta, "dbm: growth exponent");
  f.k = sub.add_option("--k", o.dbm.k, "dbm: growth gain");
  f.omega = sub.add_option("--omega", o.dbm.sor_omega, "dbm: over-relaxation factor");
  f.tol = sub.add_option("--tol", o.dbm.tol, "dbm: solver tolerance");
  f.max_sweeps = sub.add_option("--max-sweeps", o.dbm.max_sweeps, "dbm: solver sweep budget");
  return f;
}

void apply_grow_config(GrowOptions& o, const GrowFlags& f) {
  if (o.config.empty()) return;
  const json cfg = load_json(o.config);
  reject_unknown_keys(cfg, {"engine", "dim", "n", "seed", "out", "launch_factor", "kill_factor", "max_steps",
                            "grid_margin", "eta", "k", "sor_omega", "tol", "max_sweeps"});
  from_config(cfg, "engine", f.engine, o.engine);
  from_config(cfg, "dim", f.dim, o.dim);
  from_config(cfg, "n", f.n, o.n);
  from_config(cfg, "seed", f.seed, o.seed);
  from_config(cfg, "out", f.out, o.out);
  from_config(cfg, "launch_factor", f.launch, o.walker.launch_factor);
  from_config(cfg, "kill_factor", f.kill, o.walker.kill_factor);
  from_config(cfg, "max_steps", f.max_steps, o.walker.max_steps_per_walker);
  from_config(cfg, "grid_margin", f.margin, o.dbm.grid_margin);
  from_config(cfg, "eta", f.eta, o.dbm.eta);
  from_config(cfg, "k", f.k, o.dbm.k);
  from_config(cfg, "sor_omega", f.omega, o.dbm.sor_omega);
  from_config(cfg, "tol", f.tol, o.dbm.tol);
  from_config(cfg, "max_sweeps", f.max_sweeps, o.dbm.max_sweeps);
}

json resolved_grow_config(const GrowOptions& o) {
  json j{{"engine", o.engine}, {"dim", o.dim}, {"n", o.n}, {"seed", o.seed}};
  if (o.engine == "walker") {
    j["launch_factor"] = o.walker.launch_factor;
    j["kill_factor"] = o.walker.kill_factor;
    j["max_steps"] = o.walker.max_steps_per_walker;
  } else {
    j["grid_margin"] = o.dbm.grid_margin;
    j["eta"] = o.dbm.eta;
    j["k"] = o.dbm.k;
    j["sor_omega"] = o.dbm.sor_omega;
    j["tol"] = o.dbm.tol;
    j["max_sweeps"] = o.dbm.max_sweeps;
  }
  return j;
}

int cmd_grow(GrowOptions& o, const GrowFlags& f, std::ostream& out) {
  apply_grow_config(o, f);
  if (o.engine != "walker" && o.engine != "dbm") throw ConfigError("--engine must be walker or dbm");
  if (o.dim != 2 && o.dim != 3) throw ConfigError("--dim must be 2 or 3");
  if (o.n < 1) throw ConfigError("--n must be >= 1");

  o.walker.dim = o.dbm.dim = o.dim;
  o.walker.n_particles = o.dbm.n_particles = o.n;
  o.walker.seed.value = o.dbm.seed.value = o.seed;
  try {
    if (o.engine == "walker") {
      o.walker.validate();
    } else {
      o.dbm.validate();
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  std::optional<std::pair<Cluster, GrowthHistory>> grown;
  if (o.engine == "walker") {
    grown.emplace(grow(o.walker));
  } else {
    grown.emplace(run_dbm(o.dbm));
  }
  const auto& [cluster, history] = *grown;

  const fs::path dir(o.out);
  fs::create_directories(dir);
  io::write_snapshot(dir / "cluster.snap", cluster, o.seed);
  io::write_history(dir / "history.csv", history);
  write_json(dir / "grow.json", {{"version", kVersion}, {"config", resolved_grow_config(o)}});

  out << "grown n=" << o.n << " dim=" << o.dim << " engine=" << o.engine << " seed=" << o.seed
      << " Rg=" << fixed(cluster.radius_of_gyration(), 4) << '\n';
  return kOk;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeOptions {
  std::string snapshot;
  std::string history;
  std::string out;
  std::string config;
  std::string ladder = "dyadic";
  bool boxdim = false;
  bool rgdim = false;
  std::vector<int> slicedim;
  std::size_t slices = 10;
  std::vector<double> window;
  std::vector<double> rg_window{0.05, 1.0};
};

struct AnalyzeFlags {
  CLI::Option *boxdim, *rgdim, *slicedim, *slices, *out, *ladder, *window, *rg_window, *history;
};

AnalyzeFlags add_analyze_flags(CLI::App& sub, AnalyzeOptions& o) {
  AnalyzeFlags f{};
  sub.add_option("snapshot", o.snapshot, "Snapshot file written by grow")->required();
  f.history = sub.add_option("--history", o.history, "History CSV (default: history.csv next to the snapshot)");
  f.out = sub.add_option("--out", o.out, "Output directory (default: the snapshot's directory)");
  sub.add_option("--config", o.config, "JSON config file; flags override it");
  f.boxdim = sub.add_flag("--boxdim", o.boxdim, "Box-counting dimension of the interface");
  f.rgdim = sub.add_flag("--rgdim", o.rgdim, "Mass-radius dimension from the growth history");
  f.slicedim = sub.add_option("--slicedim", o.slicedim, "Sliced dimension with codimension 1 (planes) or 2 (lines)");
  f.slices = sub.add_option("--slices", o.slices, "Slices per dropped axis");
  f.ladder = sub.add_option("--ladder", o.ladder, "Box sizes for --boxdim: dyadic or ternary");
  f.window = sub.add_option("--window", o.window, "Fixed fit window EPS_MIN EPS_MAX instead of plateau selection")
                 ->expected(2);
  f.rg_window = sub.add_option("--rg-window", o.rg_window, "Mass-radius window as fractions of the final R_g")
                    ->expected(2);
  return f;
}

void apply_analyze_config(AnalyzeOptions& o, const AnalyzeFlags& f) {
  if (o.config.empty()) return;
  const json cfg = load_json(o.config);
  reject_unknown_keys(cfg, {"boxdim", "rgdim", "slicedim", "slices", "out", "ladder", "window", "rg_window", "history"});
  from_config(cfg, "boxdim", f.boxdim, o.boxdim);
  from_config(cfg, "rgdim", f.rgdim, o.rgdim);
  from_config(cfg, "slicedim", f.slicedim, o.slicedim);
  from_config(cfg, "slices", f.slices, o.slices);
  from_config(cfg, "out", f.out, o.out);
  from_config(cfg, "ladder", f.ladder, o.ladder);
  from_config(cfg, "window", f.window, o.window);
  from_config(cfg, "rg_window", f.rg_window, o.rg_window);
  from_config(cfg, "history", f.history, o.history);
}

int cmd_analyze(AnalyzeOptions& o, const AnalyzeFlags& f, std::ostream& out) {
  apply_analyze_config(o, f);
  if (!o.boxdim && !o.rgdim && o.slicedim.empty()) {
    throw ConfigError("no analysis requested (use --boxdim, --rgdim or --slicedim)");
  }
  if (o.ladder != "dyadic" && o.ladder != "ternary") throw ConfigError("--ladder must be dyadic or ternary");
  if (!o.window.empty() && (o.window.size() != 2 || !(o.window[0] < o.window[1]))) {
    throw ConfigError("--window needs EPS_MIN < EPS_MAX");
  }
  if (o.rg_window.size() != 2 || !(o.rg_window[0] < o.rg_window[1])) {
    throw ConfigError("--rg-window needs LO < HI");
  }
  for (const int c : o.slicedim) {
    if (c != 1 && c != 2) throw ConfigError("--slicedim codimension must be 1 or 2");
  }
  if (!o.slicedim.empty() && o.slices < 3) throw ConfigError("--slices must be >= 3");

  const fs::path snap_path(o.snapshot);
  io::Snapshot snap;
  try {
    snap = io::read_snapshot(snap_path);
  } catch (const ParseError& e) {
    throw ConfigError(snap_path.string() + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  const Cluster& cluster = snap.cluster;
  if (!o.slicedim.empty() && cluster.dim() != 3) throw ConfigError("slicedim requires dim=3");

  const fs::path dir = o.out.empty() ? snap_path.parent_path() : fs::path(o.out);
  if (!dir.empty()) fs::create_directories(dir);

  const double rg = cluster.radius_of_gyration();
  const std::optional<ScaleWindow> fixed_window =
      o.window.empty() ? std::nullopt : std::optional<ScaleWindow>(ScaleWindow{o.window[0], o.window[1]});
  json estimates = json::array();

  if (o.boxdim) {
    const PointSet surface = extract_interface(cluster);
    ScaleSeries series;
    if (o.ladder == "ternary") {
      int top = 0;
      for (std::int64_t side = 1; side < static_cast<std::int64_t>(2 * cluster.bounding_radius() + 2); side *= 3) ++top;
      series = box_count_ternary(surface, ternary_ladder(0, top));
    } else {
      series = box_count(surface, covering_dyadic_ladder(surface));
    }
    const ScaleWindow window = fixed_window ? *fixed_window : plateau_window(series, cluster_scale_bounds(rg));
    const DimensionEstimate e = fit_dimension(series, window);
    json j = estimate_json("boxdim", e);
    j["ladder"] = o.ladder;
    j["interface_sites"] = surface.size();
    estimates.push_back(j);
    io::write_series(dir / "boxdim.csv", series);
    out << "boxdim d=" << fixed(e.d, 4) << " stderr=" << fixed(e.std_error, 4) << '\n';
  }

  if (o.rgdim) {
    const fs::path hist_path = o.history.empty() ? snap_path.parent_path() / "history.csv" : fs::path(o.history);
    GrowthHistory history;
    try {
      history = io::read_history(hist_path);
    } catch (const std::exception& e) {
      throw ConfigError(hist_path.string() + ": " + e.what());
    }
    const DimensionEstimate e = mass_radius_dimension(history, {o.rg_window[0], o.rg_window[1]});
    json j = estimate_json("rgdim", e);
    j["window_fraction"] = o.rg_window;
    estimates.push_back(j);
    std::ofstream csv(dir / "rgdim.csv");
    csv << "n,rg\n";
    for (const auto& r : history) {
      if (r.rg >= e.window.eps_min && r.rg <= e.window.eps_max) csv << r.n << ',' << fixed(r.rg, 6) << '\n';
    }
    out << "rgdim d=" << fixed(e.d, 4) << " stderr=" << fixed(e.std_error, 4) << '\n';
  }

  if (!o.slicedim.empty()) {
    const PointSet surface = extract_interface(cluster);
    for (const int codim : o.slicedim) {
      SlicedDimension sliced;
      ScaleSeries pooled;
      if (fixed_window) {
        const auto ladder = covering_dyadic_ladder(surface);
        pooled = pooled_slice_series(surface, codim, o.slices, ladder);
        sliced = sliced_dimension(surface, codim, o.slices, ladder, *fixed_window);
      } else {
        auto r = cluster_sliced_dimension(surface, rg, codim, o.slices);
        sliced = std::move(r.sliced);
        pooled = std::move(r.pooled);
      }
      json j = estimate_json("slicedim", sliced.estimate);
      j["codim"] = codim;
      j["n_slices"] = o.slices;
      j["slices_used"] = sliced.slices.size();
      estimates.push_back(j);
      io::write_series(dir / ("slicedim_codim" + std::to_string(codim) + ".csv"), pooled);
      out << "slicedim codim=" << codim << " d=" << fixed(sliced.estimate.d, 4)
          << " stderr=" << fixed(sliced.estimate.std_error, 4) << '\n';
    }
  }

  json grow_config = nullptr;
  const fs::path grow_json = snap_path.parent_path() / "grow.json";
  if (fs::exists(grow_json)) grow_config = load_json(grow_json).value("config", json(nullptr));

  json analysis{{"boxdim", o.boxdim},     {"rgdim", o.rgdim},  {"slicedim", o.slicedim},
                {"slices", o.slices},     {"ladder", o.ladder}, {"rg_window", o.rg_window},
                {"window", fixed_window ? json(o.window) : json("plateau")}};
  const json results{{"version", kVersion},
                     {"snapshot",
                      {{"file", snap_path.filename().string()},
                       {"dim", cluster.dim()},
                       {"sites", cluster.size()},
                       {"seed", snap.seed}}},
                     {"grow_config", grow_config},
                     {"analysis_config", analysis},
                     {"estimates", estimates}};
  write_json(dir / "results.json", results);
  return kOk;
}

// ---------------------------------------------------------------- report

struct ReportOptions {
  std::vector<std::string> results;
  std::string out;
};

int cmd_report(const ReportOptions& o, std::ostream& out) {
  std::vector<json> docs;
  for (const auto& path : o.results) docs.push_back(load_json(path));
  report::Report rep;
  try {
    rep = report::build_report(docs);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const std::string text = report::render_text(rep);
  out << text;
  if (!o.out.empty()) {
    const fs::path dir(o.out);
    fs::create_directories(dir);
    std::ofstream(dir / "report.txt") << text;
    write_json(dir / "report.json", report::to_json(rep));
  }
  return kOk;
}

// ---------------------------------------------------------------- render

struct RenderOptions {
  std::string snapshot;
  std::string out;
  std::optional<int> slice_axis;
  std::int32_t slice_offset = 0;
};

int cmd_render(const RenderOptions& o, std::ostream& out) {
  io::Snapshot snap;
  try {
    snap = io::read_snapshot(fs::path(o.snapshot));
  } catch (const std::runtime_error& e) {
    throw ConfigError(o.snapshot + ": " + e.what());
  }
  PointSet points = to_point_set(snap.cluster);
  if (snap.cluster.dim() == 3) {
    if (!o.slice_axis) throw ConfigError("rendering a 3D snapshot needs --slice-axis and --slice-offset");
    if (*o.slice_axis < 0 || *o.slice_axis > 2) throw ConfigError("--slice-axis must be 0, 1 or 2");
    const std::array<int, 1> axes{*o.slice_axis};
    const std::array<std::int32_t, 1> offsets{o.slice_offset};
    points = slice(points, axes, offsets, 1);
    if (points.empty()) throw ConfigError("the requested slice contains no sites");
  }
  const io::GrayImage img = io::render_points(points);
  const fs::path path(o.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  io::write_pgm(path, img);
  out << "rendered " << img.width << "x" << img.height << " " << path.string() << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Laplacian growth (DLA / dielectric breakdown) and fractal dimension analysis", "dlagrow"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  GrowOptions grow_opts;
  auto* grow_cmd = app.add_subcommand("grow", "Grow a cluster and write cluster.snap and history.csv");
  const GrowFlags grow_flags = add_grow_flags(*grow_cmd, grow_opts);

  AnalyzeOptions analyze_opts;
  auto* analyze_cmd = app.add_subcommand("analyze", "Estimate fractal dimensions of a snapshot");
  const AnalyzeFlags analyze_flags = add_analyze_flags(*analyze_cmd, analyze_opts);

  ReportOptions report_opts;
  auto* report_cmd = app.add_subcommand("report", "Compare sliced-dimension results with the turbulence table");
  report_cmd->add_option("results", report_opts.results, "results.json files")->required();
  report_cmd->add_option("--out", report_opts.out, "Directory for report.txt and report.json");

  RenderOptions render_opts;
  auto* render_cmd = app.add_subcommand("render", "Write a PGM image of a snapshot");
  render_cmd->add_option("snapshot", render_opts.snapshot, "Snapshot file")->required();
  render_cmd->add_option("--out", render_opts.out, "Output .pgm path")->required();
  render_cmd->add_option("--slice-axis", render_opts.slice_axis, "3D only: axis normal to the rendered plane");
  render_cmd->add_option("--slice-offset", render_opts.slice_offset, "3D only: plane coordinate");

  std::vector<std::string> argv_storage{"dlagrow"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInvalidConfig;
  }

  try {
    if (*grow_cmd) return cmd_grow(grow_opts, grow_flags, out);
    if (*analyze_cmd) return cmd_analyze(analyze_opts, analyze_flags, out);
    if (*report_cmd) return cmd_report(report_opts, out);
    if (*render_cmd) return cmd_render(render_opts, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const InsufficientScales& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const DegenerateSlicing& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const ConvergenceFailure& e) {
    err << "error: " << e.what() << '\n';
    return kGrowthFailure;
  } catch (const DegenerateField& e) {
    err << "error: " << e.what() << '\n';
    return kGrowthFailure;
  } catch (const GrowthStalled& e) {
    err << "error: " << e.what() << '\n';
    return kGrowthFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kGrowthFailure;
  }
  return kInvalidConfig;
}

}  // namespace dla::cli
