#include "surfcl/cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace surfcl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& message) { throw Error("cli", message); }

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail("option '" + key + "' expects a number, got '" + value + "'");
  }
}

int to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail("option '" + key + "' expects an integer, got '" + value + "'");
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail("cannot write " + path.string());
  return f;
}

MeshKind mass_mesh_kind(const ProblemSpec& p) {
  return p.error_mesh == MeshKind::equator ? MeshKind::sphere : p.error_mesh;
}

std::string resolution_dir(int n) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "n%03d", n);
  return buf;
}

}  // namespace

DumpPolicy parse_dump_policy(const std::string& text) {
  if (text == "none") return DumpPolicy::none;
  if (text == "final") return DumpPolicy::final;
  if (text == "all") return DumpPolicy::all;
  fail("unknown dump policy '" + text + "' (none|final|all)");
}

std::string to_string(DumpPolicy policy) {
  switch (policy) {
    case DumpPolicy::none: return "none";
    case DumpPolicy::final: return "final";
    case DumpPolicy::all: return "all";
  }
  return "final";
}

void RunConfig::set(const std::string& raw_key, const std::string& raw_value) {
  std::string key = trim(raw_key);
  std::replace(key.begin(), key.end(), '-', '_');
  const std::string value = trim(raw_value);
  if (key == "experiment") {
    experiment = value;
  } else if (key == "n") {
    n.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) n.push_back(to_int(key, trim(item)));
  } else if (key == "order") {
    order = to_int(key, value);
  } else if (key == "cfl") {
    cfl = to_double(key, value);
  } else if (key == "embedding") {
    embedding = parse_embedding_mode(value);
  } else if (key == "extension") {
    extension = parse_extension_mode(value);
  } else if (key == "t_final") {
    t_final = to_double(key, value);
  } else if (key == "snapshots") {
    snapshots = to_int(key, value);
  } else if (key == "out") {
    out = value;
  } else if (key == "dump") {
    dump = parse_dump_policy(value);
  } else if (key == "weno_eps") {
    weno_eps = to_double(key, value);
  } else if (key == "sweep") {
    sweep = parse_sweep_method(value);
  } else if (key == "sweep_max_iterations") {
    sweep_max_iterations = to_int(key, value);
  } else if (key == "sweep_tol") {
    sweep_tol = to_double(key, value);
  } else if (key == "sweep_dtau") {
    sweep_dtau = to_double(key, value);
  } else if (key == "sweep_order") {
    sweep_order = to_int(key, value);
  } else {
    fail("unknown configuration key '" + raw_key + "'");
  }
}

std::map<std::string, std::string> RunConfig::read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail("cannot read configuration file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(path + ":" + std::to_string(lineno) + ": expected key=value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

void RunConfig::validate() const {
  const auto& ids = experiment_ids();
  if (std::find(ids.begin(), ids.end(), experiment) == ids.end())
    fail("unknown experiment '" + experiment + "'; run 'surfcl list' for the catalog");
  for (int v : n)
    if (v < kMinPoints) fail("n must be at least " + std::to_string(kMinPoints) + ", got " + std::to_string(v));
  if (order && *order != 1 && *order != 3) fail("order must be 1 or 3");
  if (!(cfl > 0.0 && cfl <= 1.0)) fail("cfl must lie in (0, 1]");
  if (t_final && !(*t_final >= 0.0)) fail("t-final must be non-negative");
  if (snapshots < 1) fail("snapshots must be at least 1");
}

SchemeConfig RunConfig::scheme(const ProblemSpec& problem) const {
  SchemeConfig s;
  s.order = order.value_or(problem.default_order);
  s.cfl = cfl;
  s.weno_eps = weno_eps;
  s.extension = extension;
  s.sweep = sweep;
  s.sweep_dtau = sweep_dtau;
  s.sweep_max_iterations = sweep_max_iterations;
  s.sweep_tol = sweep_tol;
  s.sweep_order = sweep_order;
  s.validate();
  return s;
}

std::vector<int> RunConfig::resolutions(const ProblemSpec& problem) const {
  return n.empty() ? problem.default_n : n;
}

double RunConfig::final_time(const ProblemSpec& problem) const { return t_final.value_or(problem.final_time); }

std::vector<double> RunConfig::output_times(double t_final) const {
  if (snapshots == 1) return {t_final};
  std::vector<double> t(static_cast<std::size_t>(snapshots));
  for (int i = 0; i < snapshots; ++i) t[std::size_t(i)] = t_final * i / (snapshots - 1);
  t.back() = t_final;
  return t;
}

std::string RunConfig::output_dir() const {
  if (!out.empty()) return out;
  if (const char* root = std::getenv(kOutputRootVariable); root && *root) return (fs::path(root) / experiment).string();
  return (fs::path("surfcl-out") / experiment).string();
}

std::string RunConfig::to_json() const {
  json j;
  j["experiment"] = experiment;
  j["n"] = n;
  j["order"] = order ? json(*order) : json(nullptr);
  j["cfl"] = cfl;
  j["embedding"] = to_string(embedding);
  j["extension"] = to_string(extension);
  j["t_final"] = t_final ? json(*t_final) : json(nullptr);
  j["snapshots"] = snapshots;
  j["dump"] = to_string(dump);
  j["weno_eps"] = weno_eps;
  j["sweep"] = to_string(sweep);
  j["sweep_max_iterations"] = sweep_max_iterations;
  j["sweep_order"] = sweep_order;
  j["sweep_tol"] = sweep_tol;
  j["sweep_dtau"] = sweep_dtau;
  return j.dump();
}

void write_snapshot(const std::string& path, const Simulation& sim, const std::string& experiment) {
  const TubeGrid& tube = sim.tube();
  const GridSpec& g = tube.grid();
  std::ofstream f = open_output(path);
  f << "surfcl-snapshot 1\n";
  f << "experiment " << experiment << "\n";
  f << "dims " << g.dim << "\n";
  f << "size";
  for (int a = 0; a < g.dim; ++a) f << ' ' << g.size[a];
  f << "\norigin";
  const Vec3 o = g.origin();
  for (int a = 0; a < g.dim; ++a) f << ' ' << num(o[a]);
  f << "\nspacing " << num(g.dx) << "\n";
  f << "time " << num(sim.state().time) << "\n";
  f << "classes 0=exterior 1=inner 2=outer\n";
  f << "order x-fastest\n";
  f << "data\n";
  char buf[48];
  const auto& values = sim.state().values;
  for (NodeIndex node = 0; node < g.count(); ++node) {
    const Slot s = tube.slot(node);
    if (s == kNoSlot) {
      f << "0 nan\n";
    } else {
      std::snprintf(buf, sizeof buf, "%d %.12g\n", int(tube.point_class(node)), values[std::size_t(s)]);
      f << buf;
    }
  }
}

RunReport run_experiment(const RunConfig& config) {
  config.validate();
  const auto wall_start = std::chrono::steady_clock::now();
  const ProblemSpec problem = make_problem(config.experiment);
  const SchemeConfig scheme = config.scheme(problem);
  const double t_final = config.final_time(problem);
  const std::vector<double> times = config.output_times(t_final);

  RunReport report;
  report.output_dir = config.output_dir();
  const fs::path out(report.output_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) fail("cannot create output directory " + out.string() + ": " + ec.message());

  const SurfaceMesh error_mesh = SurfaceMesh::for_problem(problem);
  const SurfaceMesh mass_mesh = SurfaceMesh::for_problem(problem, mass_mesh_kind(problem));

  json runs = json::array();
  for (int n : config.resolutions(problem)) {
    if (n < RunConfig::kMinPoints) fail("n must be at least " + std::to_string(RunConfig::kMinPoints));
    Simulation sim(problem, n, scheme, config.embedding);
    const fs::path dir = out / resolution_dir(n);
    fs::create_directories(dir, ec);
    if (ec) fail("cannot create output directory " + dir.string() + ": " + ec.message());

    std::vector<std::pair<double, double>> mass;
    int snapshot_index = 0;
    auto hook = [&](const GridField& u) {
      mass.emplace_back(u.time, sim.mass(mass_mesh));
      const bool is_final = u.time == t_final;
      if (config.dump == DumpPolicy::all || (config.dump == DumpPolicy::final && is_final)) {
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%04d.txt", snapshot_index);
        write_snapshot((dir / name).string(), sim, problem.id);
      }
      ++snapshot_index;
    };
    const RunStats stats = sim.advance(t_final, times, hook);

    {
      std::ofstream f = open_output(dir / "mass.csv");
      f << "t,mass\n";
      for (const auto& [t, m] : mass) f << num(t) << ',' << num(m) << '\n';
    }

    json run;
    run["n"] = n;
    run["dx"] = sim.dx();
    run["tube"] = {{"inner", sim.tube().inner_count()}, {"outer", sim.tube().outer_count()}};
    run["steps"] = stats.steps;
    run["dt"] = {{"min", stats.dt_min}, {"max", stats.dt_max}, {"mean", stats.dt_mean}};
    run["sweeps"] = stats.sweeps;
    run["sweep_iterations_max"] = stats.sweep_iterations_max;
    run["sweep_stalls"] = stats.sweep_stalls;
    run["warnings"] = stats.warnings;
    json mass_json = json::array();
    for (const auto& [t, m] : mass) mass_json.push_back({t, m});
    run["mass"] = mass_json;
    if (problem.oracle) {
      const ErrorNorms e = sim.errors(error_mesh);
      report.errors.push_back({sim.dx(), n, e});
      run["errors"] = {{"l1", e.l1}, {"l2", e.l2}, {"linf", e.linf}};
    } else {
      run["errors"] = nullptr;
    }
    runs.push_back(run);
  }

  report.rates = convergence_rates(report.errors);
  if (problem.discontinuous && report.rates.l1)
    report.rates.notes.push_back("discontinuous solution: only the l1 rate is a convergence claim");
  {
    std::ofstream f = open_output(out / "errors.csv");
    f << "dx,n,l1,l2,linf\n";
    for (const auto& r : report.errors)
      f << num(r.dx) << ',' << r.n << ',' << num(r.norms.l1) << ',' << num(r.norms.l2) << ',' << num(r.norms.linf) << '\n';
  }
  json rates = json::object();
  {
    std::ofstream f = open_output(out / "rates.csv");
    f << "norm,rate\n";
    const std::pair<const char*, const std::optional<double>*> entries[] = {
        {"l1", &report.rates.l1}, {"l2", &report.rates.l2}, {"linf", &report.rates.linf}};
    for (const auto& [name, rate] : entries) {
      if (!*rate) continue;
      f << name << ',' << num(**rate) << '\n';
      rates[name] = **rate;
    }
  }

  json j;
  j["config"] = json::parse(config.to_json());
  j["experiment"] = {{"id", problem.id}, {"description", problem.description}, {"final_time", t_final},
                     {"shape", problem.shape.name()}, {"order", scheme.order}};
  j["runs"] = runs;
  j["rates"] = rates;
  j["notes"] = report.rates.notes;
  report.json = j.dump(2);
  {
    std::ofstream f = open_output(out / "report.json");
    f << report.json << '\n';
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  {
    std::ofstream f = open_output(out / "timing.json");
    f << json{{"wall_seconds", report.wall_seconds}}.dump(2) << '\n';
  }
  return report;
}

}  // namespace surfcl
