#pragma once

#include "surfcl/simulation.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace surfcl {

enum class DumpPolicy { none, final, all };

DumpPolicy parse_dump_policy(const std::string& text);
std::string to_string(DumpPolicy policy);

struct RunConfig {
  static constexpr int kMinPoints = 41;
  static constexpr const char* kOutputRootVariable = "SURFCL_OUTPUT_ROOT";

  std::string experiment;
  std::vector<int> n;            // empty: the experiment's default sweep
  std::optional<int> order;      // empty: the experiment's default order
  double cfl = 0.5;
  EmbeddingMode embedding = EmbeddingMode::pushforward;
  ExtensionMode extension = ExtensionMode::neumann_sweep;
  std::optional<double> t_final;
  int snapshots = 2;             // output times evenly spaced on [0, T], ends included
  std::string out;               // empty: $SURFCL_OUTPUT_ROOT/<experiment> or ./surfcl-out/<experiment>
  DumpPolicy dump = DumpPolicy::final;
  double weno_eps = 1e-6;
  SweepMethod sweep = SweepMethod::ordered;
  int sweep_max_iterations = 50;
  double sweep_tol = 1e-3;
  double sweep_dtau = 0.5;
  int sweep_order = 2;

  // Applies one key=value setting (keys as in the long flags, dashes or
  // underscores). Throws on unknown keys or malformed values.
  void set(const std::string& key, const std::string& value);
  // Reads a key=value file; '#' starts a comment.
  static std::map<std::string, std::string> read_file(const std::string& path);

  void validate() const;
  SchemeConfig scheme(const ProblemSpec& problem) const;
  std::vector<int> resolutions(const ProblemSpec& problem) const;
  double final_time(const ProblemSpec& problem) const;
  std::vector<double> output_times(double t_final) const;
  std::string output_dir() const;
  // JSON echo; feeding every key back through set() reproduces the run.
  std::string to_json() const;
};

struct RunReport {
  std::string json;           // deterministic report (also written to report.json)
  std::vector<ErrorRow> errors;
  Rates rates;
  std::string output_dir;
  double wall_seconds = 0.0;  // written separately to timing.json
};

RunReport run_experiment(const RunConfig& config);

// Snapshot text dump of a tube field on the whole grid.
void write_snapshot(const std::string& path, const Simulation& sim, const std::string& experiment);

}  // namespace surfcl
