#pragma once

#include "surfcl/pushforward.hpp"
#include "surfcl/tvdrk3.hpp"

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace surfcl {

enum class ExtensionMode { neumann_sweep, exact_outer };
// ordered: Gauss-Seidel on the steady upwind equations, outer points visited
//          by increasing |phi|.
// pseudo_time: Jacobi pseudo-time marching with step sweep_dtau * dx.
enum class SweepMethod { ordered, pseudo_time };

ExtensionMode parse_extension_mode(const std::string& text);
std::string to_string(ExtensionMode mode);
SweepMethod parse_sweep_method(const std::string& text);
std::string to_string(SweepMethod method);

struct SchemeConfig {
  int order = 3;
  double cfl = 0.5;
  double weno_eps = 1e-6;
  ExtensionMode extension = ExtensionMode::neumann_sweep;
  SweepMethod sweep = SweepMethod::ordered;
  double sweep_dtau = 0.5;        // pseudo-time step in units of dx
  int sweep_max_iterations = 50;
  double sweep_tol = 1e-3;        // residual tolerance in units of dx
  int sweep_order = 2;            // one-sided upwind differences of order 1 or 2

  void validate() const;
};

struct GridField {
  std::vector<double> values;  // indexed by tube slot
  double time = 0.0;
};

// Solver-side equations: per-slot embedded vectors, already multiplied by
// the push-forward matrix.
struct EmbeddedAdvection {
  std::vector<Vec3> velocity;  // M V(P)
};

struct EmbeddedConservation {
  std::function<double(double)> magnitude;             // q(u)
  std::function<double(double)> magnitude_derivative;  // q'(u)
  std::vector<Vec3> direction;                         // M D(P); flux = q(u) M D(P)
};

using EmbeddedEquation = std::variant<EmbeddedAdvection, EmbeddedConservation>;

// Value imposed on an outer slot at time t in exact_outer mode.
using OuterOracle = std::function<double(Slot, double)>;

struct SweepStats {
  int iterations = 0;
  double residual = 0.0;
  bool converged = true;
};

struct RunStats {
  long steps = 0;
  double dt_min = 0.0;
  double dt_max = 0.0;
  double dt_mean = 0.0;
  long sweeps = 0;
  int sweep_iterations_max = 0;
  long sweep_stalls = 0;
  std::vector<std::string> warnings;
};

using OutputHook = std::function<void(const GridField&)>;

class EmbeddedSolver {
 public:
  EmbeddedSolver(const LevelSetField& field, const TubeGrid& tube, EmbeddedEquation equation, SchemeConfig config,
                 OuterOracle oracle = {});

  const SchemeConfig& config() const { return config_; }
  const TubeGrid& tube() const { return tube_; }
  const EmbeddedEquation& equation() const { return equation_; }

  // Largest per-point sum over axes of |characteristic speed| on inner slots.
  double max_speed_sum(std::span<const double> u) const;
  // Delta t with dt * max_speed_sum / dx = cfl, capped at dx.
  double cfl_dt(const GridField& u) const;

  // First-order updates; the result is extended into the outer layer.
  void lxf_euler_step(GridField& u, double dt);
  void upwind_euler_step(GridField& u, double dt);

  // Spatial operators on inner slots; entries for outer slots are set to 0.
  void weno3_rhs(std::span<const double> u, std::span<double> rhs) const;
  void advection_rhs(std::span<const double> u, std::span<double> rhs, int order) const;
  void rhs(std::span<const double> u, std::span<double> rhs) const;

  // Three convex-combination stages with the extension after each stage.
  void tvdrk3_step(GridField& u, double dt);

  // One step of the configured order.
  void step(GridField& u, double dt);

  // Refreshes outer-layer values at time t (sweep or oracle).
  SweepStats extension_sweep(std::vector<double>& u, double t);
  // Number of upwind dependency cycles (iterated locally by the ordered sweep).
  std::size_t sweep_cycle_count() const { return cycles_.size(); }

  // Advances to t_final, calling `hook` whenever an output time is reached
  // (including t = u.time if listed). The time left before each output
  // time and t_final is split into equal CFL-admissible steps that land on
  // it exactly.
  RunStats run(GridField& u, double t_final, std::span<const double> output_times = {},
               const OutputHook& hook = {});

 private:
  void apply_extension(std::vector<double>& u, double t);
  void check_finite(const GridField& u) const;

  const LevelSetField& field_;
  const TubeGrid& tube_;
  EmbeddedEquation equation_;
  SchemeConfig config_;
  OuterOracle oracle_;

  // Sweep plan: outer slots in dependency order with upwind neighbours.
  struct SweepEntry {
    Slot slot;
    Slot upwind[3];
    Slot upwind2[3];  // two cells upwind; kNoSlot falls back to first order
    double weight[3];
  };
  std::vector<SweepEntry> plan_;
  std::vector<std::pair<std::size_t, std::size_t>> cycles_;  // plan ranges of dependency cycles

  std::vector<double> scratch_a_, scratch_b_, rhs_;
  Tvdrk3Workspace rk_;
  RunStats* stats_ = nullptr;
};

}  // namespace surfcl
