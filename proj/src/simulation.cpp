#include "surfcl/simulation.hpp"

namespace surfcl {

Simulation::Simulation(const ProblemSpec& problem, int n, const SchemeConfig& scheme, EmbeddingMode mode)
    : problem_(problem), n_(n) {
  const GridSpec grid = GridSpec::for_shape(problem_.shape, n, kMarginCells);
  field_ = std::make_unique<LevelSetField>(problem_.shape, grid);
  tube_ = std::make_unique<TubeGrid>(TubeGrid::build(*field_, TubeRadii::from_cells(grid.dx)));
  closest_ = closest_points(*field_, *tube_);
  EmbeddedEquation eq;
  {
    const PushForwardField pf = PushForwardField::build(*field_, *tube_, mode);
    eq = embed_equation(problem_, pf, closest_);
  }
  OuterOracle oracle;
  if (problem_.oracle) oracle = [this](Slot s, double t) { return problem_.oracle(closest_[std::size_t(s)], t); };
  solver_ = std::make_unique<EmbeddedSolver>(*field_, *tube_, std::move(eq), scheme, std::move(oracle));
  state_ = extend_initial(problem_, closest_);
  if (scheme.extension == ExtensionMode::exact_outer) solver_->extension_sweep(state_.values, 0.0);
}

RunStats Simulation::advance(double t_final, std::span<const double> output_times, const OutputHook& hook) {
  return solver_->run(state_, t_final, output_times, hook);
}

std::vector<double> Simulation::surface_values(const SurfaceMesh& mesh) const {
  return interpolate_to_surface(*tube_, state_.values, mesh);
}

std::vector<double> Simulation::oracle_values(const SurfaceMesh& mesh) const {
  if (!problem_.oracle) throw Error("analysis", "experiment " + problem_.id + " has no exact solution");
  std::vector<double> v(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) v[i] = problem_.oracle(mesh.points[i], state_.time);
  return v;
}

ErrorNorms Simulation::errors(const SurfaceMesh& mesh) const {
  return error_norms(surface_values(mesh), oracle_values(mesh), mesh.weights);
}

double Simulation::mass(const SurfaceMesh& mesh) const { return total_mass(*tube_, state_.values, mesh); }

}  // namespace surfcl
