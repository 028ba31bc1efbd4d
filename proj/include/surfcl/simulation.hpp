#pragma once

#include "surfcl/analysis.hpp"

#include <memory>

namespace surfcl {

// Steps 1-5 for one problem at one resolution: sampled level set, tube,
// closest points, push-forward, embedded equation, extended initial field.
class Simulation {
 public:
  // Cells of grid beyond the shape extent: outer layer plus a stencil margin.
  static constexpr double kMarginCells = 11.0;

  Simulation(const ProblemSpec& problem, int n, const SchemeConfig& scheme,
             EmbeddingMode mode = EmbeddingMode::pushforward);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  const ProblemSpec& problem() const { return problem_; }
  int n() const { return n_; }
  double dx() const { return field_->grid().dx; }
  const LevelSetField& field() const { return *field_; }
  const TubeGrid& tube() const { return *tube_; }
  const std::vector<Vec3>& closest() const { return closest_; }
  EmbeddedSolver& solver() { return *solver_; }
  GridField& state() { return state_; }
  const GridField& state() const { return state_; }

  RunStats advance(double t_final, std::span<const double> output_times = {}, const OutputHook& hook = {});

  std::vector<double> surface_values(const SurfaceMesh& mesh) const;
  // Oracle at the current time on the mesh; throws if the problem has none.
  std::vector<double> oracle_values(const SurfaceMesh& mesh) const;
  ErrorNorms errors(const SurfaceMesh& mesh) const;
  double mass(const SurfaceMesh& mesh) const;

 private:
  ProblemSpec problem_;
  int n_;
  std::unique_ptr<LevelSetField> field_;
  std::unique_ptr<TubeGrid> tube_;
  std::vector<Vec3> closest_;
  std::unique_ptr<EmbeddedSolver> solver_;
  GridField state_;
};

}  // namespace surfcl
