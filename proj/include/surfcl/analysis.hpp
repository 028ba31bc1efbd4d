#pragma once

#include "surfcl/problems.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace surfcl {

// Sample points on the interface with quadrature weights (local metric times
// the uniform parameter step). params holds the one or two parameters of each
// sample: theta for curves, (theta, polar) for the sphere, (theta, eta) for
// the torus.
struct SurfaceMesh {
  MeshKind kind = MeshKind::curve;
  std::vector<Vec3> points;
  std::vector<double> weights;
  std::vector<std::array<double, 2>> params;

  std::size_t size() const { return points.size(); }
  double measure() const;

  static constexpr int kCurveSamples = 4096;
  static constexpr int kSurfaceSamplesTheta = 512;
  static constexpr int kSurfaceSamplesSecond = 256;

  // Uniform in the curve parameter (polar angle for circle/star, ellipse angle).
  static SurfaceMesh curve(const Shape& shape, int samples = kCurveSamples);
  // Midpoint rule in the polar angle with band-exact weights (sum = 4 pi r^2).
  static SurfaceMesh sphere(const Sphere& s, int n_theta = kSurfaceSamplesTheta, int n_polar = kSurfaceSamplesSecond);
  // Periodic trapezoid in (theta, eta) (sum = 4 pi^2 R r).
  static SurfaceMesh torus(const Torus& t, int n_theta = kSurfaceSamplesTheta, int n_eta = kSurfaceSamplesSecond);
  // z = 0 great circle of a sphere.
  static SurfaceMesh equator(const Sphere& s, int samples = kCurveSamples);

  static SurfaceMesh for_problem(const ProblemSpec& problem, MeshKind kind);
  static SurfaceMesh for_problem(const ProblemSpec& problem) { return for_problem(problem, problem.error_mesh); }
};

// Tensor-product cubic Lagrange interpolation of a tube field at one point.
// Throws if any of the 4^d stencil nodes is not an inner or outer point.
double interpolate(const TubeGrid& tube, std::span<const double> values, const Vec3& x);

std::vector<double> interpolate_to_surface(const TubeGrid& tube, std::span<const double> values,
                                           const SurfaceMesh& mesh);

struct ErrorNorms {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

// L1 = sum w|e|, L2 = sqrt(sum w e^2), Linf = max |e|.
ErrorNorms error_norms(std::span<const double> samples, std::span<const double> exact,
                       std::span<const double> weights);

struct ErrorRow {
  double dx = 0.0;
  int n = 0;
  ErrorNorms norms;
};

struct Rates {
  std::optional<double> l1, l2, linf;
  std::vector<std::string> notes;
};

// Least-squares slope of log(error) against log(dx). Rows with non-positive
// errors are excluded with a note; fewer than two usable rows leave the rate
// absent.
std::optional<double> convergence_rate(std::span<const double> dx, std::span<const double> errors,
                                       std::vector<std::string>* notes = nullptr);
Rates convergence_rates(std::span<const ErrorRow> rows);

double total_mass(const TubeGrid& tube, std::span<const double> values, const SurfaceMesh& mesh);

// max over samples s and offsets |h| <= max_offset (uniformly spaced, both
// signs) of |u(s + h n(s)) - u(s)|, with n the exact unit normal.
double normal_variation(const TubeGrid& tube, std::span<const double> values, const Shape& shape,
                        const SurfaceMesh& mesh, double max_offset, int offsets = 6);

}  // namespace surfcl
