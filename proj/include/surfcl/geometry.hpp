#pragma once

#include "surfcl/common.hpp"

#include <array>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace surfcl {

// ---------------------------------------------------------------------------
// Shapes
//
// Circle, sphere and torus have closed-form signed distances. Ellipse and star
// only expose a raw level function; their signed distance and closest point
// come from minimizing the squared distance to the parametrized curve.
// All shapes are centred at the origin. Planar shapes live in the z = 0 plane.
// ---------------------------------------------------------------------------

struct Circle {
  double radius = 1.0;
};

struct Sphere {
  double radius = 1.0;
};

struct Torus {
  double major = 1.0;  // distance from the axis to the tube centre
  double minor = 0.5;  // tube radius
};

struct Ellipse {
  double a = 0.75;  // semi-axis along x
  double b = 1.25;  // semi-axis along y
};

// r(theta) = r0 + amplitude * sin^2(lobes * theta)
struct Star {
  double r0 = 1.0;
  double amplitude = 0.5;
  double lobes = 3.0;

  double radius(double theta) const;
  double radius_derivative(double theta) const;
  double radius_second_derivative(double theta) const;
};

// Result of projecting a point onto a parametrized planar curve.
struct CurveProjection {
  double parameter = 0.0;
  Vec3 point = Vec3::Zero();
  double distance = 0.0;
  double residual = 0.0;  // |d/ds distance^2 / 2| at the returned parameter
};

enum class ShapeKind { circle, ellipse, star, sphere, torus };

class Shape {
 public:
  using Variant = std::variant<Circle, Ellipse, Star, Sphere, Torus>;

  Shape(Variant v);  // NOLINT(google-explicit-constructor)

  static Shape circle(double radius = 1.0) { return Shape(Circle{radius}); }
  static Shape ellipse(double a = 0.75, double b = 1.25) { return Shape(Ellipse{a, b}); }
  static Shape star(double r0 = 1.0, double amplitude = 0.5, double lobes = 3.0) {
    return Shape(Star{r0, amplitude, lobes});
  }
  static Shape sphere(double radius = 1.0) { return Shape(Sphere{radius}); }
  static Shape torus(double major = 1.0, double minor = 0.5) { return Shape(Torus{major, minor}); }

  // Parses "circle(1)", "torus(1,0.5)", "star" ... Missing parameters take the
  // catalog defaults above.
  static Shape parse(const std::string& text);

  ShapeKind kind() const;
  const Variant& variant() const { return shape_; }
  int dim() const;
  std::string name() const;
  bool closed_form() const;

  // Raw level function: negative inside, zero on the interface. Equals the
  // signed distance for the closed-form shapes.
  double level(const Vec3& x) const;

  // Signed distance, negative inside; sign(0) = +1.
  double signed_distance(const Vec3& x) const;

  // Nearest point on the interface. Throws if the projection is undefined
  // (e.g. the centre of a circle) or the minimizer fails to converge.
  Vec3 closest_point(const Vec3& x) const;

  // Outward unit normal at a point on the interface.
  Vec3 normal(const Vec3& on_surface) const;

  // Largest absolute principal curvature of the interface.
  double max_curvature() const;

  // Half widths of the axis-aligned bounding box.
  Vec3 extent() const;

 private:
  Variant shape_;
  double kappa_max_ = 0.0;
};

// Multi-start safeguarded Newton on d(s) = |f(s) - x|^2 / 2.
// `starts` seeds the iteration; the global minimum among converged runs wins.
CurveProjection project_onto_ellipse(const Ellipse& e, const Vec3& x);
CurveProjection project_onto_star(const Star& s, const Vec3& x);

inline constexpr double kMinimizerTolerance = 1e-12;
inline constexpr int kMinimizerStarts = 8;

// ---------------------------------------------------------------------------
// Uniform Cartesian grid
// ---------------------------------------------------------------------------

struct GridSpec {
  int dim = 2;
  double dx = 0.05;
  std::array<int, 3> size{1, 1, 1};
  // Integer coordinate of node 0 along each axis; node i sits at (first + i) dx.
  std::array<int, 3> first{0, 0, 0};

  // Spacing of an n-point-per-axis grid on [-1, 1].
  static double spacing_for(int n) { return 2.0 / (n - 1); }

  // Smallest grid with nodes at integer multiples of dx covering
  // [-half_extent, half_extent] on the first `dim` axes.
  static GridSpec covering(int dim, double dx, const Vec3& half_extent);

  // Grid for a shape at resolution n with `margin_cells` cells beyond its extent.
  static GridSpec for_shape(const Shape& shape, int n, double margin_cells);

  NodeIndex count() const { return NodeIndex(size[0]) * size[1] * size[2]; }
  std::array<NodeIndex, 3> strides() const {
    return {1, NodeIndex(size[0]), NodeIndex(size[0]) * size[1]};
  }
  NodeIndex linear(const std::array<int, 3>& idx) const {
    return idx[0] + NodeIndex(size[0]) * (idx[1] + NodeIndex(size[1]) * idx[2]);
  }
  Vec3 origin() const { return Vec3(first[0] * dx, first[1] * dx, first[2] * dx); }
  std::array<int, 3> multi(NodeIndex node) const;
  Vec3 position(const std::array<int, 3>& idx) const;
  Vec3 position(NodeIndex node) const { return position(multi(node)); }

  // Smallest distance from the origin to a face of the box.
  double half_width() const;
};

// ---------------------------------------------------------------------------
// Sampled signed distance
// ---------------------------------------------------------------------------

class LevelSetField {
 public:
  LevelSetField(Shape shape, GridSpec grid);

  const Shape& shape() const { return shape_; }
  const GridSpec& grid() const { return grid_; }
  int dim() const { return grid_.dim; }

  double phi(NodeIndex node) const { return phi_[static_cast<std::size_t>(node)]; }
  std::span<const double> values() const { return phi_; }

  // Second-order central differences. Throw when the 3-point stencil leaves
  // the sampled box.
  Vec3 gradient(NodeIndex node) const;
  Mat3 hessian(NodeIndex node) const;

  // Exact projection (closed form or minimizer). Throws when |phi(x)| is not
  // below the reach 1 / kappa_max, where the projection may not be unique.
  Vec3 closest_point(const Vec3& x) const;

  // Step-1 projection x - phi(x) grad phi(x) from the sampled field.
  Vec3 discrete_projection(NodeIndex node) const;

 private:
  void require_interior(const std::array<int, 3>& idx, const char* what) const;

  Shape shape_;
  GridSpec grid_;
  std::vector<double> phi_;
};

}  // namespace surfcl
