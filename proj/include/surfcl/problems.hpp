#pragma once

#include "surfcl/schemes.hpp"

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace surfcl {

struct SurfaceAdvection {
  SurfaceVelocity velocity;
};

struct SurfaceConservation {
  SurfaceFlux flux;
  // False when the constant-state surface divergence of the flux does not
  // vanish (the torus Burgers flux along both principal directions).
  bool geometry_compatible = true;
};

using SurfaceEquation = std::variant<SurfaceAdvection, SurfaceConservation>;

using SurfaceFunction = std::function<double(const Vec3&)>;
using SurfaceOracle = std::function<double(const Vec3&, double)>;

enum class MeshKind { curve, sphere, torus, equator };

struct ProblemSpec {
  std::string id;
  std::string description;
  Shape shape;
  SurfaceEquation equation;
  SurfaceFunction initial;  // u0 evaluated from the closest point, analytically
  SurfaceOracle oracle;     // exact or reference solution; empty if none
  double final_time = 0.0;
  std::vector<int> default_n;
  int default_order = 3;
  MeshKind error_mesh = MeshKind::curve;
  bool discontinuous = false;
};

// Catalog ids, in listing order.
const std::vector<std::string>& experiment_ids();
ProblemSpec make_problem(const std::string& id);

// One line per experiment: "<id>  <description>".
std::string list_experiments();

// u0(P(x)) at every tube slot.
GridField extend_initial(const ProblemSpec& problem, std::span<const Vec3> closest);

// Solver-side equation with per-slot push-forward applied.
EmbeddedEquation embed_equation(const ProblemSpec& problem, const PushForwardField& pf,
                                std::span<const Vec3> closest);

// --- surface parametrizations ---------------------------------------------

// Polar angle of a planar point in (-pi, pi].
double polar_angle(const Vec3& p);

// Torus angles (theta around the z axis, eta around the tube), each in (-pi, pi].
std::pair<double, double> torus_angles(const Torus& torus, const Vec3& p);

// Arclength of the ellipse (a cos t, b sin t) from t = 0 to t (any real t).
double ellipse_arclength(const Ellipse& e, double t);
double ellipse_perimeter(const Ellipse& e);

// Arclength along the star curve by polar angle, with its inverse.
class StarArclength {
 public:
  explicit StarArclength(const Star& star, int table_size = 2048);
  double perimeter() const { return perimeter_; }
  // Arclength from angle 0 to theta (any real theta, counted with turns).
  double length(double theta) const;
  // Polar angle in [0, 2 pi) at arclength s (any real s, wrapped).
  double angle(double s) const;

 private:
  Star star_;
  double perimeter_ = 0.0;
  std::vector<double> table_;  // cumulative length at 2 pi k / table_size
};

// --- oracles ----------------------------------------------------------------

inline constexpr double kBurgersTolerance = 1e-12;

// Solution of u = u0(theta - u t) before characteristics cross. Newton from
// u0(theta), safeguarded by bisection on [lo, hi] (the range of u0).
double burgers_oracle_circle(const std::function<double(double)>& u0, const std::function<double(double)>& du0,
                             double theta, double t, double lo, double hi);

// Periodic Burgers solution for the box u0 = 1 on |theta| <= pi/4, valid for
// t < 4 pi (before the shock wraps onto the rarefaction tail).
double burgers_box_oracle(double theta, double t);

// Star piecewise-constant initial profile by polar angle (any real angle).
double star_bands(double theta);

// Smooth torus profile f(eta) built from g(x) = tanh(1 / (2 x (x - 1))).
double torus_profile(double eta);

// Real orthonormal spherical harmonics used by the u3 initial condition.
double sphere_harmonics_u3(const Vec3& p);

// --- 1D periodic reference --------------------------------------------------

// Finite differences on N points of [0, 2 pi) with the same scheme families
// as the embedded solver: upwind/HJ-WENO3 for advection at unit speed and
// LxF/WENO3 for Burgers.
class PeriodicReference1D {
 public:
  enum class Equation { advection, burgers };

  PeriodicReference1D(Equation eq, int n, int order, const std::function<double(double)>& u0, double cfl = 0.5,
                      double weno_eps = 1e-6);

  void advance_to(double t);
  double time() const { return t_; }
  int size() const { return int(u_.size()); }
  double spacing() const { return h_; }
  const std::vector<double>& values() const { return u_; }
  // Periodic cubic Lagrange interpolation at any real theta.
  double sample(double theta) const;

 private:
  void rhs(const std::vector<double>& u, std::vector<double>& out) const;
  void step(double dt);

  Equation eq_;
  int order_;
  double cfl_, eps_, h_, t_ = 0.0;
  std::vector<double> u_, a_, b_, r_;
  mutable std::vector<double> pad_, padm_, fp_, fm_, flux_;  // rhs scratch
};

}  // namespace surfcl
