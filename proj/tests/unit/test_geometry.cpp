#include "helpers.hpp"

#include "surfcl/tube.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <random>

using namespace surfcl;
using surfcl::test::kPi;
using surfcl::test::node_at;

TEST_CASE("signed distance of the catalog shapes at known points") {
  CHECK(Shape::circle(1.0).signed_distance(Vec3(2, 0, 0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(Shape::circle(1.0).signed_distance(Vec3(0, 0.25, 0)) == doctest::Approx(-0.75));
  CHECK(std::abs(Shape::torus(1.0, 0.5).signed_distance(Vec3(1, 0, 0.5))) < 1e-15);
  CHECK(Shape::torus(1.0, 0.5).signed_distance(Vec3(1, 0, 0)) == doctest::Approx(-0.5));
  CHECK(Shape::sphere(1.0).signed_distance(Vec3(0, 0, 2)) == doctest::Approx(1.0));
  CHECK(Shape::ellipse(0.75, 1.25).signed_distance(Vec3(1.5, 0, 0)) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(Shape::ellipse(0.75, 1.25).signed_distance(Vec3(0, 1.0, 0)) == doctest::Approx(-0.25).epsilon(1e-12));
  // r(0) = 1 on the star, so points on the x axis are radial.
  CHECK(Shape::star().signed_distance(Vec3(0.5, 0, 0)) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("sign of zero is positive") {
  CHECK(Shape::circle(1.0).signed_distance(Vec3(1, 0, 0)) == 0.0);
  CHECK(std::signbit(Shape::circle(1.0).signed_distance(Vec3(1, 0, 0))) == false);
}

TEST_CASE("closest point examples") {
  const Shape c = Shape::circle(1.0);
  CHECK((c.closest_point(Vec3(2, 0, 0)) - Vec3(1, 0, 0)).norm() < 1e-15);
  CHECK((c.closest_point(Vec3(0, 0.5, 0)) - Vec3(0, 1, 0)).norm() < 1e-15);
  const Vec3 on(std::cos(0.3), std::sin(0.3), 0.0);
  CHECK((c.closest_point(on) - on).norm() < 1e-15);
  CHECK_THROWS_AS(c.closest_point(Vec3::Zero()), Error);
}

TEST_CASE("ellipse and star projections match a brute-force search") {
  const Ellipse e{0.75, 1.25};
  const Star st{1.0, 0.5, 3.0};
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ang(-kPi, kPi), off(-0.12, 0.12);
  for (int i = 0; i < 40; ++i) {
    const double t = ang(rng);
    {
      const Vec3 p = test::ellipse_point(e, t);
      const Vec3 x = p + off(rng) * Vec3(p.x() / (e.a * e.a), p.y() / (e.b * e.b), 0).normalized();
      const CurveProjection pr = project_onto_ellipse(e, x);
      const double oracle = test::curve_distance([&](double s) { return test::ellipse_point(e, s); }, x);
      CHECK(pr.distance == doctest::Approx(oracle).epsilon(1e-9));
      CHECK(pr.residual < 1e-10);
    }
    {
      const Vec3 x = test::star_point(st, t) * (1.0 + 0.5 * off(rng));
      const CurveProjection pr = project_onto_star(st, x);
      const double oracle = test::curve_distance([&](double s) { return test::star_point(st, s); }, x);
      CHECK(pr.distance == doctest::Approx(oracle).epsilon(1e-9));
      CHECK(std::abs(Shape::star().signed_distance(x)) == doctest::Approx(oracle).epsilon(1e-9));
    }
  }
}

TEST_CASE("closest point is idempotent") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const Shape& s : {Shape::circle(), Shape::sphere(), Shape::torus()}) {
    for (int i = 0; i < 50; ++i) {
      Vec3 x(u(rng), u(rng), s.dim() == 3 ? u(rng) : 0.0);
      x *= 1.4;
      if (std::abs(s.signed_distance(x)) * s.max_curvature() > 0.9) continue;
      const Vec3 p = s.closest_point(x);
      CHECK((s.closest_point(p) - p).norm() <= 1e-10);
      CHECK(std::abs(s.signed_distance(p)) < 1e-12);
    }
  }
  for (const Shape& s : {Shape::ellipse(), Shape::star()}) {
    for (int i = 0; i < 30; ++i) {
      const double th = kPi * u(rng);
      const Vec3 x = (s.kind() == ShapeKind::star ? test::star_point(Star{}, th) : test::ellipse_point(Ellipse{}, th)) *
                     (1.0 + 0.05 * u(rng));
      const Vec3 p = s.closest_point(x);
      CHECK((s.closest_point(p) - p).norm() <= 1e-9);
    }
  }
}

TEST_CASE("maximal curvature of the catalog shapes") {
  CHECK(Shape::circle(2.0).max_curvature() == doctest::Approx(0.5));
  CHECK(Shape::sphere(1.0).max_curvature() == doctest::Approx(1.0));
  CHECK(Shape::torus(1.0, 0.5).max_curvature() == doctest::Approx(2.0));
  CHECK(Shape::ellipse(0.75, 1.25).max_curvature() == doctest::Approx(1.25 / (0.75 * 0.75)).epsilon(1e-9));
  // At theta = 0: r = 1, r' = 0, r'' = 2 A b^2 = 9, so |kappa| = |1 - 9| = 8.
  CHECK(Shape::star().max_curvature() == doctest::Approx(8.0).epsilon(1e-4));
}

TEST_CASE("shape parsing") {
  CHECK(Shape::parse("circle(1)").kind() == ShapeKind::circle);
  CHECK(Shape::parse("torus(1,0.5)").kind() == ShapeKind::torus);
  CHECK(Shape::parse("star").kind() == ShapeKind::star);
  CHECK(Shape::parse("sphere").dim() == 3);
  CHECK(Shape::parse("circle(2)").signed_distance(Vec3(3, 0, 0)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(Shape::parse("cube(1)"), Error);
  CHECK_THROWS_AS(Shape::parse("circle(-1)"), Error);
}

TEST_CASE("grid covering places nodes on integer multiples of dx") {
  const GridSpec g = GridSpec::covering(2, 0.05, Vec3(1, 1, 0));
  CHECK(g.size[0] == 41);
  CHECK(g.first[0] == -20);
  CHECK(g.size[2] == 1);
  CHECK(g.position(NodeIndex(0)).x() == doctest::Approx(-1.0));
  const NodeIndex mid = node_at(g, 0, 0);
  CHECK(g.position(mid).norm() == 0.0);
  CHECK(g.multi(mid)[0] == 20);
  CHECK(GridSpec::spacing_for(81) == doctest::Approx(0.025));
}

TEST_CASE("circle hessian at (2, 0) converges at second order to the closed form") {
  // H = (1/r^3) [[y^2, -xy], [-xy, x^2]] gives [[0, 0], [0, 0.5]] at (2, 0).
  double err[2];
  int k = 0;
  for (double dx : {0.05, 0.025}) {
    const GridSpec g = GridSpec::covering(2, dx, Vec3(2.5, 2.5, 0));
    const LevelSetField f(Shape::circle(1.0), g);
    const Mat3 h = f.hessian(node_at(g, int(std::lround(2.0 / dx)), 0));
    Mat3 exact = Mat3::Zero();
    exact(1, 1) = 0.5;
    err[k++] = (h - exact).cwiseAbs().maxCoeff();
    CHECK(h(0, 1) == h(1, 0));
    CHECK(err[k - 1] <= dx * dx);
  }
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("sphere hessian at (0, 0, 2) has eigenvalues 1/2, 1/2, 0") {
  const double dx = 0.05;
  const GridSpec g = GridSpec::covering(3, dx, Vec3(2.2, 2.2, 2.2));
  const LevelSetField f(Shape::sphere(1.0), g);
  const Mat3 h = f.hessian(node_at(g, 0, 0, 40));
  Eigen::SelfAdjointEigenSolver<Mat3> es(h);
  const auto ev = es.eigenvalues();
  CHECK(std::abs(ev[0]) <= dx * dx);
  CHECK(std::abs(ev[1] - 0.5) <= dx * dx);
  CHECK(std::abs(ev[2] - 0.5) <= dx * dx);
}

TEST_CASE("hessian stencil must stay inside the sampled box") {
  const GridSpec g = GridSpec::covering(2, 0.1, Vec3(1.5, 1.5, 0));
  const LevelSetField f(Shape::circle(1.0), g);
  CHECK_THROWS_AS(f.hessian(NodeIndex(0)), Error);
  CHECK_THROWS_AS(f.gradient(NodeIndex(0)), Error);
}

TEST_CASE("discrete gradient has unit length and H grad phi is small on the tube") {
  // At dx = 0.05 the torus outer band comes within 2 dx of the tube's centre
  // circle, where the difference error grows like dx^2 / rho^2.
  for (const Shape& s : {Shape::circle(), Shape::sphere(), Shape::torus()}) {
    const double dx = 0.025;
    const GridSpec g = GridSpec::for_shape(s, int(std::lround(2.0 / dx)) + 1, 11.0);
    const LevelSetField f(s, g);
    const TubeGrid tube = TubeGrid::build(f, TubeRadii::from_cells(dx));
    double worst_norm = 0.0, worst_hg = 0.0;
    for (Slot k = 0; k < tube.size(); ++k) {
      const NodeIndex node = tube.node(k);
      const Vec3 grad = f.gradient(node);
      worst_norm = std::max(worst_norm, std::abs(grad.norm() - 1.0));
      if (tube.is_inner(k)) worst_hg = std::max(worst_hg, (f.hessian(node) * grad).norm());
    }
    CAPTURE(s.name());
    CHECK(worst_norm <= 5.0 * dx * dx);
    CHECK(worst_hg <= 2.0 * dx);
  }
}

TEST_CASE("projection beyond the reach is rejected") {
  const GridSpec g = GridSpec::covering(2, 0.05, Vec3(1.6, 1.6, 0));
  const LevelSetField f(Shape::circle(1.0), g);
  CHECK_THROWS_AS(f.closest_point(Vec3(0.0, 0.0, 0.0)), Error);
  CHECK((f.closest_point(Vec3(0.0, 0.5, 0.0)) - Vec3(0, 1, 0)).norm() < 1e-15);
  // x - phi grad phi from the sampled field agrees to second order.
  const NodeIndex n = node_at(g, 24, 2);
  CHECK((f.discrete_projection(n) - f.closest_point(g.position(n))).norm() < 0.05 * 0.05);
}
