#include "helpers.hpp"

#include "surfcl/simulation.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace surfcl;
using surfcl::test::kPi;

namespace {

struct CircleTube {
  explicit CircleTube(int n)
      : field(Shape::circle(), GridSpec::for_shape(Shape::circle(), n, 11.0)),
        tube(TubeGrid::build(field, TubeRadii::from_cells(field.grid().dx))),
        closest(closest_points(field, tube)) {}
  double dx() const { return field.grid().dx; }
  Vec3 x(Slot s) const { return field.grid().position(tube.node(s)); }
  std::vector<double> sample(const std::function<double(const Vec3&)>& f) const {
    std::vector<double> v(std::size_t(tube.size()));
    for (Slot s = 0; s < tube.size(); ++s) v[std::size_t(s)] = f(x(s));
    return v;
  }
  LevelSetField field;
  TubeGrid tube;
  std::vector<Vec3> closest;
};

EmbeddedAdvection uniform_velocity(const TubeGrid& t, const Vec3& v) {
  return EmbeddedAdvection{std::vector<Vec3>(std::size_t(t.size()), v)};
}

EmbeddedConservation uniform_flux(const TubeGrid& t, std::function<double(double)> q, std::function<double(double)> dq,
                                  const Vec3& d) {
  return EmbeddedConservation{std::move(q), std::move(dq), std::vector<Vec3>(std::size_t(t.size()), d)};
}

double sq(double u) { return 0.5 * u * u; }
double ident(double u) { return u; }
double one(double) { return 1.0; }

SchemeConfig order(int k) {
  SchemeConfig c;
  c.order = k;
  return c;
}

}  // namespace

TEST_CASE("scheme configuration validation") {
  SchemeConfig c;
  CHECK_NOTHROW(c.validate());
  c.cfl = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c.cfl = 1.5;
  CHECK_THROWS_AS(c.validate(), Error);
  c = SchemeConfig{};
  c.order = 2;
  CHECK_THROWS_AS(c.validate(), Error);
  c = SchemeConfig{};
  c.sweep_order = 3;
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK(parse_extension_mode("neumann") == ExtensionMode::neumann_sweep);
  CHECK(parse_extension_mode("exact") == ExtensionMode::exact_outer);
  CHECK_THROWS_AS(parse_extension_mode("dirichlet"), Error);
}

TEST_CASE("CFL time step") {
  const CircleTube c(41);  // dx = 0.05
  GridField u{std::vector<double>(std::size_t(c.tube.size()), 0.0), 0.0};
  SUBCASE("axis-aligned unit advection") {
    EmbeddedSolver s(c.field, c.tube, uniform_velocity(c.tube, Vec3(1, 0, 0)), order(3));
    CHECK(s.cfl_dt(u) == doctest::Approx(0.025).epsilon(1e-14));
  }
  SUBCASE("two unit speeds") {
    EmbeddedSolver s(c.field, c.tube, uniform_velocity(c.tube, Vec3(1, 1, 0)), order(3));
    CHECK(s.cfl_dt(u) == doctest::Approx(0.0125).epsilon(1e-14));
  }
  SUBCASE("Burgers at rest is capped at dx") {
    EmbeddedSolver s(c.field, c.tube, uniform_flux(c.tube, sq, ident, Vec3(1, 0, 0)), order(3));
    CHECK(s.cfl_dt(u) == doctest::Approx(0.05).epsilon(1e-14));
    std::fill(u.values.begin(), u.values.end(), 2.0);
    CHECK(s.cfl_dt(u) == doctest::Approx(0.0125).epsilon(1e-14));
  }
}

TEST_CASE("spatial operators vanish on trivial data") {
  const CircleTube c(41);
  std::vector<double> rhs(std::size_t(c.tube.size()));
  SUBCASE("constant state, constant flux direction") {
    EmbeddedSolver s(c.field, c.tube, uniform_flux(c.tube, sq, ident, Vec3(0.3, -0.8, 0)), order(3));
    const std::vector<double> u(std::size_t(c.tube.size()), 0.7);
    s.weno3_rhs(u, rhs);
    for (double r : rhs) CHECK(std::abs(r) <= 1e-12);
  }
  SUBCASE("zero velocity") {
    EmbeddedSolver s(c.field, c.tube, uniform_velocity(c.tube, Vec3::Zero()), order(3));
    const std::vector<double> u = c.sample([](const Vec3& x) { return std::sin(5 * x.x()) + x.y(); });
    for (int k : {1, 3}) {
      s.advection_rhs(u, rhs, k);
      for (double r : rhs) CHECK(r == 0.0);
    }
  }
}

TEST_CASE("upwind and HJ-WENO3 are exact on linear data") {
  const CircleTube c(41);
  std::vector<double> rhs(std::size_t(c.tube.size()));
  const std::vector<double> u = c.sample([](const Vec3& x) { return 0.3 + 2.0 * x.x() - 0.5 * x.y(); });
  for (const Vec3& v : {Vec3(1, 0, 0), Vec3(-0.4, 0.9, 0)}) {
    EmbeddedSolver s(c.field, c.tube, uniform_velocity(c.tube, v), order(3));
    for (int k : {1, 3}) {
      s.advection_rhs(u, rhs, k);
      const double exact = -(2.0 * v.x() - 0.5 * v.y());
      for (Slot q = 0; q < c.tube.inner_count(); ++q) CHECK(rhs[std::size_t(q)] == doctest::Approx(exact).epsilon(1e-11));
    }
  }
}

TEST_CASE("WENO3 divergence of a smooth flux converges to the analytic derivative") {
  // f = u (1, 0) with u = sin(2x): L = -2 cos(2x).
  double l1[2], linf[2];
  int k = 0;
  for (int n : {81, 161}) {
    const CircleTube c(n);
    EmbeddedSolver s(c.field, c.tube, uniform_flux(c.tube, ident, one, Vec3(1, 0, 0)), order(3));
    const std::vector<double> u = c.sample([](const Vec3& x) { return std::sin(2 * x.x()); });
    std::vector<double> rhs(u.size());
    s.weno3_rhs(u, rhs);
    double a = 0.0, m = 0.0;
    for (Slot q = 0; q < c.tube.inner_count(); ++q) {
      const double e = std::abs(rhs[std::size_t(q)] + 2.0 * std::cos(2.0 * c.x(q).x()));
      a += e;
      m = std::max(m, e);
    }
    l1[k] = a / c.tube.inner_count();
    linf[k++] = m;
  }
  CHECK(std::log2(l1[0] / l1[1]) > 2.5);
  CHECK(std::log2(linf[0] / linf[1]) > 1.9);
}

TEST_CASE("TVDRK3 stages reproduce the third-order Taylor polynomial") {
  // u' = lambda u: one step multiplies by 1 + z + z^2/2 + z^3/6.
  const double lambda = -1.3;
  double err[2];
  int k = 0;
  for (double dt : {0.1, 0.05}) {
    std::vector<double> u{1.0, 5.0};  // second entry is passive
    Tvdrk3Workspace ws;
    tvdrk3_update(
        u, 1, 0.0, dt, [&](const std::vector<double>& v, std::vector<double>& r) { r[0] = lambda * v[0]; },
        [](std::vector<double>&, double) {}, ws);
    const double z = lambda * dt;
    CHECK(u[0] == doctest::Approx(1 + z + z * z / 2 + z * z * z / 6).epsilon(1e-15));
    CHECK(u[1] == 5.0);
    err[k++] = std::abs(u[0] - std::exp(z));
  }
  CHECK(err[0] / err[1] == doctest::Approx(16.0).epsilon(0.1));
}

TEST_CASE("a step with zero operator leaves inner values unchanged") {
  const CircleTube c(41);
  EmbeddedSolver s(c.field, c.tube, uniform_velocity(c.tube, Vec3::Zero()), order(3));
  GridField u{c.sample([](const Vec3& x) { return std::atan2(x.y(), x.x()) > 0 ? 1.0 : 0.0; }), 0.0};
  const std::vector<double> before = u.values;
  s.tvdrk3_step(u, 0.01);
  for (Slot q = 0; q < c.tube.inner_count(); ++q) CHECK(u.values[std::size_t(q)] == before[std::size_t(q)]);
  CHECK(u.time == doctest::Approx(0.01));
}

TEST_CASE("LxF inner mass changes only through tube-boundary fluxes") {
  const CircleTube c(81);
  const ProblemSpec p = make_problem("B1");
  const PushForwardField pf = PushForwardField::build(c.field, c.tube, EmbeddingMode::pushforward);
  EmbeddedEquation eq = embed_equation(p, pf, c.closest);
  const auto dirs = std::get<EmbeddedConservation>(eq).direction;
  EmbeddedSolver s(c.field, c.tube, eq, order(1));
  GridField u = extend_initial(p, c.closest);
  const double dt = s.cfl_dt(u), dx = c.dx();
  // Independent flux sum over interfaces between an inner and an outer slot.
  double boundary = 0.0;
  for (Slot q = 0; q < c.tube.inner_count(); ++q) {
    for (int a = 0; a < 2; ++a) {
      for (int side : {-1, 1}) {
        const Slot nb = c.tube.inner_neighbor(q, a, side);
        if (c.tube.is_inner(nb)) continue;
        const Slot l = side < 0 ? nb : q, r = side < 0 ? q : nb;
        const double ul = u.values[std::size_t(l)], ur = u.values[std::size_t(r)];
        const double f = 0.5 * (sq(ul) * dirs[std::size_t(l)][a] + sq(ur) * dirs[std::size_t(r)][a] -
                                dx / (2.0 * dt) * (ur - ul));
        boundary += side > 0 ? f : -f;
      }
    }
  }
  double before = 0.0, after = 0.0;
  for (Slot q = 0; q < c.tube.inner_count(); ++q) before += u.values[std::size_t(q)];
  s.lxf_euler_step(u, dt);
  for (Slot q = 0; q < c.tube.inner_count(); ++q) after += u.values[std::size_t(q)];
  CHECK(after - before == doctest::Approx(-dt / dx * boundary).epsilon(1e-9));
  CHECK(std::abs(after - before) > 0.0);
}

TEST_CASE("first-order Burgers on the circle creates no new extrema") {
  const CircleTube c(81);
  const ProblemSpec p = make_problem("B1");
  const PushForwardField pf = PushForwardField::build(c.field, c.tube, EmbeddingMode::pushforward);
  EmbeddedSolver s(c.field, c.tube, embed_equation(p, pf, c.closest), order(1));
  GridField u = extend_initial(p, c.closest);
  const auto range = [&](const GridField& f) {
    const auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.begin() + c.tube.inner_count());
    return std::pair{*lo, *hi};
  };
  const auto [lo0, hi0] = range(u);
  s.run(u, 1.5);
  const auto [lo1, hi1] = range(u);
  CHECK(lo1 >= lo0 - 1e-12);
  CHECK(hi1 <= hi0 + 1e-12);
}

TEST_CASE("WENO3 on a step profile stays within the initial range") {
  ProblemSpec p = make_problem("A1");
  p.initial = [](const Vec3& x) { return std::abs(std::atan2(x.y(), x.x())) <= kPi / 4 ? 1.0 : 0.0; };
  p.oracle = nullptr;
  Simulation sim(p, 81, SchemeConfig{});
  sim.advance(0.5);
  const auto [lo, hi] = std::minmax_element(sim.state().values.begin(), sim.state().values.end());
  // Not a strict maximum principle: WENO3 allows small overshoots at jumps.
  CHECK(*lo >= -1e-2);
  CHECK(*hi <= 1.0 + 1e-2);
}

TEST_CASE("one LxF step matches the periodic 1D LxF step") {
  double err[2];
  int k = 0;
  for (int n : {81, 161}) {
    const CircleTube c(n);
    const ProblemSpec p = make_problem("B1");
    const PushForwardField pf = PushForwardField::build(c.field, c.tube, EmbeddingMode::pushforward);
    EmbeddedSolver s(c.field, c.tube, embed_equation(p, pf, c.closest), order(1));
    GridField u = extend_initial(p, c.closest);
    const double dt = s.cfl_dt(u);
    s.lxf_euler_step(u, dt);
    const auto u0 = [](double th) { return std::sin(th) + 0.5; };
    const int m = int(std::lround(2 * kPi / c.dx()));
    PeriodicReference1D ref(PeriodicReference1D::Equation::burgers, m, 1, u0);
    ref.advance_to(dt);
    const SurfaceMesh mesh = SurfaceMesh::curve(Shape::circle(), 512);
    const std::vector<double> v = interpolate_to_surface(c.tube, u.values, mesh);
    double e = 0.0;
    for (std::size_t i = 0; i < mesh.size(); ++i) e = std::max(e, std::abs(v[i] - ref.sample(mesh.params[i][0])));
    err[k++] = e;
  }
  CHECK(err[0] < 2e-3);
  CHECK(err[0] / err[1] > 3.0);
}

TEST_CASE("extension sweep") {
  SUBCASE("constant field is a fixed point") {
    const CircleTube c(81);
    EmbeddedSolver s(c.field, c.tube, uniform_velocity(c.tube, Vec3::Zero()), order(3));
    std::vector<double> u(std::size_t(c.tube.size()), 2.5);
    const SweepStats st = s.extension_sweep(u, 0.0);
    CHECK(st.converged);
    CHECK(st.residual == 0.0);
    for (double v : u) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));
  }
  SUBCASE("inner ring data extends along normals") {
    const auto f = [](const Vec3& x) { return std::sin(3.0 * std::atan2(x.y(), x.x())); };
    for (int sweep_order : {1, 2}) {
      for (SweepMethod method : {SweepMethod::ordered, SweepMethod::pseudo_time}) {
        double err[2];
        int k = 0;
        for (int n : {81, 161}) {
          const CircleTube c(n);
          SchemeConfig cfg;
          cfg.sweep = method;
          cfg.sweep_order = sweep_order;
          cfg.sweep_max_iterations = 400;
          cfg.sweep_tol = 1e-6;
          EmbeddedSolver s(c.field, c.tube, uniform_velocity(c.tube, Vec3::Zero()), cfg);
          std::vector<double> u = c.sample(f);
          for (Slot q = c.tube.inner_count(); q < c.tube.size(); ++q) u[std::size_t(q)] = 0.0;
          const SweepStats st = s.extension_sweep(u, 0.0);
          CHECK(st.converged);
          double e = 0.0;
          for (Slot q = c.tube.inner_count(); q < c.tube.size(); ++q)
            e = std::max(e, std::abs(u[std::size_t(q)] - f(c.x(q))));
          err[k++] = e;
          CHECK(e <= 20.0 * c.dx());
        }
        CAPTURE(sweep_order);
        CHECK(std::log2(err[0] / err[1]) > sweep_order - 0.3);
      }
    }
  }
  SUBCASE("exact outer mode writes the oracle") {
    const CircleTube c(81);
    SchemeConfig cfg;
    cfg.extension = ExtensionMode::exact_outer;
    const auto oracle = [&](Slot q, double t) { return burgers_box_oracle(polar_angle(c.closest[std::size_t(q)]), t); };
    EmbeddedSolver s(c.field, c.tube, uniform_velocity(c.tube, Vec3::Zero()), cfg, oracle);
    std::vector<double> u(std::size_t(c.tube.size()), -1.0);
    s.extension_sweep(u, 0.7);
    for (Slot q = 0; q < c.tube.size(); ++q) {
      if (c.tube.is_inner(q)) CHECK(u[std::size_t(q)] == -1.0);
      else CHECK(u[std::size_t(q)] == oracle(q, 0.7));
    }
    CHECK_THROWS_AS(EmbeddedSolver(c.field, c.tube, uniform_velocity(c.tube, Vec3::Zero()), cfg), Error);
  }
}

TEST_CASE("run loop: zero final time, output landing and failure reporting") {
  const CircleTube c(41);
  EmbeddedSolver s(c.field, c.tube, uniform_velocity(c.tube, Vec3(1, 0.5, 0)), order(3));
  SUBCASE("zero final time returns the initial field") {
    GridField u{c.sample([](const Vec3& x) { return x.x(); }), 0.0};
    const std::vector<double> before = u.values;
    int calls = 0;
    const std::vector<double> times{0.0};
    const RunStats st = s.run(u, 0.0, times, [&](const GridField&) { ++calls; });
    CHECK(st.steps == 0);
    CHECK(calls == 1);
    CHECK(u.values == before);
  }
  SUBCASE("hooks fire exactly at the requested times") {
    GridField u{c.sample([](const Vec3& x) { return std::sin(x.x()); }), 0.0};
    const std::vector<double> times{0.0, 0.1, 0.25, 0.3};
    std::vector<double> seen;
    const RunStats st = s.run(u, 0.3, times, [&](const GridField& f) { seen.push_back(f.time); });
    CHECK(seen == times);
    CHECK(u.time == 0.3);
    CHECK(st.dt_max <= s.cfl_dt(u) * (1 + 1e-12));
    CHECK(st.dt_min > 0.5 * st.dt_max);
  }
  SUBCASE("non-finite values abort with the point") {
    EmbeddedSolver bad(c.field, c.tube,
                       uniform_flux(
                           c.tube, [](double u) { return u > 0.5 ? std::numeric_limits<double>::quiet_NaN() : u; }, one,
                           Vec3(1, 0, 0)),
                       order(1));
    GridField u{c.sample([](const Vec3& x) { return x.x() > 0.9 ? 1.0 : 0.0; }), 0.0};
    try {
      bad.run(u, 0.1);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.module() == "schemes");
      CHECK(std::string(e.what()).find("non-finite") != std::string::npos);
    }
  }
}
