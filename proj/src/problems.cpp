#include "surfcl/problems.hpp"

#include "surfcl/weno_kernels.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/ellint_2.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

namespace surfcl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

[[noreturn]] void fail(const std::string& message) { throw Error("problems", message); }

// Wraps into [0, 2 pi).
double wrap_positive(double theta) {
  double w = std::fmod(theta, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

double burgers_q(double u) { return 0.5 * u * u; }
double burgers_dq(double u) { return u; }

SurfaceFlux burgers_flux(std::function<Vec3(const Vec3&)> direction) {
  return {burgers_q, burgers_dq, std::move(direction)};
}

// Unit counter-clockwise tangent about the z axis; zero on the axis.
Vec3 azimuthal(const Vec3& p) {
  const double rho = std::hypot(p.x(), p.y());
  if (rho < 1e-14) return Vec3::Zero();
  return Vec3(-p.y() / rho, p.x() / rho, 0.0);
}

// Latitude of a point on a sphere centred at the origin.
double latitude(const Vec3& p) { return std::atan2(p.z(), std::hypot(p.x(), p.y())); }

double box_indicator(double theta) { return std::abs(std::remainder(theta, kTwoPi)) <= kPi / 4.0 ? 1.0 : 0.0; }

double sphere_box(const Vec3& p) {
  return (std::abs(latitude(p)) < kPi / 4.0 && std::abs(polar_angle(p)) < kPi / 4.0) ? 1.0 : 0.0;
}

// Box profile advected by Burgers' equation along each latitude circle, where
// the angular speed is u / rho.
double sphere_box_oracle(const Vec3& p, double t) {
  if (t == 0.0) return sphere_box(p);
  if (std::abs(latitude(p)) >= kPi / 4.0) return 0.0;
  const double rho = std::hypot(p.x(), p.y()) / p.norm();
  return burgers_box_oracle(polar_angle(p), t / rho);
}

double sine_profile(double theta) { return std::sin(theta) + 0.5; }
double sine_profile_derivative(double theta) { return std::cos(theta); }

ProblemSpec circle_advection() {
  ProblemSpec p{"A1", "advection u_t + u_theta = 0 on the unit circle, u0 = sin(theta)", Shape::circle(1.0), {}, {}, {}, 0.5, {41, 81, 161, 321}};
  p.equation = SurfaceAdvection{[](const Vec3& x) { return azimuthal(x); }};
  p.initial = [](const Vec3& x) { return std::sin(polar_angle(x)); };
  p.oracle = [](const Vec3& x, double t) { return std::sin(polar_angle(x) - t); };
  return p;
}

ProblemSpec ellipse_advection() {
  const Ellipse e{0.75, 1.25};
  const double perimeter = ellipse_perimeter(e);
  ProblemSpec p{"A2", "advection u_t + u_s = 0 on the ellipse a=0.75 b=1.25, u0 = cos^2(2 pi s / L)",
                Shape::ellipse(e.a, e.b), {}, {}, {}, perimeter / 4.0, {41, 81, 161, 321}};
  p.equation = SurfaceAdvection{[e](const Vec3& x) {
    const Vec3 v(-x.y() / (e.b * e.b), x.x() / (e.a * e.a), 0.0);
    return Vec3(v / v.norm());
  }};
  auto arclength = [e](const Vec3& x) { return ellipse_arclength(e, std::atan2(x.y() / e.b, x.x() / e.a)); };
  p.initial = [arclength, perimeter](const Vec3& x) {
    const double c = std::cos(kTwoPi * arclength(x) / perimeter);
    return c * c;
  };
  p.oracle = [arclength, perimeter](const Vec3& x, double t) {
    const double c = std::cos(kTwoPi * (arclength(x) - t) / perimeter);
    return c * c;
  };
  return p;
}

ProblemSpec star_advection() {
  const Star st{1.0, 0.5, 3.0};
  auto table = std::make_shared<StarArclength>(st);
  ProblemSpec p{"A3", "advection u_t + u_s = 0 on the star r = 1 + 0.5 sin^2(3 theta), three-level u0",
                Shape::star(st.r0, st.amplitude, st.lobes), {}, {}, {}, table->perimeter(), {161}};
  p.discontinuous = true;
  p.equation = SurfaceAdvection{[st](const Vec3& x) {
    const double th = std::atan2(x.y(), x.x());
    const double w = st.amplitude * st.lobes * std::sin(2.0 * st.lobes * th);
    const Vec3 v(-x.y() + w * std::cos(th), x.x() + w * std::sin(th), 0.0);
    return Vec3(v / v.norm());
  }};
  p.initial = [](const Vec3& x) { return star_bands(polar_angle(x)); };
  p.oracle = [table](const Vec3& x, double t) {
    const double s = table->length(wrap_positive(polar_angle(x)));
    return star_bands(table->angle(s - t));
  };
  return p;
}

ProblemSpec torus_advection() {
  const Torus tor{1.0, 0.5};
  ProblemSpec p{"A4", "advection u_t + u_eta = 0 on the torus R=1 r=0.5, u0 = f(eta)", Shape::torus(tor.major, tor.minor),
                {}, {}, {}, 1.0, {81, 161, 321}};
  p.error_mesh = MeshKind::torus;
  p.equation = SurfaceAdvection{[tor](const Vec3& x) {
    const auto [th, eta] = torus_angles(tor, x);
    return Vec3(-tor.minor * std::sin(eta) * std::cos(th), -tor.minor * std::sin(eta) * std::sin(th),
                tor.minor * std::cos(eta));
  }};
  p.initial = [tor](const Vec3& x) { return torus_profile(torus_angles(tor, x).second); };
  p.oracle = [tor](const Vec3& x, double t) { return torus_profile(torus_angles(tor, x).second - t); };
  return p;
}

ProblemSpec circle_burgers() {
  ProblemSpec p{"B1", "Burgers u_t + (u^2/2)_theta = 0 on the unit circle, u0 = sin(theta) + 0.5", Shape::circle(1.0),
                {}, {}, {}, 0.9, {41, 81, 161, 321}};
  p.equation = SurfaceConservation{burgers_flux([](const Vec3& x) { return azimuthal(x); })};
  p.initial = [](const Vec3& x) { return sine_profile(polar_angle(x)); };
  p.oracle = [](const Vec3& x, double t) {
    return burgers_oracle_circle(sine_profile, sine_profile_derivative, polar_angle(x), t, -0.5, 1.5);
  };
  return p;
}

ProblemSpec sphere_burgers(const std::string& variant) {
  ProblemSpec p{"B2" + variant, "", Shape::sphere(1.0), {}, {}, {}, 4.0 * kPi, {81}};
  p.equation = SurfaceConservation{burgers_flux([](const Vec3& x) { return azimuthal(x); })};
  p.error_mesh = MeshKind::sphere;
  if (variant == "u1") {
    p.description = "Burgers along the azimuth on the unit sphere, u1 = sin(theta) + 0.5";
    p.final_time = 0.5;
    p.default_n = {81, 161};
    p.error_mesh = MeshKind::equator;
    p.initial = [](const Vec3& x) { return sine_profile(polar_angle(x)); };
    p.oracle = [](const Vec3& x, double t) {
      const double rho = std::hypot(x.x(), x.y()) / x.norm();
      if (rho < 1e-12) fail("Burgers sphere oracle is undefined at the poles");
      return burgers_oracle_circle(sine_profile, sine_profile_derivative, polar_angle(x), t / rho, -0.5, 1.5);
    };
  } else if (variant == "u2") {
    p.description = "Burgers along the azimuth on the unit sphere, u2 = box |latitude| < pi/4, |theta| < pi/4";
    p.discontinuous = true;
    p.initial = sphere_box;
  } else {
    p.description = "Burgers along the azimuth on the unit sphere, u3 = Y(2,-1) + Y(4,-3)";
    p.initial = sphere_harmonics_u3;
  }
  return p;
}

ProblemSpec torus_burgers() {
  const Torus tor{1.0, 0.5};
  ProblemSpec p{"B3", "Burgers on the torus with flux u^2/2 (theta_hat + eta_hat), u0 = sin(theta) cos(eta)",
                Shape::torus(tor.major, tor.minor), {}, {}, {}, 2.0 * kPi, {81}};
  p.error_mesh = MeshKind::torus;
  p.equation = SurfaceConservation{burgers_flux([tor](const Vec3& x) {
                                     const auto [th, eta] = torus_angles(tor, x);
                                     const Vec3 theta_hat(-std::sin(th), std::cos(th), 0.0);
                                     const Vec3 eta_hat(-std::sin(eta) * std::cos(th), -std::sin(eta) * std::sin(th),
                                                        std::cos(eta));
                                     return Vec3(theta_hat + eta_hat);
                                   }),
                                   false};
  p.initial = [tor](const Vec3& x) {
    const auto [th, eta] = torus_angles(tor, x);
    return std::sin(th) * std::cos(eta);
  };
  return p;
}

ProblemSpec circle_mass() {
  ProblemSpec p{"M1", "mass study: Burgers on the unit circle, box u0 = 1 on |theta| <= pi/4, exact mass pi/2",
                Shape::circle(1.0), {}, {}, {}, 2.0 * kPi, {81, 161, 321}};
  p.discontinuous = true;
  p.equation = SurfaceConservation{burgers_flux([](const Vec3& x) { return azimuthal(x); })};
  p.initial = [](const Vec3& x) { return box_indicator(polar_angle(x)); };
  p.oracle = [](const Vec3& x, double t) {
    return t == 0.0 ? box_indicator(polar_angle(x)) : burgers_box_oracle(polar_angle(x), t);
  };
  return p;
}

ProblemSpec sphere_mass() {
  ProblemSpec p = sphere_burgers("u2");
  p.id = "M2";
  p.description = "mass study: Burgers on the unit sphere, box u2, exact mass pi/sqrt(2)";
  p.final_time = 2.0 * kPi;
  p.default_n = {81, 161};
  p.oracle = sphere_box_oracle;
  return p;
}

}  // namespace

// --- catalog ------------------------------------------------------------------

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids{"A1", "A2", "A3", "A4", "B1", "B2u1", "B2u2", "B2u3", "B3", "M1", "M2"};
  return ids;
}

ProblemSpec make_problem(const std::string& id) {
  if (id == "A1") return circle_advection();
  if (id == "A2") return ellipse_advection();
  if (id == "A3") return star_advection();
  if (id == "A4") return torus_advection();
  if (id == "B1") return circle_burgers();
  if (id == "B2u1") return sphere_burgers("u1");
  if (id == "B2u2") return sphere_burgers("u2");
  if (id == "B2u3") return sphere_burgers("u3");
  if (id == "B3") return torus_burgers();
  if (id == "M1") return circle_mass();
  if (id == "M2") return sphere_mass();
  fail("unknown experiment '" + id + "'; run 'surfcl list' for the catalog");
}

std::string list_experiments() {
  std::ostringstream os;
  for (const auto& id : experiment_ids()) {
    const ProblemSpec p = make_problem(id);
    os << id << std::string(6 - std::min<std::size_t>(id.size(), 5), ' ') << p.description << '\n';
  }
  return os.str();
}

GridField extend_initial(const ProblemSpec& problem, std::span<const Vec3> closest) {
  GridField f;
  f.values.resize(closest.size());
  for (std::size_t s = 0; s < closest.size(); ++s) {
    const double v = problem.initial(closest[s]);
    if (!std::isfinite(v)) fail("initial condition is not finite at " + format_point(closest[s], problem.shape.dim()));
    f.values[s] = v;
  }
  return f;
}

EmbeddedEquation embed_equation(const ProblemSpec& problem, const PushForwardField& pf, std::span<const Vec3> closest) {
  if (const auto* adv = std::get_if<SurfaceAdvection>(&problem.equation))
    return EmbeddedAdvection{embed_directions(pf, adv->velocity, closest)};
  const auto& cons = std::get<SurfaceConservation>(problem.equation);
  return EmbeddedConservation{cons.flux.magnitude, cons.flux.magnitude_derivative,
                              embed_directions(pf, cons.flux.direction, closest)};
}

// --- parametrizations -----------------------------------------------------------

double polar_angle(const Vec3& p) { return std::atan2(p.y(), p.x()); }

std::pair<double, double> torus_angles(const Torus& torus, const Vec3& p) {
  const double rho = std::hypot(p.x(), p.y());
  return {std::atan2(p.y(), p.x()), std::atan2(p.z(), rho - torus.major)};
}

double ellipse_arclength(const Ellipse& e, double t) {
  using boost::math::ellint_2;
  if (e.b >= e.a) {
    const double k = std::sqrt(1.0 - (e.a * e.a) / (e.b * e.b));
    return e.b * ellint_2(k, t);
  }
  const double k = std::sqrt(1.0 - (e.b * e.b) / (e.a * e.a));
  return e.a * (ellint_2(k, t - kPi / 2.0) - ellint_2(k, -kPi / 2.0));
}

double ellipse_perimeter(const Ellipse& e) { return ellipse_arclength(e, kTwoPi); }

StarArclength::StarArclength(const Star& star, int table_size) : star_(star) {
  if (table_size < 16) fail("star arclength table is too small");
  table_.resize(std::size_t(table_size) + 1);
  const double h = kTwoPi / table_size;
  auto speed = [this](double th) { return std::hypot(star_.radius(th), star_.radius_derivative(th)); };
  table_[0] = 0.0;
  for (int k = 0; k < table_size; ++k)
    table_[std::size_t(k) + 1] =
        table_[std::size_t(k)] + boost::math::quadrature::gauss_kronrod<double, 31>::integrate(speed, k * h, (k + 1) * h);
  perimeter_ = table_.back();
}

double StarArclength::length(double theta) const {
  const double turns = std::floor(theta / kTwoPi);
  const double th = theta - turns * kTwoPi;
  const int n = int(table_.size()) - 1;
  const double h = kTwoPi / n;
  const int k = std::clamp(int(th / h), 0, n - 1);
  auto speed = [this](double t) { return std::hypot(star_.radius(t), star_.radius_derivative(t)); };
  return turns * perimeter_ + table_[std::size_t(k)] +
         boost::math::quadrature::gauss_kronrod<double, 31>::integrate(speed, k * h, th);
}

double StarArclength::angle(double s) const {
  double w = std::fmod(s, perimeter_);
  if (w < 0.0) w += perimeter_;
  const int n = int(table_.size()) - 1;
  const double h = kTwoPi / n;
  const auto it = std::upper_bound(table_.begin(), table_.end(), w);
  const int k = std::clamp(int(it - table_.begin()) - 1, 0, n - 1);
  const double lo = k * h, hi = (k + 1) * h;
  double th = lo + h * (w - table_[std::size_t(k)]) / (table_[std::size_t(k) + 1] - table_[std::size_t(k)]);
  for (int it2 = 0; it2 < 50; ++it2) {
    const double g = length(th) - w;
    const double step = g / std::hypot(star_.radius(th), star_.radius_derivative(th));
    th = std::clamp(th - step, lo, hi);
    if (std::abs(step) < 1e-14) break;
  }
  return wrap_positive(th);
}

// --- oracles ----------------------------------------------------------------------

double burgers_oracle_circle(const std::function<double(double)>& u0, const std::function<double(double)>& du0,
                             double theta, double t, double lo, double hi) {
  if (t == 0.0) return u0(theta);
  auto g = [&](double u) { return u - u0(theta - u * t); };
  double a = lo, b = hi;
  double ga = g(a), gb = g(b);
  if (ga > 0.0 || gb < 0.0) fail("Burgers oracle: u0 leaves the stated range [lo, hi]");
  double u = std::clamp(u0(theta), lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double gu = g(u);
    if (gu == 0.0) return u;
    if (gu < 0.0) a = u;
    else b = u;
    const double dg = 1.0 + t * du0(theta - u * t);
    double next = dg > 0.0 ? u - gu / dg : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - u) < kBurgersTolerance) {
      if (1.0 + t * du0(theta - next * t) <= 0.0)
        fail("Burgers oracle: characteristics have crossed (post-shock query)");
      // More than one root on [lo, hi] also means crossed characteristics.
      int changes = 0;
      bool positive = ga > 0.0;
      for (int k = 1; k <= 256; ++k) {
        const bool p = g(lo + (hi - lo) * k / 256.0) > 0.0;
        changes += p != positive;
        positive = p;
      }
      if (changes > 1) fail("Burgers oracle: characteristics have crossed (post-shock query)");
      return next;
    }
    u = next;
  }
  fail("Burgers oracle did not converge at theta = " + std::to_string(theta) + ", t = " + std::to_string(t));
}

double burgers_box_oracle(double theta, double t) {
  if (t < 0.0 || t >= 4.0 * kPi) fail("box oracle is valid for 0 <= t < 4 pi");
  if (t == 0.0) return box_indicator(theta);
  const double xi = wrap_positive(theta + kPi / 4.0);  // distance past the left edge
  if (t <= kPi) {
    if (xi < t) return xi / t;
    return xi < kPi / 2.0 + 0.5 * t ? 1.0 : 0.0;
  }
  return xi < std::sqrt(kPi * t) ? xi / t : 0.0;
}

double star_bands(double theta) {
  static constexpr double levels[6] = {1.0, 2.0, 3.0, 1.0, 2.0, 3.0};
  const int k = std::clamp(int(std::floor(wrap_positive(theta) / (kPi / 3.0))), 0, 5);
  return levels[k];
}

double torus_profile(double eta) {
  const double e = std::remainder(eta, kTwoPi);
  const double x = e <= 0.0 ? (kPi + e) / kPi : (kPi - e) / kPi;
  if (x <= 0.0 || x >= 1.0) return -1.0;
  return std::tanh(1.0 / (2.0 * x * (x - 1.0)));
}

double sphere_harmonics_u3(const Vec3& p) {
  const Vec3 q = p / p.norm();
  const double x = q.x(), y = q.y(), z = q.z();
  const double y21 = 0.5 * std::sqrt(15.0 / kPi) * y * z;
  const double y43 = 0.75 * std::sqrt(35.0 / (2.0 * kPi)) * (3.0 * x * x - y * y) * y * z;
  return y21 + y43;
}

// --- 1D periodic reference ---------------------------------------------------------

PeriodicReference1D::PeriodicReference1D(Equation eq, int n, int order, const std::function<double(double)>& u0,
                                         double cfl, double weno_eps)
    : eq_(eq), order_(order), cfl_(cfl), eps_(weno_eps), h_(kTwoPi / n) {
  if (n < 8) fail("reference grid needs at least 8 points");
  if (order != 1 && order != 3) fail("reference order must be 1 or 3");
  u_.resize(std::size_t(n));
  for (int j = 0; j < n; ++j) u_[std::size_t(j)] = u0(j * h_);
  a_.resize(u_.size());
  b_.resize(u_.size());
  r_.resize(u_.size());
}

void PeriodicReference1D::rhs(const std::vector<double>& u, std::vector<double>& out) const {
  // Two periodic ghost values on each side; p[j + 2] = u[j].
  const std::size_t n = u.size();
  auto pad = [n](const std::vector<double>& v, std::vector<double>& p) {
    p.resize(n + 4);
    std::copy(v.begin(), v.end(), p.begin() + 2);
    p[0] = v[n - 2], p[1] = v[n - 1], p[n + 2] = v[0], p[n + 3] = v[1];
  };
  if (eq_ == Equation::advection) {
    pad(u, pad_);
    const double* p = pad_.data() + 2;
    for (std::size_t j = 0; j < n; ++j) {
      const double v1 = (p[j - 1] - p[j - 2]) / h_;
      const double v2 = (p[j] - p[j - 1]) / h_;
      const double v3 = (p[j + 1] - p[j]) / h_;
      out[j] = -(order_ == 1 ? v2 : weno::hj_derivative3(v1, v2, v3, eps_));
    }
    return;
  }
  double alpha = 0.0;
  for (double v : u) alpha = std::max(alpha, std::abs(v));
  fp_.resize(n);
  fm_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double f = 0.5 * u[j] * u[j];
    fp_[j] = 0.5 * (f + alpha * u[j]);
    fm_[j] = 0.5 * (f - alpha * u[j]);
  }
  pad(fp_, pad_);
  pad(fm_, padm_);
  const double* p = pad_.data() + 2;
  const double* m = padm_.data() + 2;
  // flux_[j + 1] is the numerical flux at j + 1/2, for j = -1 .. n - 1.
  flux_.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double* pj = p + k - 1;
    const double* mj = m + k - 1;
    flux_[k] = weno::reconstruct3(pj[-1], pj[0], pj[1], eps_) + weno::reconstruct3(mj[2], mj[1], mj[0], eps_);
  }
  for (std::size_t j = 0; j < n; ++j) out[j] = -(flux_[j + 1] - flux_[j]) / h_;
}

void PeriodicReference1D::step(double dt) {
  const std::size_t n = u_.size();
  if (order_ == 1) {
    if (eq_ == Equation::advection) {
      rhs(u_, r_);
      for (std::size_t j = 0; j < n; ++j) u_[j] += dt * r_[j];
    } else {
      const double diss = h_ / dt;
      for (std::size_t j = 0; j < n; ++j) {  // a_[j] is the flux at j - 1/2
        const std::size_t l = (j + n - 1) % n;
        a_[j] = 0.5 * (0.5 * u_[l] * u_[l] + 0.5 * u_[j] * u_[j] - diss * (u_[j] - u_[l]));
      }
      for (std::size_t j = 0; j < n; ++j) b_[j] = u_[j] - dt / h_ * (a_[(j + 1) % n] - a_[j]);
      u_.swap(b_);
    }
    t_ += dt;
    return;
  }
  rhs(u_, r_);
  for (std::size_t j = 0; j < n; ++j) a_[j] = u_[j] + dt * r_[j];
  rhs(a_, r_);
  for (std::size_t j = 0; j < n; ++j) a_[j] = 0.75 * u_[j] + 0.25 * (a_[j] + dt * r_[j]);
  rhs(a_, r_);
  for (std::size_t j = 0; j < n; ++j) u_[j] = u_[j] / 3.0 + 2.0 / 3.0 * (a_[j] + dt * r_[j]);
  t_ += dt;
}

void PeriodicReference1D::advance_to(double t) {
  if (t < t_) fail("reference solver cannot step backwards");
  while (t_ < t) {
    double speed = 1.0;
    if (eq_ == Equation::burgers) {
      speed = 0.0;
      for (double v : u_) speed = std::max(speed, std::abs(v));
    }
    const double dt_cfl = speed > 0.0 ? std::min(h_, cfl_ * h_ / speed) : h_;
    const double remaining = t - t_;
    const double pieces = std::ceil(remaining / dt_cfl * (1.0 - 1e-12));
    if (pieces <= 1.0) {
      step(remaining);
      t_ = t;
    } else {
      step(remaining / pieces);
    }
  }
}

double PeriodicReference1D::sample(double theta) const {
  const int n = int(u_.size());
  const double x = wrap_positive(theta) / h_;
  const int i = int(std::floor(x));
  const double f = x - i;
  const double w[4] = {-f * (f - 1.0) * (f - 2.0) / 6.0, (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0,
                       -(f + 1.0) * f * (f - 2.0) / 2.0, (f + 1.0) * f * (f - 1.0) / 6.0};
  double v = 0.0;
  for (int k = 0; k < 4; ++k) v += w[k] * u_[std::size_t(((i - 1 + k) % n + n) % n)];
  return v;
}

}  // namespace surfcl
