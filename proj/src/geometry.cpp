#include "surfcl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace surfcl {

namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void fail(const std::string& message) { throw Error("geometry", message); }

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

struct CurveJet {
  Eigen::Vector2d f, df, ddf;
};

CurveJet ellipse_jet(const Ellipse& e, double t) {
  const double c = std::cos(t), s = std::sin(t);
  return {{e.a * c, e.b * s}, {-e.a * s, e.b * c}, {-e.a * c, -e.b * s}};
}

CurveJet star_jet(const Star& st, double t) {
  const double c = std::cos(t), s = std::sin(t);
  const double r = st.radius(t), r1 = st.radius_derivative(t), r2 = st.radius_second_derivative(t);
  const Eigen::Vector2d u(c, s), v(-s, c);
  return {r * u, r1 * u + r * v, r2 * u + 2.0 * r1 * v - r * u};
}

template <class Jet>
CurveProjection minimize_distance(Jet&& jet, const Vec3& x, std::span<const double> starts) {
  const Eigen::Vector2d p(x.x(), x.y());
  CurveProjection best;
  best.distance = std::numeric_limits<double>::infinity();
  bool any = false;
  double worst_residual = 0.0;

  auto half_sq = [&](double t) { return 0.5 * (jet(t).f - p).squaredNorm(); };

  for (double start : starts) {
    double t = start;
    bool converged = false;
    double d1 = 0.0;
    for (int it = 0; it < 100; ++it) {
      const CurveJet j = jet(t);
      const Eigen::Vector2d r = j.f - p;
      const double d = 0.5 * r.squaredNorm();
      d1 = r.dot(j.df);
      const double d2 = j.df.squaredNorm() + r.dot(j.ddf);
      if (std::abs(d1) < kMinimizerTolerance) {
        converged = true;
        break;
      }
      // Newton where the model is convex, otherwise steepest descent.
      double step = d2 > 0.0 ? -d1 / d2 : -d1;
      step = std::clamp(step, -0.5, 0.5);
      for (int k = 0; k < 60; ++k) {
        if (half_sq(t + step) <= d + 1e-15 * (1.0 + d)) break;
        step *= 0.5;
      }
      t += step;
    }
    if (!converged) {
      worst_residual = std::max(worst_residual, std::abs(d1));
      continue;
    }
    const CurveJet j = jet(t);
    const double dist = (j.f - p).norm();
    if (!any || dist < best.distance) {
      any = true;
      best.parameter = std::remainder(t, 2.0 * kPi);
      best.point = Vec3(j.f.x(), j.f.y(), 0.0);
      best.distance = dist;
      best.residual = std::abs(d1);
    }
  }
  if (!any) {
    std::ostringstream os;
    os << "closest-point minimizer did not converge at " << format_point(x, 2)
       << " (residual " << worst_residual << ")";
    fail(os.str());
  }
  return best;
}

std::vector<double> seeds(double own) {
  std::vector<double> s;
  s.reserve(kMinimizerStarts + 1);
  for (int k = 0; k < kMinimizerStarts; ++k) s.push_back(2.0 * kPi * k / kMinimizerStarts);
  s.push_back(own);
  return s;
}

double star_curvature(const Star& st, double t) {
  const double r = st.radius(t), r1 = st.radius_derivative(t), r2 = st.radius_second_derivative(t);
  return (r * r + 2.0 * r1 * r1 - r * r2) / std::pow(r * r + r1 * r1, 1.5);
}

}  // namespace

std::string format_point(const Vec3& x, int dim) {
  std::ostringstream os;
  os.precision(10);
  os << '(';
  for (int a = 0; a < dim; ++a) os << (a ? ", " : "") << x[a];
  os << ')';
  return os.str();
}

// --- Star -----------------------------------------------------------------

double Star::radius(double theta) const {
  const double s = std::sin(lobes * theta);
  return r0 + amplitude * s * s;
}

double Star::radius_derivative(double theta) const {
  return amplitude * lobes * std::sin(2.0 * lobes * theta);
}

double Star::radius_second_derivative(double theta) const {
  return 2.0 * amplitude * lobes * lobes * std::cos(2.0 * lobes * theta);
}

CurveProjection project_onto_ellipse(const Ellipse& e, const Vec3& x) {
  const auto s = seeds(std::atan2(x.y() / e.b, x.x() / e.a));
  return minimize_distance([&](double t) { return ellipse_jet(e, t); }, x, s);
}

CurveProjection project_onto_star(const Star& st, const Vec3& x) {
  const auto s = seeds(std::atan2(x.y(), x.x()));
  return minimize_distance([&](double t) { return star_jet(st, t); }, x, s);
}

// --- Shape ----------------------------------------------------------------

Shape::Shape(Variant v) : shape_(std::move(v)) {
  kappa_max_ = std::visit(
      Overloaded{
          [](const Circle& c) { return 1.0 / c.radius; },
          [](const Sphere& s) { return 1.0 / s.radius; },
          [](const Torus& t) {
            if (!(t.major > t.minor && t.minor > 0.0)) fail("torus needs major > minor > 0");
            return std::max(1.0 / t.minor, 1.0 / (t.major - t.minor));
          },
          [](const Ellipse& e) {
            if (!(e.a > 0.0 && e.b > 0.0)) fail("ellipse semi-axes must be positive");
            const double lo = std::min(e.a, e.b), hi = std::max(e.a, e.b);
            return hi / (lo * lo);
          },
          [](const Star& st) {
            if (!(st.r0 > 0.0 && st.amplitude >= 0.0)) fail("star needs r0 > 0, amplitude >= 0");
            constexpr int samples = 1 << 16;
            double k = 0.0;
            for (int i = 0; i < samples; ++i)
              k = std::max(k, std::abs(star_curvature(st, 2.0 * kPi * i / samples)));
            return k;
          },
      },
      shape_);
  if (auto* c = std::get_if<Circle>(&shape_); c && c->radius <= 0.0) fail("circle radius must be positive");
  if (auto* s = std::get_if<Sphere>(&shape_); s && s->radius <= 0.0) fail("sphere radius must be positive");
}

Shape Shape::parse(const std::string& text) {
  const auto open = text.find('(');
  const std::string name = text.substr(0, open);
  std::vector<double> p;
  if (open != std::string::npos) {
    const auto close = text.find(')', open);
    if (close == std::string::npos) fail("malformed shape '" + text + "'");
    std::stringstream ss(text.substr(open + 1, close - open - 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        p.push_back(std::stod(item));
      } catch (const std::exception&) {
        fail("malformed shape parameter '" + item + "' in '" + text + "'");
      }
    }
  }
  auto arg = [&](std::size_t i, double fallback) { return i < p.size() ? p[i] : fallback; };
  if (name == "circle") return circle(arg(0, 1.0));
  if (name == "sphere") return sphere(arg(0, 1.0));
  if (name == "ellipse") return ellipse(arg(0, 0.75), arg(1, 1.25));
  if (name == "star") return star(arg(0, 1.0), arg(1, 0.5), arg(2, 3.0));
  if (name == "torus") return torus(arg(0, 1.0), arg(1, 0.5));
  fail("unknown shape '" + name + "'");
}

ShapeKind Shape::kind() const { return static_cast<ShapeKind>(shape_.index()); }

int Shape::dim() const {
  return (kind() == ShapeKind::sphere || kind() == ShapeKind::torus) ? 3 : 2;
}

std::string Shape::name() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const Circle& c) { os << "circle(" << c.radius << ")"; },
                 [&](const Sphere& s) { os << "sphere(" << s.radius << ")"; },
                 [&](const Torus& t) { os << "torus(" << t.major << "," << t.minor << ")"; },
                 [&](const Ellipse& e) { os << "ellipse(" << e.a << "," << e.b << ")"; },
                 [&](const Star& s) { os << "star(" << s.r0 << "," << s.amplitude << "," << s.lobes << ")"; },
             },
             shape_);
  return os.str();
}

bool Shape::closed_form() const { return kind() != ShapeKind::ellipse && kind() != ShapeKind::star; }

double Shape::level(const Vec3& x) const {
  return std::visit(
      Overloaded{
          [&](const Circle& c) { return std::hypot(x.x(), x.y()) - c.radius; },
          [&](const Sphere& s) { return x.norm() - s.radius; },
          [&](const Torus& t) {
            return std::hypot(x.z(), std::hypot(x.x(), x.y()) - t.major) - t.minor;
          },
          [&](const Ellipse& e) { return std::hypot(x.x() / e.a, x.y() / e.b) - 1.0; },
          [&](const Star& s) {
            return std::hypot(x.x(), x.y()) - s.radius(std::atan2(x.y(), x.x()));
          },
      },
      shape_);
}

double Shape::signed_distance(const Vec3& x) const {
  switch (kind()) {
    case ShapeKind::ellipse: {
      const auto pr = project_onto_ellipse(std::get<Ellipse>(shape_), x);
      return sign_of(level(x)) * pr.distance;
    }
    case ShapeKind::star: {
      const auto pr = project_onto_star(std::get<Star>(shape_), x);
      return sign_of(level(x)) * pr.distance;
    }
    default:
      return level(x);
  }
}

Vec3 Shape::closest_point(const Vec3& x) const {
  return std::visit(
      Overloaded{
          [&](const Circle& c) -> Vec3 {
            const double r = std::hypot(x.x(), x.y());
            if (r == 0.0) fail("closest point undefined at the circle centre");
            return Vec3(c.radius * x.x() / r, c.radius * x.y() / r, 0.0);
          },
          [&](const Sphere& s) -> Vec3 {
            const double r = x.norm();
            if (r == 0.0) fail("closest point undefined at the sphere centre");
            return s.radius * x / r;
          },
          [&](const Torus& t) -> Vec3 {
            const double rho = std::hypot(x.x(), x.y());
            if (rho == 0.0) fail("closest point undefined on the torus axis " + format_point(x, 3));
            const Vec3 core(t.major * x.x() / rho, t.major * x.y() / rho, 0.0);
            const Vec3 off = x - core;
            const double d = off.norm();
            if (d == 0.0) fail("closest point undefined on the torus core circle " + format_point(x, 3));
            return core + t.minor * off / d;
          },
          [&](const Ellipse& e) -> Vec3 { return project_onto_ellipse(e, x).point; },
          [&](const Star& s) -> Vec3 { return project_onto_star(s, x).point; },
      },
      shape_);
}

Vec3 Shape::normal(const Vec3& p) const {
  return std::visit(
      Overloaded{
          [&](const Circle&) -> Vec3 { return Vec3(p.x(), p.y(), 0.0).normalized(); },
          [&](const Sphere&) -> Vec3 { return p.normalized(); },
          [&](const Torus& t) -> Vec3 {
            const double rho = std::hypot(p.x(), p.y());
            const Vec3 core(t.major * p.x() / rho, t.major * p.y() / rho, 0.0);
            return (p - core).normalized();
          },
          [&](const Ellipse& e) -> Vec3 {
            return Vec3(p.x() / (e.a * e.a), p.y() / (e.b * e.b), 0.0).normalized();
          },
          [&](const Star& s) -> Vec3 {
            const double th = std::atan2(p.y(), p.x());
            const double r1 = s.radius_derivative(th);
            const Vec3 tangent(-p.y() + r1 * std::cos(th), p.x() + r1 * std::sin(th), 0.0);
            return Vec3(tangent.y(), -tangent.x(), 0.0).normalized();
          },
      },
      shape_);
}

double Shape::max_curvature() const { return kappa_max_; }

Vec3 Shape::extent() const {
  return std::visit(Overloaded{
                        [](const Circle& c) { return Vec3(c.radius, c.radius, 0.0); },
                        [](const Sphere& s) { return Vec3(s.radius, s.radius, s.radius); },
                        [](const Torus& t) {
                          const double w = t.major + t.minor;
                          return Vec3(w, w, t.minor);
                        },
                        [](const Ellipse& e) { return Vec3(e.a, e.b, 0.0); },
                        [](const Star& s) {
                          const double w = s.r0 + s.amplitude;
                          return Vec3(w, w, 0.0);
                        },
                    },
                    shape_);
}

// --- GridSpec -------------------------------------------------------------

GridSpec GridSpec::covering(int dim, double dx, const Vec3& half_extent) {
  if (dim != 2 && dim != 3) fail("grid dimension must be 2 or 3");
  if (!(dx > 0.0)) fail("grid spacing must be positive");
  GridSpec g;
  g.dim = dim;
  g.dx = dx;
  for (int a = 0; a < dim; ++a) {
    const int m = static_cast<int>(std::ceil(half_extent[a] / dx - 1e-9));
    g.size[a] = 2 * m + 1;
    g.first[a] = -m;
  }
  return g;
}

GridSpec GridSpec::for_shape(const Shape& shape, int n, double margin_cells) {
  if (n < 3) fail("need at least 3 points per axis");
  const double dx = spacing_for(n);
  const Vec3 half = shape.extent() + Vec3::Constant(margin_cells * dx);
  return covering(shape.dim(), dx, half);
}

std::array<int, 3> GridSpec::multi(NodeIndex node) const {
  std::array<int, 3> idx{};
  idx[0] = static_cast<int>(node % size[0]);
  node /= size[0];
  idx[1] = static_cast<int>(node % size[1]);
  idx[2] = static_cast<int>(node / size[1]);
  return idx;
}

Vec3 GridSpec::position(const std::array<int, 3>& idx) const {
  Vec3 p = Vec3::Zero();
  for (int a = 0; a < dim; ++a) p[a] = (first[a] + idx[a]) * dx;
  return p;
}

double GridSpec::half_width() const {
  double w = std::numeric_limits<double>::infinity();
  for (int a = 0; a < dim; ++a) {
    w = std::min(w, -first[a] * dx);
    w = std::min(w, (first[a] + size[a] - 1) * dx);
  }
  return w;
}

// --- LevelSetField --------------------------------------------------------

LevelSetField::LevelSetField(Shape shape, GridSpec grid) : shape_(std::move(shape)), grid_(grid) {
  if (shape_.dim() != grid_.dim) fail("shape " + shape_.name() + " does not match grid dimension");
  phi_.resize(static_cast<std::size_t>(grid_.count()));
  for (NodeIndex node = 0; node < grid_.count(); ++node)
    phi_[static_cast<std::size_t>(node)] = shape_.signed_distance(grid_.position(node));
}

void LevelSetField::require_interior(const std::array<int, 3>& idx, const char* what) const {
  for (int a = 0; a < grid_.dim; ++a) {
    if (idx[a] < 1 || idx[a] > grid_.size[a] - 2)
      fail(std::string(what) + " stencil leaves the sampled box at " +
           format_point(grid_.position(idx), grid_.dim));
  }
}

Vec3 LevelSetField::gradient(NodeIndex node) const {
  const auto idx = grid_.multi(node);
  require_interior(idx, "gradient");
  const auto st = grid_.strides();
  Vec3 g = Vec3::Zero();
  for (int a = 0; a < grid_.dim; ++a) g[a] = (phi(node + st[a]) - phi(node - st[a])) / (2.0 * grid_.dx);
  return g;
}

Mat3 LevelSetField::hessian(NodeIndex node) const {
  const auto idx = grid_.multi(node);
  require_interior(idx, "Hessian");
  const auto st = grid_.strides();
  const double h2 = grid_.dx * grid_.dx;
  Mat3 h = Mat3::Zero();
  const double c = phi(node);
  for (int a = 0; a < grid_.dim; ++a) {
    h(a, a) = (phi(node + st[a]) - 2.0 * c + phi(node - st[a])) / h2;
    for (int b = a + 1; b < grid_.dim; ++b) {
      const double m = (phi(node + st[a] + st[b]) - phi(node + st[a] - st[b]) -
                        phi(node - st[a] + st[b]) + phi(node - st[a] - st[b])) /
                       (4.0 * h2);
      h(a, b) = m;
      h(b, a) = m;
    }
  }
  return h;
}

Vec3 LevelSetField::closest_point(const Vec3& x) const {
  const double d = shape_.signed_distance(x);
  if (std::abs(d) * shape_.max_curvature() >= 1.0) {
    std::ostringstream os;
    os << "projection of " << format_point(x, grid_.dim) << " is not unique: |phi| = " << std::abs(d)
       << " is beyond the reach 1/kappa_max = " << 1.0 / shape_.max_curvature();
    fail(os.str());
  }
  return shape_.closest_point(x);
}

Vec3 LevelSetField::discrete_projection(NodeIndex node) const {
  return grid_.position(node) - phi(node) * gradient(node);
}

}  // namespace surfcl
