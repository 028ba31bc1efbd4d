#include "surfcl/analysis.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace surfcl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

[[noreturn]] void fail(const std::string& message) { throw Error("analysis", message); }

void cubic_weights(double f, double w[4]) {
  w[0] = -f * (f - 1.0) * (f - 2.0) / 6.0;
  w[1] = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
  w[2] = -(f + 1.0) * f * (f - 2.0) / 2.0;
  w[3] = (f + 1.0) * f * (f - 1.0) / 6.0;
}

}  // namespace

double SurfaceMesh::measure() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

SurfaceMesh SurfaceMesh::curve(const Shape& shape, int samples) {
  if (shape.dim() != 2) fail("curve mesh needs a planar shape");
  if (samples < 8) fail("curve mesh needs at least 8 samples");
  SurfaceMesh m;
  m.kind = MeshKind::curve;
  const double h = kTwoPi / samples;
  for (int i = 0; i < samples; ++i) {
    const double t = i * h;
    Vec3 p;
    double speed = 0.0;
    if (const auto* c = std::get_if<Circle>(&shape.variant())) {
      p = Vec3(c->radius * std::cos(t), c->radius * std::sin(t), 0.0);
      speed = c->radius;
    } else if (const auto* e = std::get_if<Ellipse>(&shape.variant())) {
      p = Vec3(e->a * std::cos(t), e->b * std::sin(t), 0.0);
      speed = std::hypot(e->a * std::sin(t), e->b * std::cos(t));
    } else {
      const auto& st = std::get<Star>(shape.variant());
      const double r = st.radius(t);
      p = Vec3(r * std::cos(t), r * std::sin(t), 0.0);
      speed = std::hypot(r, st.radius_derivative(t));
    }
    m.points.push_back(p);
    m.weights.push_back(speed * h);
    m.params.push_back({t, 0.0});
  }
  return m;
}

SurfaceMesh SurfaceMesh::sphere(const Sphere& s, int n_theta, int n_polar) {
  SurfaceMesh m;
  m.kind = MeshKind::sphere;
  const double ht = kTwoPi / n_theta, hp = kPi / n_polar;
  const double r2 = s.radius * s.radius;
  for (int j = 0; j < n_polar; ++j) {
    const double polar = (j + 0.5) * hp;
    const double band = std::cos(j * hp) - std::cos((j + 1) * hp);
    for (int i = 0; i < n_theta; ++i) {
      const double th = -kPi + (i + 0.5) * ht;
      m.points.emplace_back(s.radius * std::sin(polar) * std::cos(th), s.radius * std::sin(polar) * std::sin(th),
                            s.radius * std::cos(polar));
      m.weights.push_back(r2 * band * ht);
      m.params.push_back({th, polar});
    }
  }
  return m;
}

SurfaceMesh SurfaceMesh::torus(const Torus& t, int n_theta, int n_eta) {
  SurfaceMesh m;
  m.kind = MeshKind::torus;
  const double ht = kTwoPi / n_theta, he = kTwoPi / n_eta;
  for (int j = 0; j < n_eta; ++j) {
    const double eta = -kPi + j * he;
    const double rho = t.major + t.minor * std::cos(eta);
    for (int i = 0; i < n_theta; ++i) {
      const double th = -kPi + i * ht;
      m.points.emplace_back(rho * std::cos(th), rho * std::sin(th), t.minor * std::sin(eta));
      m.weights.push_back(t.minor * rho * ht * he);
      m.params.push_back({th, eta});
    }
  }
  return m;
}

SurfaceMesh SurfaceMesh::equator(const Sphere& s, int samples) {
  SurfaceMesh m;
  m.kind = MeshKind::equator;
  const double h = kTwoPi / samples;
  for (int i = 0; i < samples; ++i) {
    const double th = i * h;
    m.points.emplace_back(s.radius * std::cos(th), s.radius * std::sin(th), 0.0);
    m.weights.push_back(s.radius * h);
    m.params.push_back({th, kPi / 2.0});
  }
  return m;
}

SurfaceMesh SurfaceMesh::for_problem(const ProblemSpec& problem, MeshKind kind) {
  const auto& v = problem.shape.variant();
  switch (kind) {
    case MeshKind::curve:
      return curve(problem.shape);
    case MeshKind::sphere:
      if (const auto* s = std::get_if<Sphere>(&v)) return sphere(*s);
      break;
    case MeshKind::equator:
      if (const auto* s = std::get_if<Sphere>(&v)) return equator(*s);
      break;
    case MeshKind::torus:
      if (const auto* t = std::get_if<Torus>(&v)) return torus(*t);
      break;
  }
  fail("mesh kind does not match shape " + problem.shape.name());
}

double interpolate(const TubeGrid& tube, std::span<const double> values, const Vec3& x) {
  const GridSpec& g = tube.grid();
  int base[3] = {0, 0, 0};
  double w[3][4] = {{1, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}};
  for (int a = 0; a < g.dim; ++a) {
    const double xi = x[a] / g.dx - g.first[a];
    const double fl = std::floor(xi);
    base[a] = int(fl) - 1;
    if (base[a] < 0 || base[a] + 3 >= g.size[a])
      fail("interpolation stencil of " + format_point(x, g.dim) + " leaves the grid");
    cubic_weights(xi - fl, w[a]);
  }
  const int nz = g.dim == 3 ? 4 : 1;
  const auto st = g.strides();
  double v = 0.0;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < 4; ++j) {
      const double wjk = w[1][j] * (g.dim == 3 ? w[2][k] : 1.0);
      const NodeIndex row = base[0] + st[1] * (base[1] + j) + (g.dim == 3 ? st[2] * (base[2] + k) : 0);
      for (int i = 0; i < 4; ++i) {
        const Slot s = tube.slot(row + i);
        if (s == kNoSlot)
          fail("interpolation stencil of " + format_point(x, g.dim) + " leaves the tube");
        v += w[0][i] * wjk * values[std::size_t(s)];
      }
    }
  }
  return v;
}

std::vector<double> interpolate_to_surface(const TubeGrid& tube, std::span<const double> values,
                                           const SurfaceMesh& mesh) {
  std::vector<double> out(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) out[i] = interpolate(tube, values, mesh.points[i]);
  return out;
}

ErrorNorms error_norms(std::span<const double> samples, std::span<const double> exact,
                       std::span<const double> weights) {
  if (samples.size() != exact.size() || samples.size() != weights.size())
    fail("error norms need matching sample, oracle and weight sets");
  ErrorNorms n;
  double l2 = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double e = std::abs(samples[i] - exact[i]);
    n.l1 += weights[i] * e;
    l2 += weights[i] * e * e;
    n.linf = std::max(n.linf, e);
  }
  n.l2 = std::sqrt(l2);
  return n;
}

std::optional<double> convergence_rate(std::span<const double> dx, std::span<const double> errors,
                                       std::vector<std::string>* notes) {
  if (dx.size() != errors.size()) fail("convergence rate needs matching dx and error lists");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    if (!(errors[i] > 0.0) || !(dx[i] > 0.0)) {
      if (notes) {
        std::ostringstream os;
        os << "row with dx = " << dx[i] << " excluded: non-positive error " << errors[i];
        notes->push_back(os.str());
      }
      continue;
    }
    lx.push_back(std::log(dx[i]));
    ly.push_back(std::log(errors[i]));
  }
  if (lx.size() < 2) return std::nullopt;
  const double n = double(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

Rates convergence_rates(std::span<const ErrorRow> rows) {
  Rates r;
  std::vector<double> dx, l1, l2, linf;
  for (const auto& row : rows) {
    dx.push_back(row.dx);
    l1.push_back(row.norms.l1);
    l2.push_back(row.norms.l2);
    linf.push_back(row.norms.linf);
  }
  r.l1 = convergence_rate(dx, l1, &r.notes);
  r.l2 = convergence_rate(dx, l2, &r.notes);
  r.linf = convergence_rate(dx, linf, &r.notes);
  return r;
}

double total_mass(const TubeGrid& tube, std::span<const double> values, const SurfaceMesh& mesh) {
  double m = 0.0;
  for (std::size_t i = 0; i < mesh.size(); ++i) m += mesh.weights[i] * interpolate(tube, values, mesh.points[i]);
  return m;
}

double normal_variation(const TubeGrid& tube, std::span<const double> values, const Shape& shape,
                        const SurfaceMesh& mesh, double max_offset, int offsets) {
  if (offsets < 1) fail("normal variation needs at least one offset");
  double worst = 0.0;
  for (const Vec3& p : mesh.points) {
    const Vec3 n = shape.normal(p);
    const double base = interpolate(tube, values, p);
    for (int k = 1; k <= offsets; ++k) {
      const double h = max_offset * k / offsets;
      worst = std::max(worst, std::abs(interpolate(tube, values, p + h * n) - base));
      worst = std::max(worst, std::abs(interpolate(tube, values, p - h * n) - base));
    }
  }
  return worst;
}

}  // namespace surfcl
