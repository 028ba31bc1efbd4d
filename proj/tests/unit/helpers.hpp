#pragma once

#include "surfcl/geometry.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace surfcl::test {

inline constexpr double kPi = std::numbers::pi;

// Node whose integer lattice coordinate is `k` (position k * dx).
inline NodeIndex node_at(const GridSpec& g, int kx, int ky, int kz = 0) {
  return g.linear({kx - g.first[0], ky - g.first[1], kz - g.first[2]});
}

// Brute-force distance from x to a planar parametric curve on [0, 2 pi):
// dense sampling, then golden-section refinement around the best sample.
inline double curve_distance(const std::function<Vec3(double)>& curve, const Vec3& x, int samples = 20000) {
  auto d2 = [&](double s) { return (curve(s) - x).squaredNorm(); };
  const double h = 2.0 * kPi / samples;
  int best = 0;
  double best_d = d2(0.0);
  for (int i = 1; i < samples; ++i) {
    const double d = d2(i * h);
    if (d < best_d) best_d = d, best = i;
  }
  double lo = (best - 1) * h, hi = (best + 1) * h;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    if (d2(a) < d2(b)) hi = b;
    else lo = a;
  }
  return std::sqrt(std::min(best_d, d2(0.5 * (lo + hi))));
}

inline Vec3 star_point(const Star& s, double th) {
  const double r = s.radius(th);
  return Vec3(r * std::cos(th), r * std::sin(th), 0.0);
}

inline Vec3 ellipse_point(const Ellipse& e, double t) { return Vec3(e.a * std::cos(t), e.b * std::sin(t), 0.0); }

}  // namespace surfcl::test
