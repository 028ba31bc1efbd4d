#include "surfcl/tube.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace surfcl {

PointClass classify(double phi, double inner_radius, double outer_radius) {
  const double a = std::abs(phi);
  if (a < inner_radius) return PointClass::inner;
  if (a < outer_radius) return PointClass::outer;
  return PointClass::exterior;
}

TubeGrid TubeGrid::build(const LevelSetField& field, TubeRadii radii) {
  if (!(radii.inner > 0.0 && radii.inner < radii.outer))
    throw Error("tube", "need 0 < R < R'");
  const double kappa = field.shape().max_curvature();
  if (radii.inner * kappa >= 1.0) {
    std::ostringstream os;
    os << "tube radius R = " << radii.inner << " violates R < 1/kappa_max (kappa_max = " << kappa
       << ", 1/kappa_max = " << 1.0 / kappa << "); refine the grid";
    throw Error("tube", os.str());
  }

  TubeGrid t;
  t.grid_ = field.grid();
  t.radii_ = radii;
  const GridSpec& g = t.grid_;
  const NodeIndex count = g.count();
  t.classes_.assign(std::size_t(count), std::uint8_t(PointClass::exterior));
  t.slots_.assign(std::size_t(count), kNoSlot);

  std::vector<NodeIndex> outer;
  for (NodeIndex node = 0; node < count; ++node) {
    const PointClass c = classify(field.phi(node), radii.inner, radii.outer);
    t.classes_[std::size_t(node)] = std::uint8_t(c);
    if (c == PointClass::inner) t.nodes_.push_back(node);
    else if (c == PointClass::outer) outer.push_back(node);
  }
  t.inner_count_ = static_cast<Slot>(t.nodes_.size());
  if (t.inner_count_ == 0) throw Error("tube", "no grid point lies inside the inner tube");
  if (t.nodes_.size() + outer.size() > std::size_t(std::numeric_limits<Slot>::max()))
    throw Error("tube", "tube too large for 32-bit slots");
  t.nodes_.insert(t.nodes_.end(), outer.begin(), outer.end());

  t.abs_phi_.resize(t.nodes_.size());
  for (std::size_t s = 0; s < t.nodes_.size(); ++s) {
    t.slots_[std::size_t(t.nodes_[s])] = static_cast<Slot>(s);
    t.abs_phi_[s] = std::abs(field.phi(t.nodes_[s]));
  }

  // Inner stencils must stay in the tube and away from the box faces.
  t.stencil_.assign(std::size_t(t.inner_count_) * 3 * 4, kNoSlot);
  for (Slot s = 0; s < t.inner_count_; ++s) {
    const NodeIndex node = t.nodes_[std::size_t(s)];
    if (!t.stencil_ok(node, kStencilRadius)) {
      throw Error("tube", "scheme stencil of inner point " + format_point(g.position(node), g.dim) +
                              " leaves the outer layer; increase R' - R");
    }
    for (int a = 0; a < g.dim; ++a) {
      int k = 0;
      for (int off : {-2, -1, 1, 2})
        t.stencil_[(std::size_t(s) * 3 + std::size_t(a)) * 4 + std::size_t(k++)] = t.neighbor(s, a, off);
    }
  }
  return t;
}

bool TubeGrid::stencil_ok(NodeIndex node, int radius) const {
  const auto idx = grid_.multi(node);
  const auto st = grid_.strides();
  for (int a = 0; a < grid_.dim; ++a) {
    for (int off = -radius; off <= radius; ++off) {
      const int j = idx[a] + off;
      if (j < 0 || j >= grid_.size[a]) return false;
      if (point_class(node + off * st[a]) == PointClass::exterior) return false;
    }
  }
  return true;
}

Slot TubeGrid::neighbor(Slot s, int axis, int offset) const {
  const NodeIndex node = nodes_[std::size_t(s)];
  const auto idx = grid_.multi(node);
  const int j = idx[axis] + offset;
  if (j < 0 || j >= grid_.size[axis]) return kNoSlot;
  return slots_[std::size_t(node + offset * grid_.strides()[axis])];
}

std::vector<Vec3> closest_points(const LevelSetField& field, const TubeGrid& tube) {
  std::vector<Vec3> p(std::size_t(tube.size()));
  for (Slot s = 0; s < tube.size(); ++s)
    p[std::size_t(s)] = field.closest_point(tube.grid().position(tube.node(s)));
  return p;
}

}  // namespace surfcl
