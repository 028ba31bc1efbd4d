#pragma once

#include "surfcl/geometry.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace surfcl {

enum class PointClass : std::uint8_t { exterior = 0, inner = 1, outer = 2 };

// inner: |phi| < R, outer: R <= |phi| < R', exterior otherwise.
PointClass classify(double phi, double inner_radius, double outer_radius);

struct TubeRadii {
  double inner = 0.0;
  double outer = 0.0;

  static TubeRadii from_cells(double dx, double inner_cells = 3.0, double outer_cells = 8.0) {
    return {inner_cells * dx, outer_cells * dx};
  }
};

// Narrow band of a LevelSetField. Tube points are addressed by slots: inner
// points take slots [0, inner_count) and outer points the rest, each group in
// lexicographic node order (x fastest).
class TubeGrid {
 public:
  // Largest scheme stencil radius the tube must support at inner points.
  static constexpr int kStencilRadius = 2;

  static TubeGrid build(const LevelSetField& field, TubeRadii radii);

  const GridSpec& grid() const { return grid_; }
  TubeRadii radii() const { return radii_; }
  int dim() const { return grid_.dim; }

  PointClass point_class(NodeIndex node) const {
    return static_cast<PointClass>(classes_[static_cast<std::size_t>(node)]);
  }
  Slot slot(NodeIndex node) const { return slots_[static_cast<std::size_t>(node)]; }
  NodeIndex node(Slot s) const { return nodes_[static_cast<std::size_t>(s)]; }

  Slot size() const { return static_cast<Slot>(nodes_.size()); }
  Slot inner_count() const { return inner_count_; }
  Slot outer_count() const { return size() - inner_count_; }
  std::span<const NodeIndex> inner_nodes() const { return {nodes_.data(), std::size_t(inner_count_)}; }
  std::span<const NodeIndex> outer_nodes() const {
    return {nodes_.data() + inner_count_, nodes_.size() - std::size_t(inner_count_)};
  }
  bool is_inner(Slot s) const { return s < inner_count_; }

  // True iff every node of the axis-aligned cross of the given radius around
  // `node` is an inner or outer point.
  bool stencil_ok(NodeIndex node, int radius) const;

  // Slot of the node `offset` cells away along `axis`, or kNoSlot.
  Slot neighbor(Slot s, int axis, int offset) const;

  // Precomputed neighbours of inner slots for offsets -2, -1, +1, +2.
  Slot inner_neighbor(Slot s, int axis, int offset) const {
    const int k = offset < 0 ? offset + 2 : offset + 1;
    return stencil_[(std::size_t(s) * 3 + std::size_t(axis)) * 4 + std::size_t(k)];
  }

  // Absolute phi at each slot, cached for the extension sweep ordering.
  double abs_phi(Slot s) const { return abs_phi_[std::size_t(s)]; }

 private:
  GridSpec grid_;
  TubeRadii radii_;
  Slot inner_count_ = 0;
  std::vector<std::uint8_t> classes_;
  std::vector<Slot> slots_;
  std::vector<NodeIndex> nodes_;
  std::vector<double> abs_phi_;
  std::vector<Slot> stencil_;
};

// Exact closest point of every tube slot (closed form or minimizer).
std::vector<Vec3> closest_points(const LevelSetField& field, const TubeGrid& tube);

}  // namespace surfcl
