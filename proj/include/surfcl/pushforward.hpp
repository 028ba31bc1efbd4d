#pragma once

#include "surfcl/tube.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace surfcl {

enum class EmbeddingMode { pushforward, straightforward };

EmbeddingMode parse_embedding_mode(const std::string& text);
std::string to_string(EmbeddingMode mode);

// Surface flux of the separable form F(P, u) = q(u) D(P), with D tangent to
// the interface. Every catalog flux has this form.
struct SurfaceFlux {
  std::function<double(double)> magnitude;             // q(u)
  std::function<double(double)> magnitude_derivative;  // q'(u)
  std::function<Vec3(const Vec3&)> direction;          // D(P)

  Vec3 operator()(const Vec3& p, double u) const { return magnitude(u) * direction(p); }
};

// Tangent velocity field V(P) on the interface.
using SurfaceVelocity = std::function<Vec3(const Vec3&)>;

// [I - phi H]^-1 by closed-form adjugate on the leading dim x dim block; the
// remaining diagonal is set to 1. Throws when |det(I - phi H)| < 1e-8.
Mat3 pushforward_matrix(double phi, const Mat3& hessian, int dim);

inline constexpr double kSingularDeterminant = 1e-8;

class PushForwardField {
 public:
  static PushForwardField build(const LevelSetField& field, const TubeGrid& tube, EmbeddingMode mode);

  EmbeddingMode mode() const { return mode_; }
  int dim() const { return dim_; }
  const Mat3& matrix(Slot s) const { return m_[std::size_t(s)]; }
  Slot size() const { return static_cast<Slot>(m_.size()); }

 private:
  EmbeddingMode mode_ = EmbeddingMode::pushforward;
  int dim_ = 2;
  std::vector<Mat3> m_;
};

// M(x) F(P(x), u).
Vec3 embed_flux(const PushForwardField& pf, const SurfaceFlux& flux, Slot s, const Vec3& closest, double u);

// M(x) V(P(x)).
Vec3 embed_velocity(const PushForwardField& pf, const SurfaceVelocity& velocity, Slot s, const Vec3& closest);

// M(x) D(P(x)) for every slot: the u-independent part of a separable flux, or
// the embedded velocity when `direction` is a velocity field.
std::vector<Vec3> embed_directions(const PushForwardField& pf, const std::function<Vec3(const Vec3&)>& direction,
                                   std::span<const Vec3> closest);

}  // namespace surfcl
