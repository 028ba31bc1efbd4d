#include "surfcl/pushforward.hpp"

#include <cmath>
#include <sstream>

namespace surfcl {

EmbeddingMode parse_embedding_mode(const std::string& text) {
  if (text == "pushforward") return EmbeddingMode::pushforward;
  if (text == "straightforward") return EmbeddingMode::straightforward;
  throw Error("pushforward", "unknown embedding mode '" + text + "' (pushforward|straightforward)");
}

std::string to_string(EmbeddingMode mode) {
  return mode == EmbeddingMode::pushforward ? "pushforward" : "straightforward";
}

Mat3 pushforward_matrix(double phi, const Mat3& hessian, int dim) {
  Mat3 a = Mat3::Identity() - phi * hessian;
  Mat3 inv = Mat3::Identity();
  double det = 0.0;
  if (dim == 2) {
    det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    if (std::abs(det) >= kSingularDeterminant) {
      inv(0, 0) = a(1, 1) / det;
      inv(0, 1) = -a(0, 1) / det;
      inv(1, 0) = -a(1, 0) / det;
      inv(1, 1) = a(0, 0) / det;
    }
  } else {
    Mat3 adj;
    adj(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
    adj(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
    adj(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
    adj(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
    adj(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
    adj(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
    adj(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
    adj(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
    adj(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    det = a(0, 0) * adj(0, 0) + a(0, 1) * adj(1, 0) + a(0, 2) * adj(2, 0);
    if (std::abs(det) >= kSingularDeterminant) inv = adj / det;
  }
  if (!(std::abs(det) >= kSingularDeterminant)) {
    std::ostringstream os;
    os << "I - phi H is near-singular (det = " << det << ", phi = " << phi
       << "); the tube radius exceeds the reach of the interface";
    throw Error("pushforward", os.str());
  }
  return inv;
}

PushForwardField PushForwardField::build(const LevelSetField& field, const TubeGrid& tube, EmbeddingMode mode) {
  PushForwardField pf;
  pf.mode_ = mode;
  pf.dim_ = tube.dim();
  pf.m_.assign(std::size_t(tube.size()), Mat3::Identity());
  if (mode == EmbeddingMode::straightforward) return pf;
  for (Slot s = 0; s < tube.size(); ++s) {
    const NodeIndex node = tube.node(s);
    try {
      pf.m_[std::size_t(s)] = pushforward_matrix(field.phi(node), field.hessian(node), pf.dim_);
    } catch (const Error& e) {
      throw Error("pushforward", std::string(e.what()) + " at " + format_point(tube.grid().position(node), pf.dim_));
    }
  }
  return pf;
}

Vec3 embed_flux(const PushForwardField& pf, const SurfaceFlux& flux, Slot s, const Vec3& closest, double u) {
  return pf.matrix(s) * flux(closest, u);
}

Vec3 embed_velocity(const PushForwardField& pf, const SurfaceVelocity& velocity, Slot s, const Vec3& closest) {
  return pf.matrix(s) * velocity(closest);
}

std::vector<Vec3> embed_directions(const PushForwardField& pf, const std::function<Vec3(const Vec3&)>& direction,
                                   std::span<const Vec3> closest) {
  if (closest.size() != std::size_t(pf.size())) throw Error("pushforward", "closest-point table does not match the tube");
  std::vector<Vec3> out(closest.size());
  for (std::size_t s = 0; s < closest.size(); ++s) out[s] = pf.matrix(Slot(s)) * direction(closest[s]);
  return out;
}

}  // namespace surfcl
