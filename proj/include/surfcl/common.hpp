#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace surfcl {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Grid nodes are addressed by a linear index into the dense box; tube points
// by a compact slot into the inner+outer storage.
using NodeIndex = std::int64_t;
using Slot = std::int32_t;
inline constexpr Slot kNoSlot = -1;

// Every failure carries the module that raised it so the CLI can name it.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& message)
      : std::runtime_error(module + ": " + message), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

std::string format_point(const Vec3& x, int dim);

}  // namespace surfcl
