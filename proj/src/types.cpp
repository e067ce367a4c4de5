#include "faultid/types.hpp"

#include <string>

#include "faultid/errors.hpp"

namespace faultid {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::Input: return "input";
    case Role::Output: return "output";
    case Role::Fault: return "fault";
    case Role::Noise: return "noise";
    case Role::State: return "state";
    case Role::Residual: return "residual";
  }
  return "unknown";
}

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw DimensionError(std::string(what) + ": non-finite entry");
  }
}

Trajectory::Trajectory(Role role, Matrix samples)
    : role_(role), samples_(std::move(samples)) {
  require_finite(samples_, "Trajectory");
}

Trajectory Trajectory::zeros(Role role, Eigen::Index dim, Eigen::Index length) {
  return Trajectory(role, Matrix::Zero(dim, length));
}

}  // namespace faultid
