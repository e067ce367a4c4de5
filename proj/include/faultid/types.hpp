#pragma once

#include <Eigen/Dense>
#include <string_view>

namespace faultid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Which physical signal a trajectory carries.
enum class Role { Input, Output, Fault, Noise, State, Residual };

std::string_view to_string(Role role);

/// Finite, time-indexed sequence of real vectors. Column k holds sample k.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(Role role, Matrix samples);

  /// dim x length zero trajectory.
  static Trajectory zeros(Role role, Eigen::Index dim, Eigen::Index length);

  Role role() const { return role_; }
  Eigen::Index dim() const { return samples_.rows(); }
  Eigen::Index length() const { return samples_.cols(); }

  const Matrix& samples() const { return samples_; }
  auto at(Eigen::Index k) const { return samples_.col(k); }

 private:
  Role role_ = Role::Input;
  Matrix samples_;
};

/// Throws DimensionError when any entry is NaN or infinite.
void require_finite(const Matrix& m, std::string_view what);

}  // namespace faultid
