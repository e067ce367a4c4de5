#pragma once

// Fault-dimension estimation, recovery of the fault-matrix basis (F^, G^) from
// the residual Hankel matrix, output-behavioral equivalence and fault-signal
// reconstruction.

#include <string>
#include <string_view>
#include <vector>

#include "faultid/sysgen.hpp"

namespace faultid {

/// R_{s,N} = Y_{s,N} - T_s U_{s,N}, N = T - s + 1.
Matrix residual_hankel(const Trajectory& y, const Trajectory& u, const StateSpace& sys,
                       Eigen::Index s);

struct FaultDimEstimate {
  Eigen::Index n_v = 0;
  RankReport rank_s;
  RankReport rank_s_plus_1;
  /// Threshold resolved on the R_{s+1} spectrum and applied to both.
  double threshold = 0.0;
};

/// n_v = rank(R_{s+1}) - rank(R_s) with one shared threshold. Throws
/// NumericalError on a negative difference.
FaultDimEstimate estimate_fault_dim(const Trajectory& y, const Trajectory& u,
                                    const StateSpace& sys, Eigen::Index s,
                                    const RankPolicy& policy);
FaultDimEstimate estimate_fault_dim(const Matrix& R_s, const Matrix& R_s1,
                                    const RankPolicy& policy);

/// rank([O_s T_s^f]) == n_x + s n_v - zeta at relative tolerance `tol`. Throws
/// NumericalError when the channel is not left invertible.
bool verify_rank_formula(const Matrix& A, const Matrix& F, const Matrix& C,
                         const Matrix& G, Eigen::Index s, double tol = 1e-8);

struct FaultRecovery {
  /// Orthonormal columns of [F_hat; G_hat], ordered by the singular values of
  /// the raw nullspace solution.
  Matrix F_hat, G_hat;
  Eigen::Index n_z = 0;
  Eigen::Index n_v_estimate = 0;
  Eigen::Index rank_s = 0;
  Eigen::Index rank_s_plus_1 = 0;
  std::vector<double> singular_values_s;
  std::vector<double> singular_values_s_plus_1;
  /// Spectrum of the constraint matrix M, smallest last.
  std::vector<double> singular_values_M;
  Eigen::Index window_s = 0;
  SubspaceBasis Q;

  Matrix stacked() const;
};

/// Solves the structured nullspace problem for (F_hat, G_hat). `range_policy`
/// sizes Q = range(R_s); `null_policy` sizes the nullspace of M. Throws
/// NumericalError when the nullspace is empty.
FaultRecovery recover_fault_matrices(const Matrix& R_s, const StateSpace& sys,
                                     Eigen::Index s, const RankPolicy& range_policy,
                                     const RankPolicy& null_policy);

/// The constraint matrix M in its fixed row order; exposed for tests.
Matrix recovery_constraints(const Matrix& Q, const Matrix& A, const Matrix& C,
                            Eigen::Index s);

struct RecoveryOptions {
  RankPolicy rank_policy = RankPolicy::relative(1e-8);
  RankPolicy null_policy = RankPolicy::relative(1e-8);
};

/// estimate_fault_dim followed by recover_fault_matrices on the same data,
/// with Q sized by the shared threshold.
FaultRecovery recover_from_data(const Trajectory& y, const Trajectory& u,
                                const StateSpace& sys, Eigen::Index s,
                                const RecoveryOptions& options = {});

/// range([O T^f_1]) == range([O T^f_2]) over n_x + 1 block rows.
bool behaviorally_equivalent(const Matrix& A, const Matrix& C, const FaultPair& fg1,
                             const FaultPair& fg2, double tol = 1e-8);

enum class Representative { Leading, SparseG, SparseF };

std::string_view to_string(Representative policy);
Representative parse_representative(std::string_view name);

/// (F_hat P, G_hat P) with n_v columns, each unit norm with its first
/// significant entry positive. SparseG / SparseF throw NumericalError when no
/// n_v-dimensional direction has |G part| (|F part|) below `structure_tol`.
FaultPair select_representative(const FaultRecovery& fr, Representative policy,
                                Eigen::Index n_v, double structure_tol = 1e-2);
FaultPair select_representative(const FaultRecovery& fr, Representative policy);

struct FaultReconstruction {
  Vector xi0;
  Trajectory v;
  /// ||r - O xi0 - T^f v|| / ||r||.
  double replay_residual = 0.0;
  Trajectory x_full;
  Trajectory residual;
};

/// Minimum-norm (xi0, v) from r = y - C x~ - D u over the whole record.
FaultReconstruction reconstruct_fault(const Trajectory& y, const Trajectory& u,
                                      const StateSpace& sys, const FaultPair& fg,
                                      const Vector& x_tilde_0);

/// Per true channel, |corr| between v_true and its best linear fit from
/// v_hat's channels. Samples past `length` (if nonzero) are ignored.
std::vector<double> remixed_correlation(const Trajectory& v_hat, const Trajectory& v_true,
                                        Eigen::Index length = 0);

}  // namespace faultid
