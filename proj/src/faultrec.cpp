#include "faultid/faultrec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "faultid/errors.hpp"

namespace faultid {

Matrix residual_hankel(const Trajectory& y, const Trajectory& u, const StateSpace& sys,
                       Eigen::Index s) {
  sys.validate();
  if (y.length() != u.length()) throw DimensionError("residual_hankel: y and u lengths differ");
  if (y.dim() != sys.ny() || u.dim() != sys.nu()) {
    throw DimensionError("residual_hankel: signal dimensions do not match the system");
  }
  if (s < 1) throw DimensionError("residual_hankel: s must be >= 1");
  if (y.length() < s) throw LengthError("residual_hankel", s, y.length());
  const Eigen::Index N = y.length() - s + 1;
  return block_hankel(y, s, N) -
         block_toeplitz(sys.A, sys.B, sys.C, sys.D, s) * block_hankel(u, s, N);
}

FaultDimEstimate estimate_fault_dim(const Matrix& R_s, const Matrix& R_s1,
                                    const RankPolicy& policy) {
  FaultDimEstimate out;
  out.rank_s_plus_1 = numerical_rank(R_s1, policy);
  out.threshold = out.rank_s_plus_1.tolerance_used;
  out.rank_s = numerical_rank(R_s, RankPolicy::absolute(out.threshold));
  out.n_v = out.rank_s_plus_1.rank - out.rank_s.rank;
  if (out.n_v < 0) {
    throw NumericalError("estimate_fault_dim: rank(R_{s+1}) = " +
                         std::to_string(out.rank_s_plus_1.rank) + " < rank(R_s) = " +
                         std::to_string(out.rank_s.rank) + "; inconsistent rank policy");
  }
  return out;
}

FaultDimEstimate estimate_fault_dim(const Trajectory& y, const Trajectory& u,
                                    const StateSpace& sys, Eigen::Index s,
                                    const RankPolicy& policy) {
  return estimate_fault_dim(residual_hankel(y, u, sys, s),
                            residual_hankel(y, u, sys, s + 1), policy);
}

bool verify_rank_formula(const Matrix& A, const Matrix& F, const Matrix& C,
                         const Matrix& G, Eigen::Index s, double tol) {
  const ZeroReport zr = transmission_zeros(A, F, C, G);
  if (!zr.left_invertible()) {
    throw NumericalError("verify_rank_formula: channel is not left invertible");
  }
  const Matrix O = extended_observability(A, C, s);
  const Matrix Tf = block_toeplitz(A, F, C, G, s);
  Matrix OT(O.rows(), O.cols() + Tf.cols());
  OT << O, Tf;
  const Eigen::Index expected = A.rows() + s * F.cols() - zr.zeta;
  return numerical_rank(OT, RankPolicy::relative(tol)).rank == expected;
}

Matrix FaultRecovery::stacked() const {
  Matrix FG(F_hat.rows() + G_hat.rows(), F_hat.cols());
  FG << F_hat, G_hat;
  return FG;
}

Matrix recovery_constraints(const Matrix& Q, const Matrix& A, const Matrix& C,
                            Eigen::Index s) {
  const Eigen::Index p = C.rows(), n = A.rows(), r = Q.cols();
  if (s < 2) throw DimensionError("recovery_constraints: s must be >= 2");
  if (Q.rows() != s * p) throw DimensionError("recovery_constraints: Q must have s * n_y rows");
  auto Qi = [&](Eigen::Index i) { return Q.middleRows(i * p, p); };

  const Eigen::Index pairs = s * (s - 1) / 2;
  Matrix M = Matrix::Zero((2 * pairs + (s - 1)) * p, s * r + n);
  Eigen::Index row = 0;
  // Blocks above the diagonal of the fault Toeplitz matrix vanish.
  for (Eigen::Index i = 0; i < s; ++i) {
    for (Eigen::Index j = i + 1; j < s; ++j) {
      M.block(row, j * r, p, r) = Qi(i);
      row += p;
    }
  }
  // Toeplitz structure: block (i, j) equals block (i+1, j+1).
  for (Eigen::Index i = 0; i + 1 < s; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      M.block(row, j * r, p, r) = Qi(i);
      M.block(row, (j + 1) * r, p, r) -= Qi(i + 1);
      row += p;
    }
  }
  // First block column below G is O_{s-1} F.
  M.block(row, s * r, (s - 1) * p, n) = extended_observability(A, C, s - 1);
  M.block(row, 0, (s - 1) * p, r) = -Q.bottomRows((s - 1) * p);
  return M;
}

FaultRecovery recover_fault_matrices(const Matrix& R_s, const StateSpace& sys,
                                     Eigen::Index s, const RankPolicy& range_policy,
                                     const RankPolicy& null_policy) {
  sys.validate();
  const Eigen::Index n = sys.nx(), p = sys.ny();
  if (R_s.rows() != s * p) throw DimensionError("recover_fault_matrices: R_s must have s * n_y rows");

  FaultRecovery out;
  out.window_s = s;
  out.Q = SubspaceBasis::range_of(R_s, range_policy);
  const Eigen::Index r = out.Q.dim();
  out.rank_s = r;

  const Matrix M = recovery_constraints(out.Q.basis(), sys.A, sys.C, s);
  const SubspaceBasis null = nullspace_basis(M, null_policy);
  out.singular_values_M = numerical_rank(M, null_policy).singular_values;
  out.singular_values_M.resize(static_cast<std::size_t>(M.cols()), 0.0);
  if (null.dim() == 0) {
    throw NumericalError("recover_fault_matrices: constraint nullspace is empty (n_z = 0)");
  }

  Matrix raw(n + p, null.dim());
  raw << null.basis().bottomRows(n), out.Q.basis().topRows(p) * null.basis().topRows(r);
  const Svd d = svd(raw);
  const Eigen::Index nz = (d.S.array() > 1e-12 * d.S(0)).count();
  if (nz == 0) throw NumericalError("recover_fault_matrices: recovered [F; G] is zero");
  out.n_z = nz;
  out.F_hat = d.U.topLeftCorner(n, nz);
  out.G_hat = d.U.bottomLeftCorner(p, nz);
  return out;
}

FaultRecovery recover_from_data(const Trajectory& y, const Trajectory& u,
                                const StateSpace& sys, Eigen::Index s,
                                const RecoveryOptions& options) {
  const Matrix R_s = residual_hankel(y, u, sys, s);
  const FaultDimEstimate est =
      estimate_fault_dim(R_s, residual_hankel(y, u, sys, s + 1), options.rank_policy);
  FaultRecovery out = recover_fault_matrices(R_s, sys, s, RankPolicy::absolute(est.threshold),
                                             options.null_policy);
  out.n_v_estimate = est.n_v;
  out.rank_s = est.rank_s.rank;
  out.rank_s_plus_1 = est.rank_s_plus_1.rank;
  out.singular_values_s = est.rank_s.singular_values;
  out.singular_values_s_plus_1 = est.rank_s_plus_1.singular_values;
  return out;
}

bool behaviorally_equivalent(const Matrix& A, const Matrix& C, const FaultPair& fg1,
                             const FaultPair& fg2, double tol) {
  const Eigen::Index n = A.rows(), p = C.rows();
  for (const FaultPair* fg : {&fg1, &fg2}) {
    if (fg->F.rows() != n || fg->G.rows() != p || fg->F.cols() != fg->G.cols()) {
      throw DimensionError("behaviorally_equivalent: fault pair does not conform to (A, C)");
    }
  }
  const Eigen::Index s = n + 1;
  const Matrix O = extended_observability(A, C, s);
  auto joint = [&](const FaultPair& fg) {
    const Matrix Tf = block_toeplitz(A, fg.F, C, fg.G, s);
    Matrix out(O.rows(), O.cols() + Tf.cols());
    out << O, Tf;
    return out;
  };
  return range_equal(joint(fg1), joint(fg2), tol);
}

std::string_view to_string(Representative policy) {
  switch (policy) {
    case Representative::Leading: return "leading";
    case Representative::SparseG: return "sparse-G";
    case Representative::SparseF: return "sparse-F";
  }
  return "leading";
}

Representative parse_representative(std::string_view name) {
  if (name == "leading") return Representative::Leading;
  if (name == "sparse-G") return Representative::SparseG;
  if (name == "sparse-F") return Representative::SparseF;
  throw std::invalid_argument("unknown representative policy '" + std::string(name) +
                              "' (expected leading, sparse-G or sparse-F)");
}

FaultPair select_representative(const FaultRecovery& fr, Representative policy,
                                Eigen::Index n_v, double structure_tol) {
  if (n_v < 1 || n_v > fr.n_z) {
    throw NumericalError("select_representative: need 1 <= n_v <= n_z, got n_v = " +
                         std::to_string(n_v) + ", n_z = " + std::to_string(fr.n_z));
  }
  const Matrix S = fr.stacked();
  Matrix P = Matrix::Identity(fr.n_z, n_v);
  if (n_v < fr.n_z && policy != Representative::Leading) {
    const Matrix& part = policy == Representative::SparseG ? fr.G_hat : fr.F_hat;
    const Svd d = svd(part, /*full_v=*/true);
    Vector sv = Vector::Zero(fr.n_z);
    sv.head(d.S.size()) = d.S;
    const double worst = sv(fr.n_z - n_v);
    if (worst > structure_tol) {
      throw NumericalError(std::string("select_representative: no ") + std::to_string(n_v) +
                           "-dimensional direction with negligible " +
                           (policy == Representative::SparseG ? "G" : "F") +
                           " part (smallest achievable " + format_double(worst) + ")");
    }
    P = d.V.rightCols(n_v);
  }
  Matrix FG = S * P;
  for (Eigen::Index j = 0; j < FG.cols(); ++j) FG.col(j).normalize();
  fix_column_signs(FG);
  return FaultPair::from_stacked(FG, fr.F_hat.rows());
}

FaultPair select_representative(const FaultRecovery& fr, Representative policy) {
  return select_representative(fr, policy, fr.n_v_estimate);
}

FaultReconstruction reconstruct_fault(const Trajectory& y, const Trajectory& u,
                                      const StateSpace& sys, const FaultPair& fg,
                                      const Vector& x_tilde_0) {
  sys.validate();
  fg.validate(sys);
  const Eigen::Index T = y.length(), n = sys.nx(), p = sys.ny(), m = fg.nv();
  if (u.length() != T) throw DimensionError("reconstruct_fault: y and u lengths differ");
  if (y.dim() != p || u.dim() != sys.nu() || x_tilde_0.size() != n) {
    throw DimensionError("reconstruct_fault: signal dimensions do not match the system");
  }

  Matrix x_tilde(n, T + 1);
  Matrix r(p, T);
  x_tilde.col(0) = x_tilde_0;
  for (Eigen::Index k = 0; k < T; ++k) {
    r.col(k) = y.at(k) - sys.C * x_tilde.col(k) - sys.D * u.at(k);
    x_tilde.col(k + 1) = sys.A * x_tilde.col(k) + sys.B * u.at(k);
  }

  Matrix phi(T * p, n + T * m);
  phi << extended_observability(sys.A, sys.C, T), block_toeplitz(sys.A, fg.F, sys.C, fg.G, T);
  const Vector rv = r.reshaped();
  const Vector theta = min_norm_lsq(phi, rv);

  FaultReconstruction out;
  out.xi0 = theta.head(n);
  Matrix v = theta.tail(T * m).reshaped(m, T);
  const double rn = rv.norm();
  out.replay_residual = rn > 0.0 ? (rv - phi * theta).norm() / rn : 0.0;

  Matrix x = x_tilde;
  Vector xi = out.xi0;
  for (Eigen::Index k = 0; k <= T; ++k) {
    x.col(k) += xi;
    if (k < T) xi = sys.A * xi + fg.F * v.col(k);
  }
  out.v = Trajectory(Role::Fault, std::move(v));
  out.x_full = Trajectory(Role::State, std::move(x));
  out.residual = Trajectory(Role::Residual, std::move(r));
  return out;
}

std::vector<double> remixed_correlation(const Trajectory& v_hat, const Trajectory& v_true,
                                        Eigen::Index length) {
  Eigen::Index L = std::min(v_hat.length(), v_true.length());
  if (length > 0) L = std::min(L, length);
  if (L < 2) throw LengthError("remixed_correlation", 2, L);
  Matrix X(L, v_hat.dim() + 1);
  X.col(0).setOnes();
  X.rightCols(v_hat.dim()) = v_hat.samples().leftCols(L).transpose();
  std::vector<double> out;
  for (Eigen::Index i = 0; i < v_true.dim(); ++i) {
    const Vector target = v_true.samples().row(i).head(L).transpose();
    const Vector fit = X * min_norm_lsq(X, target);
    const Vector a = target.array() - target.mean();
    const Vector b = fit.array() - fit.mean();
    const double den = a.norm() * b.norm();
    out.push_back(den > 0.0 ? std::abs(a.dot(b)) / den : 0.0);
  }
  return out;
}

}  // namespace faultid
