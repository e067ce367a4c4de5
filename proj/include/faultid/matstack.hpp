#pragma once

// Dense block-structured matrix kernel: Hankel/Toeplitz/observability
// builders, rank-revealing decompositions, nullspaces, minimum-norm least
// squares and subspace geometry.

#include <iosfwd>
#include <limits>
#include <vector>

#include "faultid/types.hpp"

namespace faultid {

/// How a singular-value spectrum is split into signal and negligible parts.
struct RankPolicy {
  enum class Kind { Absolute, Relative, Gap };

  Kind kind = Kind::Relative;
  /// Absolute threshold, or multiplier of sigma_1 for Relative.
  double value = 1e-8;
  /// Gap policy: smallest sigma_i / sigma_{i+1} that counts as a gap.
  double min_ratio = 10.0;

  static RankPolicy absolute(double threshold) {
    return {Kind::Absolute, threshold, 10.0};
  }
  static RankPolicy relative(double factor) {
    return {Kind::Relative, factor, 10.0};
  }
  static RankPolicy gap(double min_ratio = 10.0) {
    return {Kind::Gap, 0.0, min_ratio};
  }
};

struct RankReport {
  std::vector<double> singular_values;  // nonincreasing
  Eigen::Index rank = 0;
  double tolerance_used = 0.0;
  /// sigma_rank / sigma_{rank+1}; +inf when the split is exact.
  double gap_ratio = std::numeric_limits<double>::infinity();
};

/// Matrix with orthonormal columns spanning a subspace of R^ambient_dim.
class SubspaceBasis {
 public:
  SubspaceBasis() = default;
  /// Takes `basis` as is; columns must already be orthonormal (checked).
  explicit SubspaceBasis(Matrix basis);
  /// The empty subspace of R^ambient.
  static SubspaceBasis empty(Eigen::Index ambient);
  /// Orthonormal basis for range(m), rank decided by `policy`.
  static SubspaceBasis range_of(const Matrix& m,
                                const RankPolicy& policy = RankPolicy::relative(1e-10));

  const Matrix& basis() const { return basis_; }
  Eigen::Index ambient_dim() const { return basis_.rows(); }
  Eigen::Index dim() const { return basis_.cols(); }

 private:
  Matrix basis_;
};

/// Thin or full SVD with the sign convention: the first entry of each left
/// singular vector with magnitude above 1e-12 is positive (the matching right
/// vector flips with it).
struct Svd {
  Matrix U;
  Vector S;
  Matrix V;
};
Svd svd(const Matrix& m, bool full_v = false);

/// Flips each column so its first significant entry is positive.
void fix_column_signs(Matrix& m);

/// (s*dim) x N block Hankel matrix with block (i,j) = signal(:, i+j).
Matrix block_hankel(const Matrix& signal, Eigen::Index depth, Eigen::Index width);
Matrix block_hankel(const Trajectory& signal, Eigen::Index depth, Eigen::Index width);

/// [C; CA; ...; CA^{s-1}].
Matrix extended_observability(const Matrix& A, const Matrix& C, Eigen::Index s);

/// Lower block-triangular impulse matrix with D on the diagonal and
/// C A^{k-1} B on the k-th block subdiagonal.
Matrix block_toeplitz(const Matrix& A, const Matrix& B, const Matrix& C,
                      const Matrix& D, Eigen::Index s);

/// Threshold that `policy` selects for a nonincreasing spectrum.
RankReport classify_spectrum(std::vector<double> singular_values,
                             const RankPolicy& policy);

RankReport numerical_rank(const Matrix& m, const RankPolicy& policy);

/// Orthonormal right-nullspace basis; singular values <= tol * sigma_1 count
/// as zero.
SubspaceBasis nullspace_basis(const Matrix& m, double tol);
SubspaceBasis nullspace_basis(const Matrix& m, const RankPolicy& policy);

/// argmin ||A X - B||_F, minimum Frobenius norm among minimizers.
Matrix min_norm_lsq(const Matrix& A, const Matrix& B);

/// Principal angles in [0, pi/2], nonincreasing, min(dim U, dim V) of them.
/// Small angles are taken from sines so they stay accurate near zero.
std::vector<double> principal_angles(const SubspaceBasis& U, const SubspaceBasis& V);

/// 100 * sqrt(sum theta_i^2) / (sqrt(k) * pi / 2) for equal-dimension
/// subspaces with 2k <= ambient.
double grassmann_error(const SubspaceBasis& U, const SubspaceBasis& V);

/// Same normalization as grassmann_error, but dimensions may differ: measures
/// how far the smaller subspace is from lying inside the larger one.
double containment_error(const SubspaceBasis& U, const SubspaceBasis& V);

/// numerical_rank(M1) == numerical_rank(M2) == numerical_rank([M1 M2]), all
/// with threshold tol * sigma_1([M1 M2]).
bool range_equal(const Matrix& M1, const Matrix& M2, double tol);

/// Distance of b's columns from range(a): ||(I - P_a) b||_F / ||b||_F.
double projection_residual(const Matrix& a, const Matrix& b);

// CSV matrix format: "rows,cols" header, then one comma-separated row per line.
void write_matrix_csv(std::ostream& out, const Matrix& m);
Matrix read_matrix_csv(std::istream& in);

/// Shortest round-trip decimal form, locale independent.
std::string format_double(double x);
/// Locale-independent parse; throws std::invalid_argument on junk.
double parse_double(std::string_view text);

}  // namespace faultid
