#include "faultid/matstack.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "faultid/errors.hpp"

namespace faultid {

namespace {

// Singular values below this fraction of sigma_1 are roundoff; the gap
// policy treats them as equal so ratios among them never win.
constexpr double kRoundoffFloor = 1e-13;

// Jacobi is the more accurate choice; divide-and-conquer once it gets slow.
constexpr Eigen::Index kJacobiLimit = 64;

std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Vector singular_values_of(const Matrix& m) {
  if (std::min(m.rows(), m.cols()) <= kJacobiLimit) {
    return Eigen::JacobiSVD<Matrix>(m).singularValues();
  }
  return Eigen::BDCSVD<Matrix>(m).singularValues();
}

Eigen::Index first_significant(const Eigen::Ref<const Vector>& col) {
  const double scale = col.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    if (std::abs(col(i)) > 1e-12 * std::max(scale, 1e-300)) return i;
  }
  return -1;
}

}  // namespace

SubspaceBasis::SubspaceBasis(Matrix basis) : basis_(std::move(basis)) {
  require_finite(basis_, "SubspaceBasis");
  if (basis_.cols() > basis_.rows()) {
    throw DimensionError("SubspaceBasis: more columns than ambient dimension");
  }
  if (basis_.cols() > 0) {
    const Matrix gram = basis_.transpose() * basis_;
    const Matrix eye = Matrix::Identity(basis_.cols(), basis_.cols());
    if ((gram - eye).cwiseAbs().maxCoeff() > 1e-10) {
      throw DimensionError("SubspaceBasis: columns are not orthonormal");
    }
  }
}

SubspaceBasis SubspaceBasis::empty(Eigen::Index ambient) {
  return SubspaceBasis(Matrix(ambient, 0));
}

SubspaceBasis SubspaceBasis::range_of(const Matrix& m, const RankPolicy& policy) {
  if (m.size() == 0) return empty(m.rows());
  const Svd d = svd(m);
  const RankReport rank = classify_spectrum(to_std(d.S), policy);
  return SubspaceBasis(d.U.leftCols(rank.rank));
}

void fix_column_signs(Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const Eigen::Index i = first_significant(m.col(j));
    if (i >= 0 && m(i, j) < 0) m.col(j) *= -1.0;
  }
}

Svd svd(const Matrix& m, bool full_v) {
  require_finite(m, "svd");
  Svd out;
  const unsigned opts =
      Eigen::ComputeThinU | (full_v ? Eigen::ComputeFullV : Eigen::ComputeThinV);
  if (std::min(m.rows(), m.cols()) <= kJacobiLimit) {
    Eigen::JacobiSVD<Matrix> d(m, opts);
    out = {d.matrixU(), d.singularValues(), d.matrixV()};
  } else {
    Eigen::BDCSVD<Matrix> d(m, opts);
    out = {d.matrixU(), d.singularValues(), d.matrixV()};
  }
  const Eigen::Index k = out.S.size();
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index i = first_significant(out.U.col(j));
    if (i >= 0 && out.U(i, j) < 0) {
      out.U.col(j) *= -1.0;
      out.V.col(j) *= -1.0;
    }
  }
  for (Eigen::Index j = k; j < out.V.cols(); ++j) {
    const Eigen::Index i = first_significant(out.V.col(j));
    if (i >= 0 && out.V(i, j) < 0) out.V.col(j) *= -1.0;
  }
  return out;
}

Matrix block_hankel(const Matrix& signal, Eigen::Index depth, Eigen::Index width) {
  if (depth < 1 || width < 1) {
    throw DimensionError("block_hankel: depth and width must be >= 1");
  }
  const Eigen::Index needed = depth + width - 1;
  if (signal.cols() < needed) {
    throw LengthError("block_hankel", needed, signal.cols());
  }
  const Eigen::Index dim = signal.rows();
  Matrix h(depth * dim, width);
  for (Eigen::Index i = 0; i < depth; ++i) {
    h.middleRows(i * dim, dim) = signal.middleCols(i, width);
  }
  return h;
}

Matrix block_hankel(const Trajectory& signal, Eigen::Index depth, Eigen::Index width) {
  return block_hankel(signal.samples(), depth, width);
}

Matrix extended_observability(const Matrix& A, const Matrix& C, Eigen::Index s) {
  if (A.rows() != A.cols() || C.cols() != A.rows()) {
    throw DimensionError("extended_observability: A must be n x n and C p x n");
  }
  if (s < 1) throw DimensionError("extended_observability: s must be >= 1");
  const Eigen::Index p = C.rows();
  Matrix O(s * p, A.cols());
  Matrix block = C;
  for (Eigen::Index i = 0; i < s; ++i) {
    O.middleRows(i * p, p) = block;
    block = block * A;
  }
  return O;
}

Matrix block_toeplitz(const Matrix& A, const Matrix& B, const Matrix& C,
                      const Matrix& D, Eigen::Index s) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || C.cols() != n || D.rows() != C.rows() ||
      D.cols() != B.cols()) {
    throw DimensionError("block_toeplitz: nonconformable (A, B, C, D)");
  }
  if (s < 1) throw DimensionError("block_toeplitz: s must be >= 1");
  const Eigen::Index p = C.rows();
  const Eigen::Index m = B.cols();
  // markov[k] is the k-th block subdiagonal.
  std::vector<Matrix> markov;
  markov.reserve(static_cast<std::size_t>(s));
  markov.push_back(D);
  Matrix AkB = B;
  for (Eigen::Index k = 1; k < s; ++k) {
    markov.push_back(C * AkB);
    AkB = A * AkB;
  }
  Matrix T = Matrix::Zero(s * p, s * m);
  for (Eigen::Index i = 0; i < s; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      T.block(i * p, j * m, p, m) = markov[static_cast<std::size_t>(i - j)];
    }
  }
  return T;
}

RankReport classify_spectrum(std::vector<double> sv, const RankPolicy& policy) {
  RankReport report;
  std::sort(sv.begin(), sv.end(), std::greater<>());
  report.singular_values = sv;
  const auto k = static_cast<Eigen::Index>(sv.size());
  if (k == 0 || !(sv.front() > 0.0)) {
    report.rank = 0;
    report.tolerance_used = 0.0;
    return report;
  }

  auto finish = [&](double threshold) {
    report.tolerance_used = threshold;
    report.rank = std::count_if(sv.begin(), sv.end(),
                                [&](double s) { return s > threshold; });
    if (report.rank < k) {
      const double next = sv[static_cast<std::size_t>(report.rank)];
      report.gap_ratio = report.rank == 0 ? 0.0
                         : next > 0.0
                             ? sv[static_cast<std::size_t>(report.rank - 1)] / next
                             : std::numeric_limits<double>::infinity();
    }
    return report;
  };

  switch (policy.kind) {
    case RankPolicy::Kind::Absolute:
      return finish(policy.value);
    case RankPolicy::Kind::Relative:
      return finish(policy.value * sv.front());
    case RankPolicy::Kind::Gap:
      break;
  }

  const double floor = kRoundoffFloor * sv.front();
  double best_ratio = 0.0;
  Eigen::Index best = k;
  for (Eigen::Index i = 0; i + 1 < k; ++i) {
    const double hi = std::max(sv[static_cast<std::size_t>(i)], floor);
    const double lo = std::max(sv[static_cast<std::size_t>(i + 1)], floor);
    const double ratio = hi / lo;
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = i + 1;
    }
  }
  if (best_ratio < policy.min_ratio) {
    // No qualifying gap: every value is signal.
    report.rank = k;
    report.tolerance_used = 0.0;
    return report;
  }
  const double hi = sv[static_cast<std::size_t>(best - 1)];
  const double lo = std::max(sv[static_cast<std::size_t>(best)], floor);
  return finish(std::sqrt(hi * lo));
}

RankReport numerical_rank(const Matrix& m, const RankPolicy& policy) {
  if (m.size() == 0) throw DimensionError("numerical_rank: empty matrix");
  require_finite(m, "numerical_rank");
  return classify_spectrum(to_std(singular_values_of(m)), policy);
}

SubspaceBasis nullspace_basis(const Matrix& m, const RankPolicy& policy) {
  if (m.size() == 0) throw DimensionError("nullspace_basis: empty matrix");
  const Svd d = svd(m, /*full_v=*/true);
  std::vector<double> spectrum = to_std(d.S);
  // Wide matrices: the missing singular values are exact zeros.
  spectrum.resize(static_cast<std::size_t>(m.cols()), 0.0);
  const RankReport r = classify_spectrum(spectrum, policy);
  Matrix basis = d.V.rightCols(m.cols() - r.rank);
  fix_column_signs(basis);
  return SubspaceBasis(std::move(basis));
}

SubspaceBasis nullspace_basis(const Matrix& m, double tol) {
  return nullspace_basis(m, RankPolicy::relative(tol));
}

Matrix min_norm_lsq(const Matrix& A, const Matrix& B) {
  if (A.rows() != B.rows()) {
    throw DimensionError("min_norm_lsq: A and B must have equal row counts");
  }
  if (A.cols() == 0) return Matrix(0, B.cols());
  if (A.rows() == 0) return Matrix::Zero(A.cols(), B.cols());
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A);
  cod.setThreshold(1e-12);
  return cod.solve(B);
}

std::vector<double> principal_angles(const SubspaceBasis& U, const SubspaceBasis& V) {
  if (U.ambient_dim() != V.ambient_dim()) {
    throw DimensionError("principal_angles: ambient dimensions differ");
  }
  const bool u_larger = U.dim() >= V.dim();
  const Matrix& X = u_larger ? U.basis() : V.basis();
  const Matrix& Y = u_larger ? V.basis() : U.basis();
  const Eigen::Index k = Y.cols();
  if (k == 0) return {};

  const Matrix XtY = X.transpose() * Y;
  const Vector cosines = singular_values_of(XtY);  // descending
  const Matrix residual = Y - X * XtY;
  const Vector sines = singular_values_of(residual);  // descending

  std::vector<double> angles(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) {
    // i-th smallest angle pairs the i-th largest cosine with the i-th smallest sine.
    const double c = std::min(cosines(i), 1.0);
    const double s = std::min(sines(k - 1 - i), 1.0);
    angles[static_cast<std::size_t>(i)] = c * c >= 0.5 ? std::asin(s) : std::acos(c);
  }
  std::sort(angles.begin(), angles.end(), std::greater<>());
  return angles;
}

namespace {

double normalized_angle_norm(const std::vector<double>& angles, Eigen::Index k) {
  double sum = 0.0;
  for (double a : angles) sum += a * a;
  return 100.0 * std::sqrt(sum) /
         (std::sqrt(static_cast<double>(k)) * std::numbers::pi / 2.0);
}

}  // namespace

double grassmann_error(const SubspaceBasis& U, const SubspaceBasis& V) {
  if (U.ambient_dim() != V.ambient_dim() || U.dim() != V.dim()) {
    throw DimensionError("grassmann_error: subspaces must share ambient and dimension");
  }
  const Eigen::Index k = U.dim();
  if (k == 0) throw DimensionError("grassmann_error: empty subspaces");
  if (2 * k > U.ambient_dim()) {
    throw DimensionError(
        "grassmann_error: normalization undefined when 2k exceeds the ambient "
        "dimension");
  }
  return normalized_angle_norm(principal_angles(U, V), k);
}

double containment_error(const SubspaceBasis& U, const SubspaceBasis& V) {
  if (U.ambient_dim() != V.ambient_dim()) {
    throw DimensionError("containment_error: ambient dimensions differ");
  }
  const Eigen::Index k = std::min(U.dim(), V.dim());
  if (k == 0) throw DimensionError("containment_error: empty subspace");
  return normalized_angle_norm(principal_angles(U, V), k);
}

bool range_equal(const Matrix& M1, const Matrix& M2, double tol) {
  if (M1.rows() != M2.rows()) {
    throw DimensionError("range_equal: row counts differ");
  }
  Matrix joint(M1.rows(), M1.cols() + M2.cols());
  joint << M1, M2;
  if (joint.size() == 0) return true;
  const Vector sj = singular_values_of(joint);
  const double threshold = tol * (sj.size() > 0 ? sj(0) : 0.0);
  auto rank_of = [&](const Matrix& m) -> Eigen::Index {
    if (m.size() == 0) return 0;
    const Vector s = singular_values_of(m);
    return (s.array() > threshold).count();
  };
  const Eigen::Index rj = (sj.array() > threshold).count();
  return rank_of(M1) == rj && rank_of(M2) == rj;
}

double projection_residual(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("projection_residual: row counts differ");
  }
  const double nb = b.norm();
  if (nb == 0.0) return 0.0;
  const SubspaceBasis q = SubspaceBasis::range_of(a);
  const Matrix r = b - q.basis() * (q.basis().transpose() * b);
  return r.norm() / nb;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
    text.remove_prefix(1);
  }
  while (!text.empty() &&
         (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("not a decimal number: '" + std::string(text) + "'");
  }
  return value;
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  out << m.rows() << ',' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    fields.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

long parse_count(std::string_view text) {
  const double v = parse_double(text);
  if (v < 0 || v != std::floor(v)) {
    throw std::invalid_argument("not a count: '" + std::string(text) + "'");
  }
  return static_cast<long>(v);
}

}  // namespace

Matrix read_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("matrix csv: missing 'rows,cols' header");
  }
  const auto header = split_commas(line);
  if (header.size() != 2) {
    throw std::invalid_argument("matrix csv: header must be 'rows,cols'");
  }
  const long rows = parse_count(header[0]);
  const long cols = parse_count(header[1]);
  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) {
      throw std::invalid_argument("matrix csv: expected " + std::to_string(rows) +
                                  " rows, got " + std::to_string(i));
    }
    const auto fields = split_commas(line);
    if (static_cast<long>(fields.size()) != cols && !(cols == 0 && fields.size() == 1)) {
      throw std::invalid_argument("matrix csv: row " + std::to_string(i) + " has " +
                                  std::to_string(fields.size()) + " entries, expected " +
                                  std::to_string(cols));
    }
    for (long j = 0; j < cols; ++j) m(i, j) = parse_double(fields[static_cast<std::size_t>(j)]);
  }
  require_finite(m, "matrix csv");
  return m;
}

}  // namespace faultid
