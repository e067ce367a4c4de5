#include "faultid/sysgen.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "faultid/errors.hpp"

namespace faultid {

void StateSpace::validate() const {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || C.cols() != n || D.rows() != C.rows() ||
      D.cols() != B.cols()) {
    throw DimensionError("StateSpace: (A, B, C, D) do not conform");
  }
  require_finite(A, "StateSpace.A");
  require_finite(B, "StateSpace.B");
  require_finite(C, "StateSpace.C");
  require_finite(D, "StateSpace.D");
}

Matrix FaultPair::stacked() const {
  Matrix FG(F.rows() + G.rows(), F.cols());
  FG << F, G;
  return FG;
}

FaultPair FaultPair::from_stacked(const Matrix& FG, Eigen::Index nx) {
  if (nx > FG.rows()) throw DimensionError("FaultPair: stack shorter than n_x");
  return {FG.topRows(nx), FG.bottomRows(FG.rows() - nx)};
}

void FaultPair::validate(const StateSpace& sys) const {
  if (F.rows() != sys.nx() || G.rows() != sys.ny() || F.cols() != G.cols()) {
    throw DimensionError("FaultPair: F must be n_x x n_v and G n_y x n_v");
  }
  require_finite(F, "FaultPair.F");
  require_finite(G, "FaultPair.G");
}

double spectral_radius(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  return Eigen::EigenSolver<Matrix>(A, false).eigenvalues().cwiseAbs().maxCoeff();
}

bool is_stable(const Matrix& A, double margin) {
  return spectral_radius(A) < 1.0 - margin;
}

namespace {

Matrix controllability(const Matrix& A, const Matrix& B) {
  const Eigen::Index n = A.rows();
  Matrix K(n, n * B.cols());
  Matrix block = B;
  for (Eigen::Index i = 0; i < n; ++i) {
    K.middleCols(i * B.cols(), B.cols()) = block;
    block = A * block;
  }
  return K;
}

}  // namespace

bool is_controllable(const Matrix& A, const Matrix& B, double tol) {
  if (A.rows() == 0) return true;
  return numerical_rank(controllability(A, B), RankPolicy::relative(tol)).rank == A.rows();
}

bool is_observable(const Matrix& A, const Matrix& C, double tol) {
  if (A.rows() == 0) return true;
  return numerical_rank(extended_observability(A, C, A.rows()), RankPolicy::relative(tol))
             .rank == A.rows();
}

bool is_minimal(const StateSpace& sys, double tol) {
  return is_controllable(sys.A, sys.B, tol) && is_observable(sys.A, sys.C, tol);
}

SimulationResult simulate(const StateSpace& sys, const FaultPair& fault,
                          const Vector& x0, const Trajectory& u,
                          const Trajectory& v, const std::optional<Trajectory>& w) {
  sys.validate();
  fault.validate(sys);
  const Eigen::Index T = u.length();
  if (v.length() != T || (w && w->length() != T)) {
    throw DimensionError("simulate: u, v and w must have equal lengths");
  }
  if (u.dim() != sys.nu() || v.dim() != fault.nv() || (w && w->dim() != sys.ny())) {
    throw DimensionError("simulate: signal dimensions do not match the system");
  }
  if (x0.size() != sys.nx()) {
    throw DimensionError("simulate: x0 must have n_x entries");
  }

  Matrix x(sys.nx(), T + 1);
  Matrix y(sys.ny(), T);
  x.col(0) = x0;
  for (Eigen::Index k = 0; k < T; ++k) {
    y.col(k) = sys.C * x.col(k) + sys.D * u.at(k) + fault.G * v.at(k);
    if (w) y.col(k) += w->at(k);
    x.col(k + 1) = sys.A * x.col(k) + sys.B * u.at(k) + fault.F * v.at(k);
  }
  return {Trajectory(Role::Output, std::move(y)), Trajectory(Role::State, std::move(x))};
}

Trajectory white_input(Eigen::Index nu, Eigen::Index T, std::uint64_t seed) {
  if (T < 1) throw DimensionError("white_input: T must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix u(nu, T);
  for (Eigen::Index k = 0; k < T; ++k) {
    for (Eigen::Index i = 0; i < nu; ++i) u(i, k) = normal(rng);
  }
  return Trajectory(Role::Input, std::move(u));
}

Trajectory paper_fault_signal(FaultKind kind, Eigen::Index T, std::uint64_t seed) {
  if (T < 1) throw DimensionError("paper_fault_signal: T must be >= 1");
  Matrix v(1, T);
  if (kind == FaultKind::V1) {
    for (Eigen::Index k = 0; k < T; ++k) {
      v(0, k) = 0.1 + std::sin(0.25 * std::pow(static_cast<double>(k), 1.3));
    }
  } else {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (Eigen::Index k = 0; k < T; ++k) {
      v(0, k) = 1.0 - std::pow(0.99, static_cast<double>(k)) + normal(rng);
    }
  }
  return Trajectory(Role::Fault, std::move(v));
}

Trajectory colored_noise(Eigen::Index ny, Eigen::Index T, double snr_db,
                         const Trajectory& reference, std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0) return Trajectory::zeros(Role::Noise, ny, T);
  if (!std::isfinite(snr_db)) throw DimensionError("colored_noise: snr_db must be finite or +inf");
  if (reference.dim() != ny || reference.length() != T) {
    throw DimensionError("colored_noise: reference must be n_y x T");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix w(ny, T);
  const double stationary = 1.0 / std::sqrt(1.0 - kNoisePole * kNoisePole);
  for (Eigen::Index i = 0; i < ny; ++i) w(i, 0) = stationary * normal(rng);
  for (Eigen::Index k = 1; k < T; ++k) {
    for (Eigen::Index i = 0; i < ny; ++i) w(i, k) = kNoisePole * w(i, k - 1) + normal(rng);
  }
  const double ratio = std::pow(10.0, snr_db / 10.0);
  for (Eigen::Index i = 0; i < ny; ++i) {
    const double p_ref = reference.samples().row(i).squaredNorm() / static_cast<double>(T);
    if (!(p_ref > 0.0)) {
      throw DimensionError("colored_noise: reference channel " + std::to_string(i) +
                           " has zero power");
    }
    const double p_w = w.row(i).squaredNorm() / static_cast<double>(T);
    w.row(i) *= std::sqrt(p_ref / (p_w * ratio));
  }
  return Trajectory(Role::Noise, std::move(w));
}

namespace {

// Rank of each T_s for s = 0..smax, thresholded against the largest one.
std::vector<Eigen::Index> toeplitz_ranks(const Matrix& A, const Matrix& F, const Matrix& C,
                                         const Matrix& G, Eigen::Index smax) {
  const Matrix big = block_toeplitz(A, F, C, G, smax);
  const double scale = big.size() ? numerical_rank(big, RankPolicy::relative(0)).singular_values.front() : 0.0;
  const double threshold = 1e-10 * std::max(scale, 1e-300);
  std::vector<Eigen::Index> ranks{0};
  for (Eigen::Index s = 1; s <= smax; ++s) {
    const Matrix Ts = s == smax ? big : block_toeplitz(A, F, C, G, s);
    ranks.push_back(Ts.size() ? numerical_rank(Ts, RankPolicy::absolute(threshold)).rank : 0);
  }
  return ranks;
}

double pencil_conditioning_at(const Matrix& A, const Matrix& F, const Matrix& C,
                              const Matrix& G, std::complex<double> q) {
  const Eigen::Index n = A.rows(), m = F.cols(), p = C.rows();
  Eigen::MatrixXcd H(n + p, n + m);
  H.topLeftCorner(n, n) = A.cast<std::complex<double>>();
  H.topLeftCorner(n, n).diagonal().array() -= q;
  H.topRightCorner(n, m) = F.cast<std::complex<double>>();
  H.bottomLeftCorner(p, n) = C.cast<std::complex<double>>();
  H.bottomRightCorner(p, m) = G.cast<std::complex<double>>();
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(H).singularValues();
  return sv(sv.size() - 1) / std::max(sv(0), 1e-300);
}

}  // namespace

ZeroReport transmission_zeros(const Matrix& A, const Matrix& F, const Matrix& C,
                              const Matrix& G) {
  const Eigen::Index n = A.rows(), m = F.cols(), p = C.rows();
  if (A.cols() != n || F.rows() != n || C.cols() != n || G.rows() != p || G.cols() != m) {
    throw DimensionError("transmission_zeros: (A, F, C, G) do not conform");
  }
  ZeroReport report;
  const auto ranks = toeplitz_ranks(A, F, C, G, n + 1);
  for (Eigen::Index l = 0; l <= n; ++l) {
    if (ranks[static_cast<std::size_t>(l + 1)] - ranks[static_cast<std::size_t>(l)] == m) {
      report.l_delay = l;
      break;
    }
  }
  if (!report.l_delay) return report;

  report.infinite_zero_count = (n + 1) * m - ranks.back();

  // Square down the output side with a fixed random combination; zeros of the
  // tall pencil survive, spurious ones are filtered against the full pencil.
  Matrix W = Matrix::Identity(m, p);
  if (p > m) {
    std::mt19937_64 rng(0x5eed0f2e5ULL);
    std::normal_distribution<double> normal;
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) W(i, j) = normal(rng);
    }
  }
  Matrix pencil_a(n + m, n + m), pencil_b = Matrix::Zero(n + m, n + m);
  pencil_a << A, F, W * C, W * G;
  pencil_b.topLeftCorner(n, n).setIdentity();
  if (n > 0) {
    Eigen::GeneralizedEigenSolver<Matrix> ges(pencil_a, pencil_b, false);
    const Eigen::VectorXcd alphas = ges.alphas();
    const Vector betas = ges.betas();
    for (Eigen::Index i = 0; i < alphas.size(); ++i) {
      if (std::abs(betas(i)) <= 1e-300) continue;
      std::complex<double> q = alphas(i) / betas(i);
      if (!std::isfinite(q.real()) || !std::isfinite(q.imag()) ||
          std::abs(q) > kInfiniteZeroModulus) {
        continue;
      }
      if (std::abs(q.imag()) <= 1e-9 * std::max(1.0, std::abs(q))) q = {q.real(), 0.0};
      if (p > m && pencil_conditioning_at(A, F, C, G, q) > 1e-6) continue;
      report.finite_zeros.push_back(q);
    }
  }
  std::sort(report.finite_zeros.begin(), report.finite_zeros.end(),
            [](const auto& a, const auto& b) {
              return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
            });
  report.zeta = static_cast<Eigen::Index>(report.finite_zeros.size()) +
                report.infinite_zero_count;
  return report;
}

namespace {

Matrix normal_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

Matrix random_orthogonal(std::mt19937_64& rng, Eigen::Index n) {
  const Eigen::HouseholderQR<Matrix> qr(normal_matrix(rng, n, n));
  Matrix Q = qr.householderQ();
  const Matrix R = qr.matrixQR();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (R(i, i) < 0) Q.col(i) *= -1.0;
  }
  return Q;
}

// Eigenvalues uniform in the disk of radius 0.95, complex ones as conjugate
// pairs in real block-diagonal form, then an orthogonal similarity.
Matrix random_stable_matrix(std::mt19937_64& rng, Eigen::Index n) {
  constexpr double kRadius = 0.95;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix blocks = Matrix::Zero(n, n);
  Eigen::Index i = 0;
  while (i < n) {
    if (n - i >= 2 && unit(rng) < 0.5) {
      const double r = kRadius * std::sqrt(unit(rng));
      const double theta = std::numbers::pi * unit(rng);
      const double a = r * std::cos(theta), b = r * std::sin(theta);
      blocks(i, i) = a;
      blocks(i, i + 1) = b;
      blocks(i + 1, i) = -b;
      blocks(i + 1, i + 1) = a;
      i += 2;
    } else {
      blocks(i, i) = kRadius * (2.0 * unit(rng) - 1.0);
      i += 1;
    }
  }
  const Matrix Q = random_orthogonal(rng, n);
  return Q * blocks * Q.transpose();
}

}  // namespace

GeneratedSystem random_system(const SystemDims& dims, Eigen::Index zero_count,
                              std::uint64_t seed, int max_attempts) {
  const auto [nx, nu, ny, nv] = dims;
  if (nx < 1 || nu < 1 || nv < 1) throw DimensionError("random_system: dimensions must be >= 1");
  if (ny <= nv) throw DimensionError("random_system: requires n_y > n_v");
  if (zero_count < 0 || zero_count > nx) {
    throw DimensionError("random_system: zero_count must lie in [0, n_x]");
  }
  // Each placed zero removes one direction available to the rows of [C G].
  if (ny > nx + nv - zero_count) {
    throw DimensionError("random_system: n_y > n_x + n_v - zero_count leaves no room "
                         "for the requested zeros");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    const Matrix A = random_stable_matrix(rng, nx);
    const Matrix B = normal_matrix(rng, nx, nu);
    const Matrix D = normal_matrix(rng, ny, nu);
    const Matrix F = normal_matrix(rng, nx, nv);

    std::vector<double> zeros;
    for (Eigen::Index i = 0; i < zero_count; ++i) zeros.push_back(normal(rng));

    const Eigen::VectorXcd eig = Eigen::EigenSolver<Matrix>(A, false).eigenvalues();
    bool separated = true;
    for (std::size_t i = 0; i < zeros.size(); ++i) {
      for (Eigen::Index j = 0; j < eig.size(); ++j) {
        if (std::abs(eig(j) - zeros[i]) < 1e-2) separated = false;
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (std::abs(zeros[i] - zeros[j]) < 1e-2) separated = false;
      }
    }
    if (!separated) continue;

    // Zero direction [x_z; v_z] solves (A - zI) x_z + F v_z = 0; placing the
    // zero means C x_z + G v_z = 0, i.e. rows of [C G] orthogonal to it.
    Matrix directions(nx + nv, zero_count);
    for (Eigen::Index i = 0; i < zero_count; ++i) {
      const Vector vz = normal_matrix(rng, nv, 1);
      const Matrix shifted = A - zeros[static_cast<std::size_t>(i)] * Matrix::Identity(nx, nx);
      const Vector xz = -shifted.partialPivLu().solve(F * vz);
      directions.col(i) << xz, vz;
    }
    Matrix complement = Matrix::Identity(nx + nv, nx + nv);
    if (zero_count > 0) {
      const Eigen::HouseholderQR<Matrix> qr(directions);
      const Matrix Qfull = qr.householderQ();
      complement = Qfull.rightCols(nx + nv - zero_count);
    }
    const Matrix CG = (complement * normal_matrix(rng, complement.cols(), ny)).transpose();

    GeneratedSystem out;
    out.sys = {A, B, CG.leftCols(nx), D};
    out.fault = {F, CG.rightCols(nv)};
    out.zeros = zeros;
    out.seed = seed;
    out.attempts = attempt;

    if (!is_stable(A) || !is_minimal(out.sys) || !is_controllable(A, F)) continue;
    const ZeroReport zr = transmission_zeros(A, out.fault.F, out.sys.C, out.fault.G);
    if (!zr.left_invertible() || zr.infinite_zero_count != 0 ||
        static_cast<Eigen::Index>(zr.finite_zeros.size()) != zero_count) {
      continue;
    }
    std::vector<double> found;
    for (const auto& z : zr.finite_zeros) found.push_back(z.real());
    std::vector<double> placed = zeros;
    std::sort(placed.begin(), placed.end());
    bool match = true;
    for (std::size_t i = 0; i < found.size(); ++i) {
      if (std::abs(zr.finite_zeros[i].imag()) > 1e-8 || std::abs(found[i] - placed[i]) > 1e-6) {
        match = false;
      }
    }
    if (!match) continue;
    return out;
  }
  throw NumericalError("random_system: no admissible system after " +
                       std::to_string(max_attempts) + " attempts");
}

StateSpace paper_example_system() {
  StateSpace sys;
  sys.A.resize(3, 3);
  sys.A << 0, 1, 0,
           0, 0, 1,
           -0.25, 0.75, 0.25;
  sys.B.resize(3, 1);
  sys.B << 0, 0, 1;
  sys.C.resize(2, 3);
  sys.C << 1, 0, 0,
           0, 1, 0;
  sys.D = Matrix::Zero(2, 1);
  return sys;
}

FaultPair paper_example_fault() {
  FaultPair fault;
  fault.F.resize(3, 1);
  fault.F << 0.938, 0.328, 0.115;
  fault.G = Matrix::Zero(2, 1);
  return fault;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << 't';
  for (Eigen::Index i = 0; i < traj.dim(); ++i) out << ",ch" << i;
  out << '\n';
  for (Eigen::Index k = 0; k < traj.length(); ++k) {
    out << k;
    for (Eigen::Index i = 0; i < traj.dim(); ++i) out << ',' << format_double(traj.samples()(i, k));
    out << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& in, Role role) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("trajectory csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("t", 0) != 0) {
    throw std::invalid_argument("trajectory csv: header must start with 't'");
  }
  const auto dim = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ','));
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<double> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = line.find(',', start);
      fields.push_back(parse_double(std::string_view(line).substr(
          start, pos == std::string::npos ? std::string::npos : pos - start)));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (static_cast<Eigen::Index>(fields.size()) != dim + 1) {
      throw std::invalid_argument("trajectory csv: line " + std::to_string(rows.size() + 2) +
                                  " has " + std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(dim + 1));
    }
    rows.push_back(std::move(fields));
  }
  Matrix samples(dim, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k][0] != static_cast<double>(k)) {
      throw std::invalid_argument("trajectory csv: time index " + format_double(rows[k][0]) +
                                  " out of sequence at sample " + std::to_string(k));
    }
    for (Eigen::Index i = 0; i < dim; ++i) {
      samples(i, static_cast<Eigen::Index>(k)) = rows[k][static_cast<std::size_t>(i + 1)];
    }
  }
  return Trajectory(role, std::move(samples));
}

}  // namespace faultid
