#include "faultid/subid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "faultid/errors.hpp"

namespace faultid {

OrderEstimate estimate_order(const std::vector<double>& singular_values) {
  if (singular_values.empty()) throw DimensionError("estimate_order: empty spectrum");
  std::vector<double> sv = singular_values;
  std::sort(sv.begin(), sv.end(), std::greater<>());
  if (sv.front() < 1e-12) {
    throw DegenerateDataError("estimate_order: every singular value is below 1e-12");
  }
  const auto k = static_cast<Eigen::Index>(sv.size());
  const double floor = 1e-13 * sv.front();
  OrderEstimate out;
  for (Eigen::Index i = 0; i + 1 < k; ++i) {
    const double ratio = std::max(sv[static_cast<std::size_t>(i)], floor) /
                         std::max(sv[static_cast<std::size_t>(i + 1)], floor);
    if (ratio > out.gap_ratio) {
      out.gap_ratio = ratio;
      out.order = i + 1;
    }
  }
  if (out.gap_ratio < 10.0) {
    out.order = k;
    out.low_confidence = true;
  }
  return out;
}

Eigen::Index default_window(std::optional<Eigen::Index> order_hint) {
  return order_hint ? 2 * *order_hint + 2 : 10;
}

namespace {

// Regressors of the output equation in [x0; vec(B); vec(D)] for fixed (A, C),
// stacked sample by sample.
Matrix output_regressors(const Matrix& A, const Matrix& C, const Matrix& u) {
  const Eigen::Index n = A.rows(), p = C.rows(), m = u.rows(), T = u.cols();
  Matrix phi = Matrix::Zero(T * p, n + n * m + p * m);
  Matrix Ak = Matrix::Identity(n, n);
  std::vector<Matrix> psi(static_cast<std::size_t>(m), Matrix::Zero(n, n));
  for (Eigen::Index k = 0; k < T; ++k) {
    auto rows = phi.middleRows(k * p, p);
    rows.leftCols(n) = C * Ak;
    for (Eigen::Index l = 0; l < m; ++l) {
      rows.middleCols(n + l * n, n) = C * psi[static_cast<std::size_t>(l)];
      rows.middleCols(n + n * m + l * p, p) = u(l, k) * Matrix::Identity(p, p);
    }
    for (Eigen::Index l = 0; l < m; ++l) {
      auto& state = psi[static_cast<std::size_t>(l)];
      state = A * state;
      state.diagonal().array() += u(l, k);
    }
    Ak = A * Ak;
  }
  return phi;
}

}  // namespace

IdentResult pi_moesp(const Trajectory& u, const Trajectory& y, Eigen::Index s,
                     std::optional<Eigen::Index> order) {
  const Eigen::Index T = u.length();
  if (y.length() != T) throw DimensionError("pi_moesp: u and y lengths differ");
  if (s < 2) throw DimensionError("pi_moesp: window s must be >= 2");
  if (T <= 2 * s) throw LengthError("pi_moesp", 2 * s + 1, T);
  const Eigen::Index m = u.dim(), p = y.dim();
  const Eigen::Index N = T - 2 * s + 1;
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));

  Matrix H(2 * s * m + s * p, N);
  H << block_hankel(u.samples().rightCols(T - s), s, N),
      block_hankel(u.samples(), s, N),
      block_hankel(y.samples().rightCols(T - s), s, N);
  // Right-projecting the whole data equation off the constant vector keeps it
  // exact and removes the leakage of constant fault components into the
  // past-input instruments.
  H = (H.colwise() - H.rowwise().mean()) * scale;

  const RankReport input_rank =
      numerical_rank(H.topRows(2 * s * m), RankPolicy::relative(1e-10));
  if (input_rank.rank < 2 * s * m) {
    throw ExcitationError("pi_moesp: input Hankel matrix has rank " +
                          std::to_string(input_rank.rank) + " < " +
                          std::to_string(2 * s * m) + "; input is not persistently exciting");
  }

  const Eigen::HouseholderQR<Matrix> qr(H.transpose());
  const Matrix L = qr.matrixQR()
                       .topRows(H.rows())
                       .triangularView<Eigen::Upper>()
                       .toDenseMatrix()
                       .transpose();
  const Matrix L32 = L.block(2 * s * m, s * m, s * p, s * m);
  const Svd d = svd(L32);

  IdentResult out;
  out.window_s = s;
  out.order_singular_values.assign(static_cast<std::size_t>(s * p), 0.0);
  for (Eigen::Index i = 0; i < d.S.size(); ++i) {
    out.order_singular_values[static_cast<std::size_t>(i)] = d.S(i);
  }

  Eigen::Index n = 0;
  if (order) {
    n = *order;
  } else {
    const OrderEstimate est = estimate_order(
        std::vector<double>(d.S.data(), d.S.data() + d.S.size()));
    n = est.order;
    out.low_confidence = est.low_confidence;
  }
  if (n < 1 || n > d.S.size() || n > (s - 1) * p) {
    throw NumericalError("pi_moesp: order " + std::to_string(n) +
                         " is outside the available spectrum (" +
                         std::to_string(d.S.size()) + " values)");
  }
  if (!(d.S(n - 1) > 1e-12 * d.S(0))) {
    throw NumericalError("pi_moesp: order " + std::to_string(n) +
                         " exceeds the nonzero singular-value plateau");
  }
  out.chosen_order = n;

  const Matrix O = d.U.leftCols(n);
  StateSpace& sys = out.system;
  sys.C = O.topRows(p);
  sys.A = min_norm_lsq(O.topRows((s - 1) * p), O.bottomRows((s - 1) * p));

  // A slightly unstable A^ makes the x0 columns dwarf the rest, so columns are
  // equilibrated; if they overflow, x0 is left out of the joint fit.
  Matrix phi = output_regressors(sys.A, sys.C, u.samples());
  const bool x0_usable = phi.leftCols(n).allFinite();
  if (!x0_usable) phi.leftCols(n).setZero();
  Vector scale_cols = phi.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < scale_cols.size(); ++j) {
    if (!(scale_cols(j) > 0.0)) scale_cols(j) = 1.0;
  }
  phi = phi * scale_cols.cwiseInverse().asDiagonal();
  const Vector rhs = y.samples().reshaped();
  const Vector theta = min_norm_lsq(phi, rhs).cwiseQuotient(scale_cols);
  out.x_tilde_0 = theta.head(n);
  sys.B = theta.segment(n, n * m).reshaped(n, m);
  sys.D = theta.tail(p * m).reshaped(p, m);
  require_finite(sys.A, "pi_moesp A");
  return out;
}

std::vector<Matrix> markov_params(const StateSpace& sys, Eigen::Index m) {
  if (m < 1) throw DimensionError("markov_params: m must be >= 1");
  sys.validate();
  std::vector<Matrix> out{sys.D};
  Matrix AkB = sys.B;
  for (Eigen::Index k = 1; k < m; ++k) {
    out.push_back(sys.C * AkB);
    AkB = sys.A * AkB;
  }
  return out;
}

double markov_relative_error(const StateSpace& estimate, const StateSpace& truth,
                             Eigen::Index m) {
  const auto a = markov_params(estimate, m);
  const auto b = markov_params(truth, m);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].rows() != b[k].rows() || a[k].cols() != b[k].cols()) {
      throw DimensionError("markov_relative_error: input/output dimensions differ");
    }
    num += (a[k] - b[k]).squaredNorm();
    den += b[k].squaredNorm();
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

Vector estimate_initial_state(const StateSpace& sys, const Trajectory& u,
                              const Trajectory& y, Eigen::Index horizon) {
  sys.validate();
  if (horizon < sys.nx()) {
    throw DimensionError("estimate_initial_state: horizon shorter than n_x");
  }
  if (u.length() < horizon || y.length() < horizon) {
    throw LengthError("estimate_initial_state", horizon, std::min(u.length(), y.length()));
  }
  const Matrix O = extended_observability(sys.A, sys.C, horizon);
  const Matrix Th = block_toeplitz(sys.A, sys.B, sys.C, sys.D, horizon);
  const Vector rhs = y.samples().leftCols(horizon).reshaped() -
                     Th * u.samples().leftCols(horizon).reshaped();
  return min_norm_lsq(O, rhs);
}

}  // namespace faultid
