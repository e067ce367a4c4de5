#pragma once

// Discrete LTI simulation with an additive fault channel, random test-system
// generation with placed transmission zeros, test signal generators and
// zero / left-invertibility analysis of a fault channel.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "faultid/matstack.hpp"
#include "faultid/types.hpp"

namespace faultid {

/// Nominal quadruple x(k+1) = A x + B u, y = C x + D u.
struct StateSpace {
  Matrix A, B, C, D;

  Eigen::Index nx() const { return A.rows(); }
  Eigen::Index nu() const { return B.cols(); }
  Eigen::Index ny() const { return C.rows(); }

  /// Throws DimensionError unless the four matrices conform.
  void validate() const;
};

/// Matrices through which the fault v enters: +F v in the state, +G v in the
/// output.
struct FaultPair {
  Matrix F, G;

  Eigen::Index nv() const { return F.cols(); }
  /// [F; G]
  Matrix stacked() const;
  static FaultPair from_stacked(const Matrix& FG, Eigen::Index nx);
  void validate(const StateSpace& sys) const;
};

double spectral_radius(const Matrix& A);
bool is_stable(const Matrix& A, double margin = 1e-10);
/// Rank of [B, AB, ..., A^{n-1}B] relative to its largest singular value.
bool is_controllable(const Matrix& A, const Matrix& B, double tol = 1e-8);
bool is_observable(const Matrix& A, const Matrix& C, double tol = 1e-8);
bool is_minimal(const StateSpace& sys, double tol = 1e-8);

struct SimulationResult {
  Trajectory y;  // T samples
  Trajectory x;  // T + 1 samples, x(0) .. x(T)
};

/// Runs x(k+1) = A x + B u + F v, y = C x + D u + G v + w for k = 0..T-1.
SimulationResult simulate(const StateSpace& sys, const FaultPair& fault,
                          const Vector& x0, const Trajectory& u,
                          const Trajectory& v,
                          const std::optional<Trajectory>& w = std::nullopt);

/// i.i.d. standard normal samples, deterministic in `seed`.
Trajectory white_input(Eigen::Index nu, Eigen::Index T, std::uint64_t seed);

enum class FaultKind {
  V1,  // 0.1 + sin(0.25 k^1.3)
  V2,  // 1 - 0.99^k + z(k), z i.i.d. standard normal
};

Trajectory paper_fault_signal(FaultKind kind, Eigen::Index T, std::uint64_t seed);

/// Pole of the first-order low-pass filter that colors measurement noise.
inline constexpr double kNoisePole = 0.7;

/// Low-pass filtered Gaussian noise scaled per channel to hit `snr_db` against
/// `reference`. snr_db = +inf yields a zero trajectory.
Trajectory colored_noise(Eigen::Index ny, Eigen::Index T, double snr_db,
                         const Trajectory& reference, std::uint64_t seed);

struct ZeroReport {
  /// Finite transmission zeros, repeated according to multiplicity.
  std::vector<std::complex<double>> finite_zeros;
  Eigen::Index infinite_zero_count = 0;
  /// finite_zeros.size() + infinite_zero_count.
  Eigen::Index zeta = 0;
  /// Smallest l with l-delay left invertibility; empty when not left invertible.
  std::optional<Eigen::Index> l_delay;

  bool left_invertible() const { return l_delay.has_value(); }
};

/// Pencils eigenvalues beyond this modulus are treated as infinite.
inline constexpr double kInfiniteZeroModulus = 1e6;

/// Zero structure of the channel (A, F, C, G), i.e. of the Rosenbrock pencil
/// [A - qI, F; C, G].
ZeroReport transmission_zeros(const Matrix& A, const Matrix& F, const Matrix& C,
                              const Matrix& G);

struct GeneratedSystem {
  StateSpace sys;
  FaultPair fault;
  /// Finite zeros placed in the fault channel.
  std::vector<double> zeros;
  std::uint64_t seed = 0;
  /// Rejection-sampling attempts consumed.
  int attempts = 0;
};

struct SystemDims {
  Eigen::Index nx = 5, nu = 1, ny = 3, nv = 2;
};

/// Stable minimal (A,B,C,D) with a fault pair whose channel is minimal, left
/// invertible and has exactly `zero_count` real finite zeros drawn N(0, 1).
GeneratedSystem random_system(const SystemDims& dims, Eigen::Index zero_count,
                              std::uint64_t seed, int max_attempts = 200);

/// Seed of instance `index` derived from a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return base ^ index;
}

/// The three-state example system and its fault pair.
StateSpace paper_example_system();
FaultPair paper_example_fault();

// Trajectory CSV: header "t,ch0,ch1,...", one sample per line.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& in, Role role);

}  // namespace faultid
