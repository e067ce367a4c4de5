#pragma once

// Past-input MOESP identification of the nominal (A, B, C, D) from data that
// may carry an unknown additive fault.

#include <optional>
#include <vector>

#include "faultid/sysgen.hpp"

namespace faultid {

struct OrderEstimate {
  Eigen::Index order = 0;
  /// sigma_order / sigma_{order+1}.
  double gap_ratio = 0.0;
  /// The dominant ratio was below 10, so the whole spectrum was kept.
  bool low_confidence = false;
};

/// Largest sigma_i / sigma_{i+1}, ties toward the smaller order. Throws
/// DegenerateDataError when every value is below 1e-12.
OrderEstimate estimate_order(const std::vector<double>& singular_values);

struct IdentResult {
  StateSpace system;
  /// s * n_y values, zero padded past the instrumented block's rank.
  std::vector<double> order_singular_values;
  Eigen::Index chosen_order = 0;
  Vector x_tilde_0;
  Eigen::Index window_s = 0;
  /// Order came from a flat spectrum (see OrderEstimate).
  bool low_confidence = false;
};

/// 2 n + 2 with an order hint, otherwise 10.
Eigen::Index default_window(std::optional<Eigen::Index> order_hint = std::nullopt);

/// Requires T > 2s. `order` empty selects it with estimate_order. Throws
/// ExcitationError when the stacked input Hankel is rank deficient, and
/// NumericalError when `order` exceeds the nonzero part of the spectrum.
IdentResult pi_moesp(const Trajectory& u, const Trajectory& y, Eigen::Index s,
                     std::optional<Eigen::Index> order = std::nullopt);

/// (D, CB, CAB, ..., C A^{m-2} B).
std::vector<Matrix> markov_params(const StateSpace& sys, Eigen::Index m);

/// ||stack(est) - stack(truth)||_F / ||stack(truth)||_F over the first m
/// Markov parameters.
double markov_relative_error(const StateSpace& estimate, const StateSpace& truth,
                             Eigen::Index m = 10);

/// Least-squares x0 from y(0..h-1) - T_h u(0..h-1) = O_h x0, minimum norm if
/// O_h is rank deficient.
Vector estimate_initial_state(const StateSpace& sys, const Trajectory& u,
                              const Trajectory& y, Eigen::Index horizon);

}  // namespace faultid
