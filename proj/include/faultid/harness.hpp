#pragma once

// Experiment orchestration: the single-system example, the Monte-Carlo study,
// plot data and JSON persistence.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "faultid/errors.hpp"
#include "faultid/faultrec.hpp"
#include "faultid/subid.hpp"

namespace faultid {

using json = nlohmann::ordered_json;

struct ExperimentConfig {
  Eigen::Index T = 1000;
  /// Recovery window; 0 picks 5 for the example and 2 n_x for Monte Carlo.
  Eigen::Index s = 0;
  /// Identification window; 0 picks 2 n_x + 2.
  Eigen::Index ident_window = 0;
  std::uint64_t seed = 1;
  /// Empty means noise-free.
  std::optional<double> snr_db;
  SystemDims dims;
  std::vector<Eigen::Index> zero_counts{0, 1, 2, 3};
  Eigen::Index systems_per_count = 10;
  /// "rel" or "gap".
  std::string rank_policy = "gap";
  double rank_tol = 1e-8;
  double gap_ratio = 10.0;
  std::string representative = "sparse-G";
  std::string out_dir = "out";
  /// Worker threads for Monte Carlo; 0 uses the hardware count.
  unsigned threads = 0;

  static ExperimentConfig example_defaults();
  static ExperimentConfig montecarlo_defaults();

  RankPolicy resolved_rank_policy() const;
  Eigen::Index recovery_window(Eigen::Index nx) const;
  Eigen::Index identification_window(Eigen::Index nx) const;
  /// Throws DimensionError unless T > 2s > 2 n_x for both windows.
  void validate(Eigen::Index nx) const;
};

/// Overlays the keys present in `j` onto `base`; unknown keys are an error.
ExperimentConfig config_from_json(const json& j, ExperimentConfig base);
json config_to_json(const ExperimentConfig& c);

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);
json system_to_json(const StateSpace& sys, const FaultPair& fault, std::uint64_t seed);
/// Reads A, B, C, D and, when present, F and G.
StateSpace system_from_json(const json& j, FaultPair* fault = nullptr);
json ident_to_json(const IdentResult& r);

/// Runs `fn`, rethrowing failures as StageError tagged with `stage`.
template <typename Fn>
auto with_stage(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const NumericalError& e) {
    throw StageError(stage, e.what(), true);
  } catch (const std::invalid_argument& e) {
    throw StageError(stage, e.what(), false);
  } catch (const std::length_error& e) {
    throw StageError(stage, e.what(), false);
  }
}

struct BranchReport {
  std::string name;
  StateSpace model;
  FaultRecovery recovery;
  /// true [F; G] against range([F_hat; G_hat]) in true state coordinates.
  double projection_residual = 0.0;
  FaultPair representative;
  /// Representative in true state coordinates.
  Matrix representative_true;
  double grassmann_error = 0.0;
  double replay_residual = 0.0;
  double correlation = 0.0;
};

struct ExampleReport {
  ExperimentConfig config;
  IdentResult ident;
  double markov_error = 0.0;
  BranchReport exact, identified;
};

ExampleReport run_example(const ExperimentConfig& config);
json example_to_json(const ExampleReport& r);

/// Outcome of one Monte-Carlo instance.
struct McRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  Eigen::Index zeros = 0;
  bool ok = false;
  std::string stage, reason;
  double grassmann_error = 0.0;
  double containment_error = 0.0;
  Eigen::Index n_v_estimate = 0;
  bool n_v_correct = false;
  Eigen::Index n_z = 0;
  /// n_z spans the whole [F; G] space, so recovery carries no information.
  bool degenerate = false;
  /// Order selection disagreed with n_x and the true order was used.
  bool order_fallback = false;
  double markov_error = 0.0;
  double runtime_s = 0.0;
};

struct BoxStats {
  Eigen::Index zeros = 0;
  std::size_t count = 0;
  double median = 0, q1 = 0, q3 = 0, lo_whisker = 0, hi_whisker = 0;
  std::vector<double> outliers;
};

/// Tukey box statistics; quartiles by linear interpolation.
BoxStats box_stats(std::vector<double> values);

struct MonteCarloReport {
  ExperimentConfig config;
  std::vector<McRecord> records;
  double overall_median = 0.0;
  std::vector<BoxStats> per_zero;
  double containment_median = 0.0;
  std::vector<BoxStats> containment_per_zero;
};

McRecord run_instance(const ExperimentConfig& config, std::size_t index, Eigen::Index zeros);
MonteCarloReport run_montecarlo(const ExperimentConfig& config);
/// Runtime is left out so reports are byte-reproducible.
json montecarlo_to_json(const MonteCarloReport& r);

/// "index,sv_Rs,sv_Rs1", shorter column padded empty.
void write_singular_value_csv(std::ostream& out, const std::vector<double>& sv_s,
                              const std::vector<double>& sv_s1);
/// "zeros,median,q1,q3,lo_whisker,hi_whisker,outliers", outliers ';'-separated.
void write_boxplot_csv(std::ostream& out, const std::vector<BoxStats>& stats);

/// Writes the report's plot CSVs into `dir`; returns the paths written.
std::vector<std::string> emit_plot_data(const ExampleReport& r, const std::string& dir);
std::vector<std::string> emit_plot_data(const MonteCarloReport& r, const std::string& dir);

}  // namespace faultid
