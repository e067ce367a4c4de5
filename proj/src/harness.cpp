#include "faultid/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <thread>

namespace faultid {

ExperimentConfig ExperimentConfig::example_defaults() {
  ExperimentConfig c;
  c.representative = "sparse-G";
  return c;
}

ExperimentConfig ExperimentConfig::montecarlo_defaults() {
  ExperimentConfig c;
  c.snr_db = 40.0;
  c.representative = "leading";
  return c;
}

RankPolicy ExperimentConfig::resolved_rank_policy() const {
  if (rank_policy == "rel") return RankPolicy::relative(rank_tol);
  if (rank_policy == "gap") return RankPolicy::gap(gap_ratio);
  throw std::invalid_argument("rank_policy must be 'rel' or 'gap', got '" + rank_policy + "'");
}

Eigen::Index ExperimentConfig::recovery_window(Eigen::Index nx) const {
  return s > 0 ? s : 2 * nx;
}

Eigen::Index ExperimentConfig::identification_window(Eigen::Index nx) const {
  return ident_window > 0 ? ident_window : default_window(nx);
}

void ExperimentConfig::validate(Eigen::Index nx) const {
  for (const Eigen::Index w : {recovery_window(nx), identification_window(nx)}) {
    if (!(T > 2 * w && w > nx)) {
      throw DimensionError("config: need T > 2s > 2 n_x, got T = " + std::to_string(T) +
                           ", s = " + std::to_string(w) + ", n_x = " + std::to_string(nx));
    }
  }
  if (systems_per_count < 1) throw DimensionError("config: systems_per_count must be >= 1");
  if (zero_counts.empty()) throw DimensionError("config: zero_counts is empty");
  if (snr_db && !std::isfinite(*snr_db)) throw DimensionError("config: snr_db must be finite");
  resolved_rank_policy();
  parse_representative(representative);
}

namespace {

template <typename T>
void read_key(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json(const json& j, ExperimentConfig c) {
  static const std::vector<std::string> known{
      "T", "s", "ident_window", "seed", "snr_db", "dims", "zero_counts",
      "systems_per_count", "rank_policy", "rank_tol", "gap_ratio", "representative",
      "out_dir", "threads"};
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  // Fixed modelling constants echoed by config_to_json; accepted only at their value.
  const std::vector<std::pair<std::string, double>> fixed{
      {"input_variance", 1.0}, {"initial_state_variance", 1.0}, {"zero_variance", 1.0},
      {"noise_pole", kNoisePole}};
  for (const auto& [key, value] : j.items()) {
    const auto f = std::find_if(fixed.begin(), fixed.end(),
                                [&](const auto& kv) { return kv.first == key; });
    if (f != fixed.end()) {
      if (!value.is_number() || value.get<double>() != f->second) {
        throw std::invalid_argument("config: '" + key + "' is fixed at " +
                                    format_double(f->second));
      }
      continue;
    }
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  try {
    read_key(j, "T", c.T);
    read_key(j, "s", c.s);
    read_key(j, "ident_window", c.ident_window);
    read_key(j, "seed", c.seed);
    if (j.contains("snr_db")) {
      if (j.at("snr_db").is_null()) {
        c.snr_db.reset();
      } else {
        c.snr_db = j.at("snr_db").get<double>();
      }
    }
    if (j.contains("dims")) {
      const json& d = j.at("dims");
      read_key(d, "nx", c.dims.nx);
      read_key(d, "nu", c.dims.nu);
      read_key(d, "ny", c.dims.ny);
      read_key(d, "nv", c.dims.nv);
    }
    read_key(j, "zero_counts", c.zero_counts);
    read_key(j, "systems_per_count", c.systems_per_count);
    read_key(j, "rank_policy", c.rank_policy);
    read_key(j, "rank_tol", c.rank_tol);
    read_key(j, "gap_ratio", c.gap_ratio);
    read_key(j, "representative", c.representative);
    read_key(j, "out_dir", c.out_dir);
    read_key(j, "threads", c.threads);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["T"] = c.T;
  j["s"] = c.s;
  j["ident_window"] = c.ident_window;
  j["seed"] = c.seed;
  j["snr_db"] = c.snr_db ? json(*c.snr_db) : json(nullptr);
  j["dims"] = {{"nx", c.dims.nx}, {"nu", c.dims.nu}, {"ny", c.dims.ny}, {"nv", c.dims.nv}};
  j["zero_counts"] = c.zero_counts;
  j["systems_per_count"] = c.systems_per_count;
  j["rank_policy"] = c.rank_policy;
  j["rank_tol"] = c.rank_tol;
  j["gap_ratio"] = c.gap_ratio;
  j["representative"] = c.representative;
  j["out_dir"] = c.out_dir;
  j["threads"] = c.threads;
  // Unstated in the source study; echoed so runs are self-describing.
  j["input_variance"] = 1.0;
  j["initial_state_variance"] = 1.0;
  j["zero_variance"] = 1.0;
  j["noise_pole"] = kNoisePole;
  return j;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("matrix: expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw std::invalid_argument("matrix: row " + std::to_string(i) + " is not a " +
                                  std::to_string(cols) + "-entry array");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      const json& x = row.at(static_cast<std::size_t>(k));
      if (!x.is_number()) throw std::invalid_argument("matrix: non-numeric entry");
      m(i, k) = x.get<double>();
    }
  }
  require_finite(m, "matrix");
  return m;
}

namespace {

json vector_to_json(const Vector& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace

json system_to_json(const StateSpace& sys, const FaultPair& fault, std::uint64_t seed) {
  json j;
  j["A"] = matrix_to_json(sys.A);
  j["B"] = matrix_to_json(sys.B);
  j["C"] = matrix_to_json(sys.C);
  j["D"] = matrix_to_json(sys.D);
  j["F"] = matrix_to_json(fault.F);
  j["G"] = matrix_to_json(fault.G);
  j["dims"] = {{"nx", sys.nx()}, {"nu", sys.nu()}, {"ny", sys.ny()}, {"nv", fault.nv()}};
  j["seed"] = seed;
  return j;
}

StateSpace system_from_json(const json& j, FaultPair* fault) {
  if (j.is_object() && j.contains("system")) return system_from_json(j.at("system"), fault);
  if (!j.is_object()) throw std::invalid_argument("system: expected a JSON object");
  for (const char* key : {"A", "B", "C", "D"}) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("system: missing key ") + key);
  }
  StateSpace sys{matrix_from_json(j.at("A")), matrix_from_json(j.at("B")),
                 matrix_from_json(j.at("C")), matrix_from_json(j.at("D"))};
  sys.validate();
  if (fault && j.contains("F") && j.contains("G")) {
    *fault = {matrix_from_json(j.at("F")), matrix_from_json(j.at("G"))};
    fault->validate(sys);
  }
  return sys;
}

json ident_to_json(const IdentResult& r) {
  json j;
  j["system"] = {{"A", matrix_to_json(r.system.A)},
                 {"B", matrix_to_json(r.system.B)},
                 {"C", matrix_to_json(r.system.C)},
                 {"D", matrix_to_json(r.system.D)}};
  j["chosen_order"] = r.chosen_order;
  j["low_confidence"] = r.low_confidence;
  j["window_s"] = r.window_s;
  j["order_singular_values"] = r.order_singular_values;
  j["x_tilde_0"] = vector_to_json(r.x_tilde_0);
  return j;
}

namespace {

Vector normal_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

// Maps identified state coordinates onto the true ones: x_true = S x_id.
Matrix coordinate_map(const StateSpace& truth, const StateSpace& model, Eigen::Index s) {
  return min_norm_lsq(extended_observability(truth.A, truth.C, s),
                      extended_observability(model.A, model.C, s));
}

Matrix stack_in_true_coords(const Matrix& S, const Matrix& F, const Matrix& G) {
  Matrix FG(S.rows() + G.rows(), F.cols());
  FG << S * F, G;
  return FG;
}

RecoveryOptions options_for(const ExperimentConfig& c) {
  const RankPolicy p = c.resolved_rank_policy();
  return {p, p};
}

BranchReport run_branch(const std::string& name, const StateSpace& truth,
                        const FaultPair& fault, const StateSpace& model,
                        const Vector& x_tilde_0, const Trajectory& u, const Trajectory& y,
                        const Trajectory& v, const ExperimentConfig& c, Eigen::Index s) {
  BranchReport b;
  b.name = name;
  b.model = model;
  b.recovery = with_stage("recover[" + name + "]", [&] {
    return recover_from_data(y, u, model, s, options_for(c));
  });
  const Matrix S = coordinate_map(truth, model, truth.nx() + 1);
  const Matrix truth_stack = fault.stacked();
  b.projection_residual = projection_residual(
      stack_in_true_coords(S, b.recovery.F_hat, b.recovery.G_hat), truth_stack);
  b.representative = with_stage("select[" + name + "]", [&] {
    return select_representative(b.recovery, parse_representative(c.representative));
  });
  b.representative_true = stack_in_true_coords(S, b.representative.F, b.representative.G);
  if (b.representative.nv() == fault.nv()) {
    b.grassmann_error = grassmann_error(SubspaceBasis::range_of(b.representative_true),
                                        SubspaceBasis::range_of(truth_stack));
  } else {
    b.grassmann_error = std::numeric_limits<double>::quiet_NaN();
  }
  const FaultReconstruction rc = with_stage("reconstruct[" + name + "]", [&] {
    return reconstruct_fault(y, u, model, b.representative, x_tilde_0);
  });
  b.replay_residual = rc.replay_residual;
  // The last few samples cannot reach the output when the channel has delay.
  const auto corr = remixed_correlation(rc.v, v, y.length() - truth.nx());
  b.correlation = *std::min_element(corr.begin(), corr.end());
  return b;
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json branch_to_json(const BranchReport& b) {
  const FaultRecovery& fr = b.recovery;
  json j;
  j["n_v"] = fr.n_v_estimate;
  j["rank_s"] = fr.rank_s;
  j["rank_s_plus_1"] = fr.rank_s_plus_1;
  j["window_s"] = fr.window_s;
  j["n_z"] = fr.n_z;
  j["singular_values_s"] = fr.singular_values_s;
  j["singular_values_s_plus_1"] = fr.singular_values_s_plus_1;
  j["F_hat"] = matrix_to_json(fr.F_hat);
  j["G_hat"] = matrix_to_json(fr.G_hat);
  j["projection_residual"] = b.projection_residual;
  j["representative"] = {{"F", matrix_to_json(b.representative.F)},
                         {"G", matrix_to_json(b.representative.G)},
                         {"FG_true_coordinates", matrix_to_json(b.representative_true)}};
  j["grassmann_error_percent"] = number_or_null(b.grassmann_error);
  j["replay_residual"] = b.replay_residual;
  j["fault_correlation"] = b.correlation;
  return j;
}

}  // namespace

ExampleReport run_example(const ExperimentConfig& user_config) {
  const StateSpace sys = paper_example_system();
  const FaultPair fault = paper_example_fault();
  ExperimentConfig config = user_config;
  if (config.s == 0) config.s = 5;
  if (config.ident_window == 0) config.ident_window = config.identification_window(sys.nx());
  config.validate(sys.nx());
  const Eigen::Index s = config.s;
  const Eigen::Index T = config.T;

  std::mt19937_64 rng(config.seed);
  const std::uint64_t u_seed = rng(), v_seed = rng(), w_seed = rng();
  const Trajectory u = white_input(sys.nu(), T, u_seed);
  const Trajectory v = paper_fault_signal(FaultKind::V1, T, v_seed);
  const Vector x0 = normal_vector(rng, sys.nx());

  const Trajectory y = with_stage("simulate", [&] {
    const SimulationResult clean = simulate(sys, fault, x0, u, v);
    if (!config.snr_db) return clean.y;
    const Trajectory w = colored_noise(sys.ny(), T, *config.snr_db, clean.y, w_seed);
    return simulate(sys, fault, x0, u, v, w).y;
  });

  ExampleReport r;
  r.config = config;
  const Eigen::Index s_id = config.ident_window;
  r.ident = with_stage("identify", [&] { return pi_moesp(u, y, s_id); });
  r.markov_error = markov_relative_error(r.ident.system, sys);

  r.exact = run_branch("exact", sys, fault, sys, Vector::Zero(sys.nx()), u, y, v, config, s);
  r.identified = run_branch("identified", sys, fault, r.ident.system, r.ident.x_tilde_0, u, y,
                            v, config, s);
  return r;
}

json example_to_json(const ExampleReport& r) {
  json j;
  j["config"] = config_to_json(r.config);
  j["identification"] = ident_to_json(r.ident);
  j["identification"]["markov_relative_error"] = r.markov_error;
  j["exact"] = branch_to_json(r.exact);
  j["identified"] = branch_to_json(r.identified);
  return j;
}

McRecord run_instance(const ExperimentConfig& config, std::size_t index, Eigen::Index zeros) {
  const auto start = std::chrono::steady_clock::now();
  McRecord rec;
  rec.index = index;
  rec.seed = derive_seed(config.seed, index);
  rec.zeros = zeros;
  const SystemDims& dims = config.dims;
  try {
    std::mt19937_64 rng(rec.seed);
    const std::uint64_t sys_seed = rng(), u_seed = rng(), v_seed = rng(), w_seed = rng();
    const GeneratedSystem gen =
        with_stage("generate", [&] { return random_system(dims, zeros, sys_seed); });
    const Vector x0 = normal_vector(rng, dims.nx);

    const Trajectory u = white_input(dims.nu, config.T, u_seed);
    Matrix vs(dims.nv, config.T);
    for (Eigen::Index i = 0; i < dims.nv; ++i) {
      const FaultKind kind = i % 2 == 0 ? FaultKind::V1 : FaultKind::V2;
      vs.row(i) = paper_fault_signal(kind, config.T, v_seed + static_cast<std::uint64_t>(i))
                      .samples();
    }
    const Trajectory v(Role::Fault, std::move(vs));
    const Trajectory y = with_stage("simulate", [&] {
      const SimulationResult clean = simulate(gen.sys, gen.fault, x0, u, v);
      if (!config.snr_db) return clean.y;
      const Trajectory w = colored_noise(dims.ny, config.T, *config.snr_db, clean.y, w_seed);
      return simulate(gen.sys, gen.fault, x0, u, v, w).y;
    });

    const Eigen::Index s_id = config.identification_window(dims.nx);
    IdentResult id = with_stage("identify", [&] { return pi_moesp(u, y, s_id); });
    if (id.chosen_order != dims.nx || id.low_confidence) {
      rec.order_fallback = true;
      id = with_stage("identify", [&] { return pi_moesp(u, y, s_id, dims.nx); });
    }
    rec.markov_error = markov_relative_error(id.system, gen.sys);

    const Eigen::Index s = config.recovery_window(dims.nx);
    const FaultRecovery fr = with_stage("recover", [&] {
      return recover_from_data(y, u, id.system, s, options_for(config));
    });
    rec.n_v_estimate = fr.n_v_estimate;
    rec.n_v_correct = fr.n_v_estimate == dims.nv;
    rec.n_z = fr.n_z;
    rec.degenerate = fr.n_z >= dims.nx + dims.ny;

    const Matrix S = coordinate_map(gen.sys, id.system, dims.nx + 1);
    const SubspaceBasis truth = SubspaceBasis::range_of(gen.fault.stacked());
    rec.containment_error = containment_error(
        SubspaceBasis::range_of(stack_in_true_coords(S, fr.F_hat, fr.G_hat)), truth);
    // Scored at the true fault dimension so the metric stays defined when the
    // estimate is off; n_v_correct records the miss.
    const FaultPair rep = with_stage("select", [&] {
      return select_representative(fr, parse_representative(config.representative), dims.nv);
    });
    rec.grassmann_error = grassmann_error(
        SubspaceBasis::range_of(stack_in_true_coords(S, rep.F, rep.G)), truth);
    rec.ok = true;
  } catch (const StageError& e) {
    rec.stage = e.stage();
    rec.reason = e.what();
  } catch (const std::exception& e) {
    rec.stage = "unknown";
    rec.reason = e.what();
  }
  rec.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

BoxStats box_stats(std::vector<double> values) {
  BoxStats b;
  b.count = values.size();
  if (values.empty()) return b;
  std::sort(values.begin(), values.end());
  auto quantile = [&](double p) {
    const double h = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  b.median = quantile(0.5);
  b.q1 = quantile(0.25);
  b.q3 = quantile(0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr, hi_fence = b.q3 + 1.5 * iqr;
  b.lo_whisker = b.q1;
  b.hi_whisker = b.q3;
  for (double x : values) {
    if (x < lo_fence || x > hi_fence) {
      b.outliers.push_back(x);
    } else {
      b.lo_whisker = std::min(b.lo_whisker, x);
      b.hi_whisker = std::max(b.hi_whisker, x);
    }
  }
  return b;
}

MonteCarloReport run_montecarlo(const ExperimentConfig& config) {
  config.validate(config.dims.nx);
  MonteCarloReport report;
  report.config = config;
  report.config.s = config.recovery_window(config.dims.nx);
  report.config.ident_window = config.identification_window(config.dims.nx);

  std::vector<Eigen::Index> zeros_of;
  for (const Eigen::Index z : config.zero_counts) {
    for (Eigen::Index j = 0; j < config.systems_per_count; ++j) zeros_of.push_back(z);
  }
  report.records.resize(zeros_of.size());

  unsigned workers = config.threads > 0 ? config.threads : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(zeros_of.size())));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < zeros_of.size(); i = next++) {
        report.records[i] = run_instance(config, i, zeros_of[i]);
      }
    });
  }
  for (auto& t : pool) t.join();

  std::vector<double> all, all_contain;
  for (const Eigen::Index z : config.zero_counts) {
    std::vector<double> errs, contain;
    for (const McRecord& r : report.records) {
      if (r.zeros != z || !r.ok) continue;
      errs.push_back(r.grassmann_error);
      contain.push_back(r.containment_error);
    }
    all.insert(all.end(), errs.begin(), errs.end());
    all_contain.insert(all_contain.end(), contain.begin(), contain.end());
    report.per_zero.push_back(box_stats(errs));
    report.per_zero.back().zeros = z;
    report.containment_per_zero.push_back(box_stats(contain));
    report.containment_per_zero.back().zeros = z;
  }
  report.overall_median = box_stats(all).median;
  report.containment_median = box_stats(all_contain).median;
  return report;
}

namespace {

json box_to_json(const BoxStats& b) {
  return {{"zeros", b.zeros},       {"count", b.count},
          {"median", b.median},     {"q1", b.q1},
          {"q3", b.q3},             {"lo_whisker", b.lo_whisker},
          {"hi_whisker", b.hi_whisker}, {"outliers", b.outliers}};
}

}  // namespace

json montecarlo_to_json(const MonteCarloReport& r) {
  json j;
  j["config"] = config_to_json(r.config);
  json records = json::array();
  std::size_t failed = 0;
  for (const McRecord& rec : r.records) {
    json e;
    e["index"] = rec.index;
    e["seed"] = rec.seed;
    e["zeros"] = rec.zeros;
    e["ok"] = rec.ok;
    if (rec.ok) {
      e["grassmann_error_percent"] = rec.grassmann_error;
      e["containment_error_percent"] = rec.containment_error;
      e["n_v_estimate"] = rec.n_v_estimate;
      e["n_v_correct"] = rec.n_v_correct;
      e["n_z"] = rec.n_z;
      e["degenerate"] = rec.degenerate;
      e["order_fallback"] = rec.order_fallback;
      e["markov_relative_error"] = rec.markov_error;
    } else {
      ++failed;
      e["stage"] = rec.stage;
      e["reason"] = rec.reason;
    }
    records.push_back(std::move(e));
  }
  j["records"] = std::move(records);
  json agg;
  agg["failed"] = failed;
  agg["overall_median_percent"] = r.overall_median;
  agg["per_zero"] = json::array();
  for (const BoxStats& b : r.per_zero) agg["per_zero"].push_back(box_to_json(b));
  agg["containment_median_percent"] = r.containment_median;
  agg["containment_per_zero"] = json::array();
  for (const BoxStats& b : r.containment_per_zero) {
    agg["containment_per_zero"].push_back(box_to_json(b));
  }
  j["aggregate"] = std::move(agg);
  return j;
}

void write_singular_value_csv(std::ostream& out, const std::vector<double>& sv_s,
                              const std::vector<double>& sv_s1) {
  if (sv_s.empty() && sv_s1.empty()) {
    throw std::invalid_argument("singular-value plot: report has no singular values");
  }
  out << "index,sv_Rs,sv_Rs1\n";
  const std::size_t n = std::max(sv_s.size(), sv_s1.size());
  for (std::size_t i = 0; i < n; ++i) {
    out << i + 1 << ',';
    if (i < sv_s.size()) out << format_double(sv_s[i]);
    out << ',';
    if (i < sv_s1.size()) out << format_double(sv_s1[i]);
    out << '\n';
  }
}

void write_boxplot_csv(std::ostream& out, const std::vector<BoxStats>& stats) {
  if (stats.empty()) throw std::invalid_argument("boxplot: report has no per-zero statistics");
  out << "zeros,median,q1,q3,lo_whisker,hi_whisker,outliers\n";
  for (const BoxStats& b : stats) {
    out << b.zeros;
    if (b.count == 0) {
      out << ",,,,,,\n";
      continue;
    }
    for (double x : {b.median, b.q1, b.q3, b.lo_whisker, b.hi_whisker}) out << ',' << format_double(x);
    out << ',';
    for (std::size_t i = 0; i < b.outliers.size(); ++i) {
      if (i > 0) out << ';';
      out << format_double(b.outliers[i]);
    }
    out << '\n';
  }
}

namespace {

std::string write_file(const std::string& dir, const std::string& name,
                       const std::function<void(std::ostream&)>& body) {
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open " + path + " for writing");
  body(out);
  return path;
}

}  // namespace

std::vector<std::string> emit_plot_data(const ExampleReport& r, const std::string& dir) {
  std::vector<std::string> paths;
  for (const BranchReport* b : {&r.exact, &r.identified}) {
    paths.push_back(write_file(dir, "singular_values_" + b->name + ".csv", [&](std::ostream& o) {
      write_singular_value_csv(o, b->recovery.singular_values_s,
                               b->recovery.singular_values_s_plus_1);
    }));
  }
  return paths;
}

std::vector<std::string> emit_plot_data(const MonteCarloReport& r, const std::string& dir) {
  return {write_file(dir, "boxplot.csv", [&](std::ostream& o) { write_boxplot_csv(o, r.per_zero); }),
          write_file(dir, "boxplot_containment.csv",
                     [&](std::ostream& o) { write_boxplot_csv(o, r.containment_per_zero); })};
}

}  // namespace faultid
