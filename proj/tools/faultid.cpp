// faultid: identify a system from faulty data, recover the fault channel and
// run the example / Monte-Carlo experiments.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "faultid/harness.hpp"

namespace fs = std::filesystem;
using namespace faultid;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kNumericalError = 3;

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool verbose = false;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

Trajectory read_trajectory(const std::string& path, Role role) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  try {
    return read_trajectory_csv(in, role);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

std::string write_out(const fs::path& dir, const std::string& name,
                      const std::function<void(std::ostream&)>& body) {
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open " + path.string() + " for writing");
  body(out);
  return path.string();
}

void write_json(const fs::path& dir, const std::string& name, const json& j) {
  write_out(dir, name, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

ExperimentConfig load_config(const Globals& g, ExperimentConfig base) {
  if (!g.config_path.empty()) base = config_from_json(read_json_file(g.config_path), base);
  if (g.seed) base.seed = *g.seed;
  if (g.out) base.out_dir = *g.out;
  return base;
}

void log(const Globals& g, const std::string& msg) {
  if (g.verbose) std::cerr << msg << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fault-channel identification from input-output data"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "JSON experiment config");
  app.add_option("--seed", g.seed, "Base random seed");
  app.add_option("--out", g.out, "Output directory");
  app.add_flag("--verbose", g.verbose, "Progress on stderr");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate a system with an additive fault");
  std::string sim_system, sim_fault = "v1";
  std::optional<Eigen::Index> sim_T, sim_zeros;
  std::optional<double> sim_snr;
  sim->add_option("--system", sim_system, "System JSON (default: the built-in example)");
  sim->add_option("--random-zeros", sim_zeros,
                  "Generate a random system with this many finite zeros (config dims)");
  sim->add_option("--T", sim_T, "Number of samples");
  sim->add_option("--fault", sim_fault, "Fault signal")->check(CLI::IsMember({"v1", "v2", "none"}));
  sim->add_option("--snr", sim_snr, "Output SNR in dB (default: noise-free)");

  // identify
  auto* ident = app.add_subcommand("identify", "PI-MOESP identification from u/y CSV");
  std::string id_u, id_y, id_order = "auto";
  std::optional<Eigen::Index> id_window;
  ident->add_option("--u", id_u, "Input trajectory CSV")->required();
  ident->add_option("--y", id_y, "Output trajectory CSV")->required();
  ident->add_option("--window", id_window, "Window s (default 10)");
  ident->add_option("--order", id_order, "Model order or 'auto'");

  // fault-recover
  auto* rec = app.add_subcommand("fault-recover", "Recover (F, G) and reconstruct the fault");
  std::string fr_u, fr_y, fr_system, fr_policy = "rel", fr_rep = "leading";
  std::optional<Eigen::Index> fr_window, fr_nv;
  std::optional<double> fr_tol;
  rec->add_option("--u", fr_u, "Input trajectory CSV")->required();
  rec->add_option("--y", fr_y, "Output trajectory CSV")->required();
  rec->add_option("--system", fr_system, "Identified system JSON")->required();
  rec->add_option("--window", fr_window, "Window s (default 2 n_x)");
  rec->add_option("--rank-policy", fr_policy, "Rank policy")->check(CLI::IsMember({"rel", "gap"}));
  rec->add_option("--rank-tol", fr_tol, "Relative tolerance (rel) or minimum gap ratio (gap)");
  rec->add_option("--policy", fr_rep, "Representative selection")
      ->check(CLI::IsMember({"leading", "sparse-G", "sparse-F"}));
  rec->add_option("--nv", fr_nv, "Override the estimated fault dimension");

  auto* example = app.add_subcommand("example", "Run the single-system example");
  auto* mc = app.add_subcommand("montecarlo", "Run the Monte-Carlo study");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*sim) {
      ExperimentConfig c = load_config(g, ExperimentConfig::example_defaults());
      if (sim_T) c.T = *sim_T;
      if (c.T < 1) throw std::invalid_argument("--T must be >= 1");
      StateSpace sys;
      FaultPair fault;
      if (!sim_system.empty()) {
        sys = system_from_json(read_json_file(sim_system), &fault);
        if (fault.F.size() == 0) throw std::invalid_argument(sim_system + ": missing F and G");
      } else if (sim_zeros) {
        const GeneratedSystem gen = with_stage("generate", [&] {
          return random_system(c.dims, *sim_zeros, c.seed);
        });
        sys = gen.sys;
        fault = gen.fault;
      } else {
        sys = paper_example_system();
        fault = paper_example_fault();
      }
      std::mt19937_64 rng(c.seed);
      const std::uint64_t u_seed = rng(), v_seed = rng(), w_seed = rng();
      const Trajectory u = white_input(sys.nu(), c.T, u_seed);
      Matrix vs = Matrix::Zero(fault.nv(), c.T);
      if (sim_fault != "none") {
        const FaultKind kind = sim_fault == "v1" ? FaultKind::V1 : FaultKind::V2;
        for (Eigen::Index i = 0; i < fault.nv(); ++i) {
          vs.row(i) = paper_fault_signal(kind, c.T, v_seed + static_cast<std::uint64_t>(i)).samples();
        }
      }
      const Trajectory v(Role::Fault, std::move(vs));
      std::normal_distribution<double> normal;
      Vector x0(sys.nx());
      for (Eigen::Index i = 0; i < x0.size(); ++i) x0(i) = normal(rng);
      SimulationResult res = with_stage("simulate", [&] { return simulate(sys, fault, x0, u, v); });
      if (sim_snr) {
        const Trajectory w = with_stage("noise", [&] {
          return colored_noise(sys.ny(), c.T, *sim_snr, res.y, w_seed);
        });
        res = simulate(sys, fault, x0, u, v, w);
      }
      const fs::path dir = c.out_dir;
      write_out(dir, "u.csv", [&](std::ostream& o) { write_trajectory_csv(o, u); });
      write_out(dir, "v.csv", [&](std::ostream& o) { write_trajectory_csv(o, v); });
      write_out(dir, "y.csv", [&](std::ostream& o) { write_trajectory_csv(o, res.y); });
      write_out(dir, "x.csv", [&](std::ostream& o) { write_trajectory_csv(o, res.x); });
      write_json(dir, "system.json", system_to_json(sys, fault, c.seed));
      log(g, "wrote u, v, y, x and system.json to " + dir.string());
    } else if (*ident) {
      const ExperimentConfig c = load_config(g, ExperimentConfig::example_defaults());
      const Trajectory u = read_trajectory(id_u, Role::Input);
      const Trajectory y = read_trajectory(id_y, Role::Output);
      std::optional<Eigen::Index> order;
      if (id_order != "auto") {
        const double o = parse_double(id_order);
        if (o < 1 || o != std::floor(o)) throw std::invalid_argument("--order must be a positive integer or 'auto'");
        order = static_cast<Eigen::Index>(o);
      }
      const Eigen::Index s = id_window ? *id_window : default_window(order);
      const IdentResult r = with_stage("identify", [&] { return pi_moesp(u, y, s, order); });
      write_json(c.out_dir, "ident.json", ident_to_json(r));
      log(g, "order " + std::to_string(r.chosen_order) + (r.low_confidence ? " (low confidence)" : ""));
    } else if (*rec) {
      const ExperimentConfig c = load_config(g, ExperimentConfig::example_defaults());
      const json sys_json = read_json_file(fr_system);
      const StateSpace sys = system_from_json(sys_json);
      const Trajectory u = read_trajectory(fr_u, Role::Input);
      const Trajectory y = read_trajectory(fr_y, Role::Output);
      const Eigen::Index s = fr_window ? *fr_window : c.recovery_window(sys.nx());
      const RankPolicy policy = fr_policy == "rel" ? RankPolicy::relative(fr_tol.value_or(1e-8))
                                                   : RankPolicy::gap(fr_tol.value_or(10.0));
      const FaultRecovery fr = with_stage("recover", [&] {
        return recover_from_data(y, u, sys, s, {policy, policy});
      });
      const Eigen::Index nv = fr_nv.value_or(fr.n_v_estimate);
      const FaultPair rep = with_stage("select", [&] {
        return select_representative(fr, parse_representative(fr_rep), nv);
      });
      Vector xt = Vector::Zero(sys.nx());
      if (sys_json.contains("x_tilde_0")) {
        const auto values = sys_json.at("x_tilde_0").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(values.size()) == sys.nx()) {
          xt = Eigen::Map<const Vector>(values.data(), sys.nx());
        }
      }
      const FaultReconstruction rc =
          with_stage("reconstruct", [&] { return reconstruct_fault(y, u, sys, rep, xt); });
      const fs::path dir = c.out_dir;
      const std::string v_path =
          write_out(dir, "v_hat.csv", [&](std::ostream& o) { write_trajectory_csv(o, rc.v); });
      json j;
      j["window_s"] = fr.window_s;
      j["n_v"] = fr.n_v_estimate;
      j["n_z"] = fr.n_z;
      j["rank_s"] = fr.rank_s;
      j["rank_s_plus_1"] = fr.rank_s_plus_1;
      j["singular_values_s"] = fr.singular_values_s;
      j["singular_values_s_plus_1"] = fr.singular_values_s_plus_1;
      j["F_hat"] = matrix_to_json(fr.F_hat);
      j["G_hat"] = matrix_to_json(fr.G_hat);
      j["policy"] = fr_rep;
      j["representative"] = {{"F", matrix_to_json(rep.F)}, {"G", matrix_to_json(rep.G)}};
      j["xi0"] = std::vector<double>(rc.xi0.data(), rc.xi0.data() + rc.xi0.size());
      j["v_csv"] = fs::path(v_path).filename().string();
      j["replay_residual"] = rc.replay_residual;
      write_json(dir, "fault_report.json", j);
      log(g, "n_v = " + std::to_string(fr.n_v_estimate) + ", n_z = " + std::to_string(fr.n_z));
    } else if (*example) {
      const ExperimentConfig c = load_config(g, ExperimentConfig::example_defaults());
      const ExampleReport r = run_example(c);
      write_json(c.out_dir, "example_report.json", example_to_json(r));
      for (const auto& p : emit_plot_data(r, c.out_dir)) log(g, "wrote " + p);
      log(g, "exact: n_v = " + std::to_string(r.exact.recovery.n_v_estimate) +
                 ", grassmann " + format_double(r.exact.grassmann_error) + "%; identified: " +
                 format_double(r.identified.grassmann_error) + "%");
    } else if (*mc) {
      const ExperimentConfig c = load_config(g, ExperimentConfig::montecarlo_defaults());
      const auto start = std::chrono::steady_clock::now();
      const MonteCarloReport r = run_montecarlo(c);
      write_json(c.out_dir, "montecarlo_report.json", montecarlo_to_json(r));
      for (const auto& p : emit_plot_data(r, c.out_dir)) log(g, "wrote " + p);
      log(g, "overall median " + format_double(r.overall_median) + "% in " +
                 format_double(std::chrono::duration<double>(
                                   std::chrono::steady_clock::now() - start).count()) + " s");
    }
  } catch (const StageError& e) {
    std::cerr << "error " << e.what() << '\n';
    return e.numerical() ? kNumericalError : kInputError;
  } catch (const NumericalError& e) {
    std::cerr << "error [numerical]: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error [input]: " << e.what() << '\n';
    return kInputError;
  }
  return kOk;
}
