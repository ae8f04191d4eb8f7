// Command-line driver: run experiments and emit plot-ready CSV tables.
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "experiment.hpp"
#include "qbm/errors.hpp"

namespace {

using qbm::tools::ExperimentConfig;

// The config file loads before CLI11 parses so flags override file values.
std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) {
      return argv[i + 1];
    }
    if (arg.rfind("--config=", 0) == 0) {
      return arg.substr(9);
    }
  }
  return {};
}

void add_flags(CLI::App& app, ExperimentConfig& cfg, std::string& model,
               std::string& hamiltonian, std::string& config_path) {
  app.add_option("--config", config_path,
                 "JSON config file; flags override its values");
  app.add_option("--model", model,
                 "lbme, sbme, pbme, sse, or joint-measurement");
  app.add_option("--hamiltonian", hamiltonian, "harmonic or kerr");
  app.add_option("--omega", cfg.omega, "oscillator frequency");
  app.add_option("--gamma", cfg.gamma, "damping rate");
  app.add_option("--ntherm", cfg.n_t, "thermal occupation n_T");
  app.add_option("--dim", cfg.dim, "Fock-space truncation dimension");
  app.add_option("--dt", cfg.dt, "integrator time step");
  app.add_option("--t-final", cfg.t_final, "simulated time span");
  app.add_option("--burn-in", cfg.burn_in,
                 "time discarded before steady-state averaging");
  app.add_option("--record-stride", cfg.record_stride,
                 "time between recorded samples");
  app.add_option("--trajectories", cfg.n_traj, "ensemble size");
  app.add_option("--seed", cfg.seed, "master RNG seed");
  app.add_option("--initial", cfg.initial,
                 "initial state, fock:<n> or coherent:<re>,<im>");
  app.add_option("--out", cfg.out, "output file (run) or directory (figures)");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace qbm::tools;

  ExperimentConfig cfg;
  std::string model_text;
  std::string hamiltonian_text;
  std::string config_path;
  std::vector<double> gammas = default_gamma_grid();

  const std::string preload = find_config_path(argc, argv);
  if (!preload.empty()) {
    try {
      cfg = load_config_file(preload);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 2;
    }
  }
  model_text = model_name(cfg.model);
  hamiltonian_text = hamiltonian_name(cfg.hamiltonian);

  CLI::App app{"Quantum Brownian motion simulation toolkit"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "run one experiment");
  CLI::App* fig1 = app.add_subcommand(
      "fig1", "mean phonon number vs time: lbme, pbme, and sse files");
  CLI::App* fig2 = app.add_subcommand(
      "fig2", "steady <n^2> vs damping sweep with population tables");
  CLI::App* check =
      app.add_subcommand("validate-config", "validate and print the config");

  for (CLI::App* sub : {run, fig1, fig2, check}) {
    add_flags(*sub, cfg, model_text, hamiltonian_text, config_path);
  }
  fig2->add_option("--gammas", gammas, "comma-separated damping rates")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    cfg.model = parse_model(model_text);
    cfg.hamiltonian = parse_hamiltonian(hamiltonian_text);
    validate(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  if (check->parsed()) {
    std::printf("%s\n", config_json(cfg).dump(2).c_str());
    return 0;
  }

  try {
    if (run->parsed()) {
      run_experiment(cfg);
    } else if (fig1->parsed()) {
      figure1(cfg);
    } else if (fig2->parsed()) {
      figure2(cfg, gammas);
    }
  } catch (const qbm::config_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
