// Experiment drivers: configuration, validation, and CSV emission for the
// time-series, thermalization-figure and damping-sweep runs.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace qbm::tools {

enum class Model { lbme, sbme, pbme, sse, joint_measurement };
enum class Hamiltonian { harmonic, kerr };

struct ExperimentConfig {
  Model model = Model::lbme;
  Hamiltonian hamiltonian = Hamiltonian::harmonic;
  double omega = 6.283185307179586;  // one oscillation per unit time
  double gamma = 4.0;
  double n_t = 1.0;
  double dt = 1e-4;
  double t_final = 15.0;
  double burn_in = 5.0;
  double record_stride = 0.01;
  int dim = 30;
  int n_traj = 2000;
  std::uint64_t seed = 12345;
  std::string initial = "fock:0";  // "fock:<n>" or "coherent:<re>,<im>"
  std::string out = "run.csv";     // file for run, directory for figures
};

std::string model_name(Model m);
std::string hamiltonian_name(Hamiltonian h);
Model parse_model(const std::string& name);
Hamiltonian parse_hamiltonian(const std::string& name);

// Flat key-value config; unknown keys are rejected. Keys follow the CLI
// flag names: model, hamiltonian, omega, gamma, ntherm, dim, dt, t_final,
// burn_in, record_stride, trajectories, seed, initial, out.
void apply_json(const nlohmann::json& j, ExperimentConfig& cfg);
ExperimentConfig load_config_file(const std::string& path);
nlohmann::json config_json(const ExperimentConfig& cfg);

// Full validation: ranges, variant restrictions (sbme needs n_t > 0) and
// constructibility of the initial state at the requested dim. Throws
// config_error.
void validate(const ExperimentConfig& cfg);

// Single run: manifest + time series (+ steady statistics block for the
// stochastic models) written to cfg.out.
void run_experiment(const ExperimentConfig& cfg);

// Harmonic thermalization curves: fig1_lbme.csv, fig1_pbme.csv and
// fig1_sse.csv written into the directory cfg.out.
void figure1(const ExperimentConfig& cfg);

// Damping sweep for the Kerr oscillator: fig2_sweep.csv plus one
// fig2_pops_g<gamma>.csv per entry of gammas, written into cfg.out. The
// integration step is tightened automatically for strong damping.
void figure2(const ExperimentConfig& cfg, const std::vector<double>& gammas);

// The sweep default spans weak to strong damping around the thermal
// crossing.
std::vector<double> default_gamma_grid();

}  // namespace qbm::tools
