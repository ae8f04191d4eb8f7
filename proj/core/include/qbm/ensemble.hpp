// Parallel Monte Carlo over SSE trajectories: ensemble averages with error
// bars, density-matrix reconstruction and steady-state statistics. Results
// are a deterministic function of the config alone, independent of thread
// count, via fixed-size trajectory chunks reduced in index order.
#pragma once

#include <cstdint>
#include <vector>

#include "qbm/fock.hpp"
#include "qbm/sse.hpp"

namespace qbm {

struct EnsembleConfig {
  SseParams params;  // carries dt, scheme and the Hamiltonian
  PureState initial;
  int n_traj = 1;
  double t_final = 1.0;
  double burn_in = 0.0;        // discarded before steady-state accumulation
  double record_stride = 0.0;  // time between records; <= dt records every step
  std::uint64_t master_seed = 0;
};

// Per-time-point ensemble averages (or standard errors of those averages).
struct ObservableSeries {
  std::vector<double> mean_n;
  std::vector<double> mean_n2;
  std::vector<double> mean_x;
  std::vector<double> mean_p;
  std::vector<double> var_x;
  std::vector<double> var_p;
  std::vector<double> cov_xp;
};

struct EnsembleResult {
  std::vector<double> time_grid;
  ObservableSeries mean_observables;
  ObservableSeries std_errors;  // SE across trajectories at each time point
  DensityMatrix rho_ss;         // time- and ensemble-averaged post burn-in
  std::vector<double> populations_ss;

  // Post-burn-in time averages per trajectory (batch means). Time samples
  // within a trajectory are autocorrelated; trajectories are independent,
  // so error bars come from the spread of these.
  int n_traj = 0;
  int burn_samples_per_traj = 0;
  std::vector<double> traj_mean_n;
  std::vector<double> traj_mean_n2;
  std::vector<double> traj_mean_x;
  std::vector<double> traj_mean_p;
  std::vector<double> traj_mean_x_sq;  // time average of <x>^2
  std::vector<double> traj_mean_p_sq;  // time average of <p>^2
  std::vector<double> traj_mean_var_x;
  std::vector<double> traj_mean_var_p;
  std::vector<double> traj_mean_cov_xp;
  Eigen::MatrixXd traj_populations;  // n_traj x dim time-averaged |psi_n|^2

  double dt = 0.0;
  double burn_in = 0.0;
  double t_final = 0.0;
};

// Runs config.n_traj independent trajectories with noise streams derived
// from (master_seed, trajectory index). n_threads = 0 picks the hardware
// concurrency. Any trajectory failure aborts the whole run: the error is
// rethrown with the trajectory index and timestamp, partial results are
// discarded.
EnsembleResult run_ensemble(const EnsembleConfig& config, int n_threads = 0);

// rho = (1/N) sum_j |psi_j><psi_j|; Hermitian trace-one PSD by construction.
DensityMatrix reconstruct_density(const std::vector<PureState>& states);

struct SteadyStats {
  double mean_n = 0.0;
  double se_n = 0.0;
  double mean_n2 = 0.0;
  double se_n2 = 0.0;
  std::vector<double> populations;
  std::vector<double> populations_se;
  // Variance of the trajectory means <x>, <p> over the steady ensemble
  // (pooled over post-burn-in samples); n_t for the Brownian unravelling.
  double var_of_mean_x = 0.0;
  double var_of_mean_p = 0.0;
  // Ensemble averages of the per-trajectory time-averaged covariances.
  double mean_var_x = 0.0;
  double mean_var_p = 0.0;
  double mean_cov_xp = 0.0;
};

// Time+ensemble steady-state averages with batch-means standard errors.
// Throws insufficient_samples_error unless every trajectory contributed
// at least 10 post-burn-in samples.
SteadyStats steady_statistics(const EnsembleResult& result);

}  // namespace qbm
