#include "qbm/ensemble.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qbm/errors.hpp"

namespace qbm {

namespace {

constexpr int kObsCount = 7;  // n, n2, <x>, <p>, V_x, V_p, C_xp
constexpr int kChunkSize = 8;

// Per-chunk partial sums. Chunks are reduced in index order afterwards, so
// the final result is bit-identical for any thread count.
struct ChunkAccum {
  Eigen::ArrayXXd sum;    // nrec x kObsCount
  Eigen::ArrayXXd sumsq;  // nrec x kObsCount
  Eigen::MatrixXcd rho;   // sum of post-burn-in outer products (lower part)
  std::vector<std::array<double, 9>> traj_rows;
  std::vector<Eigen::VectorXd> traj_pops;
};

struct TrajError {
  long traj = -1;
  std::exception_ptr error;
};

}  // namespace

EnsembleResult run_ensemble(const EnsembleConfig& config, int n_threads) {
  const SseParams& params = config.params;
  const double dt = params.dt;
  if (config.n_traj < 1) {
    throw config_error("run_ensemble: n_traj must be >= 1");
  }
  if (config.t_final <= 0.0) {
    throw config_error("run_ensemble: t_final must be > 0");
  }
  if (config.burn_in < 0.0 || config.burn_in >= config.t_final) {
    throw config_error("run_ensemble: burn_in must lie in [0, t_final)");
  }
  const int dim = config.initial.space.dim;
  if (params.hamiltonian.space.dim != dim) {
    throw dimension_mismatch_error(
        "run_ensemble: initial state dim " + std::to_string(dim) +
        " vs hamiltonian dim " +
        std::to_string(params.hamiltonian.space.dim));
  }

  const long nsteps = std::llround(config.t_final / dt);
  const int stride = config.record_stride <= dt
                         ? 1
                         : static_cast<int>(
                               std::llround(config.record_stride / dt));
  const long nrec = nsteps / stride + 1;
  long r_start = static_cast<long>(
      std::ceil(config.burn_in / (stride * dt) - 1e-9));
  if (r_start < 0) r_start = 0;
  const long burn_samples = nrec - r_start;
  if (burn_samples < 1) {
    throw config_error(
        "run_ensemble: no recorded samples after burn_in; lower burn_in or "
        "the record stride");
  }

  const long n_traj = config.n_traj;
  const long n_chunks = (n_traj + kChunkSize - 1) / kChunkSize;
  std::vector<ChunkAccum> chunks(n_chunks);

  std::atomic<long> next_chunk{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  TrajError first_error;

  const RecordSpec rec{stride, false, true};

  auto worker = [&]() {
    for (;;) {
      const long c = next_chunk.fetch_add(1);
      if (c >= n_chunks || failed.load()) return;
      ChunkAccum& acc = chunks[c];
      acc.sum = Eigen::ArrayXXd::Zero(nrec, kObsCount);
      acc.sumsq = Eigen::ArrayXXd::Zero(nrec, kObsCount);
      acc.rho = Eigen::MatrixXcd::Zero(dim, dim);
      const long begin = c * kChunkSize;
      const long end = std::min(begin + kChunkSize, n_traj);
      for (long j = begin; j < end; ++j) {
        if (failed.load()) return;
        TrajectoryResult traj;
        try {
          traj = simulate_trajectory(config.initial, params, config.t_final,
                                     config.master_seed,
                                     static_cast<std::uint64_t>(j), rec);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (first_error.traj < 0 || j < first_error.traj) {
            first_error.traj = j;
            first_error.error = std::current_exception();
          }
          failed.store(true);
          return;
        }
        std::array<double, kObsCount> obs{};
        for (long r = 0; r < nrec; ++r) {
          obs = {traj.mean_n[r],          traj.mean_n2[r],
                 traj.moments[r].mean_x,  traj.moments[r].mean_p,
                 traj.moments[r].var_x,   traj.moments[r].var_p,
                 traj.moments[r].cov_xp};
          for (int o = 0; o < kObsCount; ++o) {
            acc.sum(r, o) += obs[o];
            acc.sumsq(r, o) += obs[o] * obs[o];
          }
        }
        std::array<double, 9> row{};
        Eigen::VectorXd pops = Eigen::VectorXd::Zero(dim);
        for (long r = r_start; r < nrec; ++r) {
          const Eigen::VectorXcd& psi = traj.states[r].amplitudes;
          acc.rho.selfadjointView<Eigen::Lower>().rankUpdate(psi, 1.0);
          row[0] += traj.mean_n[r];
          row[1] += traj.mean_n2[r];
          row[2] += traj.moments[r].mean_x;
          row[3] += traj.moments[r].mean_p;
          row[4] += traj.moments[r].mean_x * traj.moments[r].mean_x;
          row[5] += traj.moments[r].mean_p * traj.moments[r].mean_p;
          row[6] += traj.moments[r].var_x;
          row[7] += traj.moments[r].var_p;
          row[8] += traj.moments[r].cov_xp;
          pops += psi.cwiseAbs2();
        }
        for (double& v : row) v /= static_cast<double>(burn_samples);
        pops /= static_cast<double>(burn_samples);
        acc.traj_rows.push_back(row);
        acc.traj_pops.push_back(std::move(pops));
      }
    }
  };

  int threads = n_threads;
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
  }
  threads = static_cast<int>(std::min<long>(threads, n_chunks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  if (first_error.error) {
    try {
      std::rethrow_exception(first_error.error);
    } catch (const truncation_leakage_error& e) {
      throw truncation_leakage_error(
          "trajectory " + std::to_string(first_error.traj) + ": " + e.what());
    } catch (const degenerate_norm_error& e) {
      throw degenerate_norm_error(
          "trajectory " + std::to_string(first_error.traj) + ": " + e.what());
    }
    // Anything else propagates untouched.
  }

  // Ordered reduction.
  Eigen::ArrayXXd sum = Eigen::ArrayXXd::Zero(nrec, kObsCount);
  Eigen::ArrayXXd sumsq = Eigen::ArrayXXd::Zero(nrec, kObsCount);
  Eigen::MatrixXcd rho_sum = Eigen::MatrixXcd::Zero(dim, dim);
  EnsembleResult result;
  result.traj_mean_n.reserve(n_traj);
  result.traj_mean_n2.reserve(n_traj);
  result.traj_mean_x.reserve(n_traj);
  result.traj_mean_p.reserve(n_traj);
  result.traj_mean_x_sq.reserve(n_traj);
  result.traj_mean_p_sq.reserve(n_traj);
  result.traj_mean_var_x.reserve(n_traj);
  result.traj_mean_var_p.reserve(n_traj);
  result.traj_mean_cov_xp.reserve(n_traj);
  result.traj_populations.resize(n_traj, dim);
  long row_index = 0;
  for (long c = 0; c < n_chunks; ++c) {
    sum += chunks[c].sum;
    sumsq += chunks[c].sumsq;
    rho_sum += chunks[c].rho;
    for (std::size_t k = 0; k < chunks[c].traj_rows.size(); ++k) {
      const auto& row = chunks[c].traj_rows[k];
      result.traj_mean_n.push_back(row[0]);
      result.traj_mean_n2.push_back(row[1]);
      result.traj_mean_x.push_back(row[2]);
      result.traj_mean_p.push_back(row[3]);
      result.traj_mean_x_sq.push_back(row[4]);
      result.traj_mean_p_sq.push_back(row[5]);
      result.traj_mean_var_x.push_back(row[6]);
      result.traj_mean_var_p.push_back(row[7]);
      result.traj_mean_cov_xp.push_back(row[8]);
      result.traj_populations.row(row_index) =
          chunks[c].traj_pops[k].transpose();
      ++row_index;
    }
  }

  result.time_grid.resize(nrec);
  for (long r = 0; r < nrec; ++r) {
    result.time_grid[r] = r * stride * dt;
  }
  auto fill_series = [&](ObservableSeries& mean, ObservableSeries& se) {
    std::array<std::vector<double>*, kObsCount> means = {
        &mean.mean_n, &mean.mean_n2, &mean.mean_x, &mean.mean_p,
        &mean.var_x,  &mean.var_p,   &mean.cov_xp};
    std::array<std::vector<double>*, kObsCount> ses = {
        &se.mean_n, &se.mean_n2, &se.mean_x, &se.mean_p,
        &se.var_x,  &se.var_p,   &se.cov_xp};
    const double n = static_cast<double>(n_traj);
    for (int o = 0; o < kObsCount; ++o) {
      means[o]->resize(nrec);
      ses[o]->resize(nrec);
      for (long r = 0; r < nrec; ++r) {
        const double m = sum(r, o) / n;
        (*means[o])[r] = m;
        if (n_traj > 1) {
          double var = (sumsq(r, o) - n * m * m) / (n - 1.0);
          if (var < 0.0) var = 0.0;
          (*ses[o])[r] = std::sqrt(var / n);
        } else {
          (*ses[o])[r] = 0.0;
        }
      }
    }
  };
  fill_series(result.mean_observables, result.std_errors);

  const double total_samples = static_cast<double>(n_traj) * burn_samples;
  result.rho_ss.space = config.initial.space;
  result.rho_ss.entries =
      Eigen::MatrixXcd(rho_sum.selfadjointView<Eigen::Lower>()) /
      total_samples;
  result.populations_ss.resize(dim);
  for (int m = 0; m < dim; ++m) {
    result.populations_ss[m] = result.rho_ss.entries(m, m).real();
  }

  result.n_traj = static_cast<int>(n_traj);
  result.burn_samples_per_traj = static_cast<int>(burn_samples);
  result.dt = dt;
  result.burn_in = config.burn_in;
  result.t_final = config.t_final;
  return result;
}

DensityMatrix reconstruct_density(const std::vector<PureState>& states) {
  if (states.empty()) {
    throw insufficient_samples_error(
        "reconstruct_density: empty state list");
  }
  const int dim = states.front().space.dim;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim, dim);
  for (const PureState& s : states) {
    if (s.space.dim != dim) {
      throw dimension_mismatch_error(
          "reconstruct_density: state dim " + std::to_string(s.space.dim) +
          " vs " + std::to_string(dim));
    }
    acc.selfadjointView<Eigen::Lower>().rankUpdate(s.amplitudes, 1.0);
  }
  DensityMatrix rho;
  rho.space = states.front().space;
  rho.entries = Eigen::MatrixXcd(acc.selfadjointView<Eigen::Lower>()) /
                static_cast<double>(states.size());
  return rho;
}

SteadyStats steady_statistics(const EnsembleResult& result) {
  if (result.burn_samples_per_traj < 10) {
    throw insufficient_samples_error(
        "steady_statistics: " + std::to_string(result.burn_samples_per_traj) +
        " post-burn-in samples per trajectory, need >= 10");
  }
  const long n = result.n_traj;
  if (n < 1 || result.traj_mean_n.size() != static_cast<std::size_t>(n)) {
    throw insufficient_samples_error(
        "steady_statistics: result carries no per-trajectory averages");
  }
  const auto mean_of = [n](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(n);
  };
  const auto se_of = [n](const std::vector<double>& v, double m) {
    if (n < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(n - 1) /
                     static_cast<double>(n));
  };

  SteadyStats stats;
  stats.mean_n = mean_of(result.traj_mean_n);
  stats.se_n = se_of(result.traj_mean_n, stats.mean_n);
  stats.mean_n2 = mean_of(result.traj_mean_n2);
  stats.se_n2 = se_of(result.traj_mean_n2, stats.mean_n2);

  const int dim = static_cast<int>(result.traj_populations.cols());
  stats.populations.resize(dim);
  stats.populations_se.resize(dim);
  for (int m = 0; m < dim; ++m) {
    const double pm = result.traj_populations.col(m).mean();
    stats.populations[m] = pm;
    if (n > 1) {
      const double ss =
          (result.traj_populations.col(m).array() - pm).square().sum();
      stats.populations_se[m] = std::sqrt(
          ss / static_cast<double>(n - 1) / static_cast<double>(n));
    } else {
      stats.populations_se[m] = 0.0;
    }
  }

  // Pooled over trajectories and post-burn-in time samples: every
  // trajectory contributes the same number of samples, so the pooled
  // variance is the mean time-averaged square minus the squared pooled
  // mean.
  const double mx = mean_of(result.traj_mean_x);
  const double mp = mean_of(result.traj_mean_p);
  stats.var_of_mean_x = mean_of(result.traj_mean_x_sq) - mx * mx;
  stats.var_of_mean_p = mean_of(result.traj_mean_p_sq) - mp * mp;

  stats.mean_var_x = mean_of(result.traj_mean_var_x);
  stats.mean_var_p = mean_of(result.traj_mean_var_p);
  stats.mean_cov_xp = mean_of(result.traj_mean_cov_xp);
  return stats;
}

}  // namespace qbm
