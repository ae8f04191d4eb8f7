// Acceptance gate: one pass/fail line per criterion, tolerances pinned in
// code. Exits nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "qbm/ensemble.hpp"
#include "qbm/fock.hpp"
#include "qbm/master_eq.hpp"
#include "qbm/observables.hpp"
#include "qbm/rng.hpp"
#include "qbm/sse.hpp"

using namespace qbm;
using std::numbers::pi;
using std::numbers::sqrt2;

namespace {

constexpr double kOmega = 2.0 * pi;
constexpr std::uint64_t kSeed = 20260815;

int failures = 0;
std::chrono::steady_clock::time_point t_start;

void report(int idx, const std::string& name, bool ok,
            const std::string& detail) {
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  std::printf("[%s] criterion %2d (%s): %s  [t=%.0fs]\n", ok ? "PASS" : "FAIL",
              idx, name.c_str(), detail.c_str(), elapsed);
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* spec, double a, double b = 0.0, double c = 0.0,
                double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), spec, a, b, c, d);
  return buf;
}

SteadyStats kerr_sweep_point(double gamma, double dt, double t_final,
                             double burn_in, int n_traj, int dim = 34) {
  // dim 34 leaves headroom for rare trajectory excursions over the long
  // horizons (the steady moments shift by well under 1% from dim 30);
  // the strongest-feedback point passes a larger dim because its
  // excursions carry fatter high-n tails
  const FockSpace space = make_space(dim);
  EnsembleConfig config;
  config.params = SseParams::brownian(gamma, 1.0, dt,
                                      kerr_hamiltonian(space, kOmega),
                                      SseScheme::split_step);
  config.initial = fock_state(space, 0);
  config.n_traj = n_traj;
  config.t_final = t_final;
  config.burn_in = burn_in;
  config.record_stride = 0.01;
  config.master_seed = kSeed;
  return steady_statistics(run_ensemble(config));
}

void criterion_1_2() {
  const int dim = 30;
  const FockSpace space = make_space(dim);
  const DensityMatrix rho0 = pure_to_density(fock_state(space, 0));
  const DensityMatrix geo = thermal_geometric(1.0, dim);

  const MeModel harm =
      MeModel::lbme(4.0, 1.0, harmonic_hamiltonian(space, kOmega));
  const SteadyStateResult ss_h = steady_state(harm, rho0, 1e-4, 1e-8, 60.0);
  const PhononStats st_h = phonon_stats(ss_h.rho);
  double worst_pop = 0.0;
  for (int n = 0; n < dim; ++n) {
    worst_pop = std::max(worst_pop, std::abs(st_h.populations[n] -
                                             geo.entries(n, n).real()));
  }
  report(1, "lbme harmonic steady state",
         std::abs(st_h.mean_n - 1.0) < 1e-3 && worst_pop < 1e-4,
         fmt("<n> = %.6f (want 1 +- 1e-3), worst population deviation "
             "%.2e (want < 1e-4)",
             st_h.mean_n, worst_pop));

  const MeModel kerr = MeModel::lbme(4.0, 1.0, kerr_hamiltonian(space, kOmega));
  const SteadyStateResult ss_k = steady_state(kerr, rho0, 1e-4, 1e-8, 60.0);
  const PhononStats st_k = phonon_stats(ss_k.rho);
  double swap_dev = 0.0;
  for (int n = 0; n < dim; ++n) {
    swap_dev = std::max(
        swap_dev, std::abs(st_k.populations[n] - st_h.populations[n]));
  }
  report(2, "lbme is blind to the energy levels",
         swap_dev < 1e-4 && std::abs(st_k.mean_n2 - 3.0) < 0.01,
         fmt("harmonic vs kerr population shift %.2e (want < 1e-4), "
             "kerr <n^2> = %.4f (want 3.00 +- 0.01)",
             swap_dev, st_k.mean_n2));
}

void criterion_3() {
  ThermalSpec spec;
  spec.n_t = 1.0;
  spec.omega = kOmega;
  spec.energies = kerr_energies(kOmega, 50);
  const std::vector<double> p = boltzmann_distribution(spec, 30);
  double n2 = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    n2 += static_cast<double>(n) * static_cast<double>(n) * p[n];
  }
  report(3, "kerr thermal reference", n2 > 0.485 && n2 < 0.495,
         fmt("Boltzmann <n^2> = %.5f (want in [0.485, 0.495])", n2));
}

void criteria_4_5() {
  const int dim = 30;
  const FockSpace space = make_space(dim);
  EnsembleConfig config;
  config.params = SseParams::brownian(4.0, 1.0, 1e-4,
                                      harmonic_hamiltonian(space, kOmega));
  config.initial = fock_state(space, 0);
  config.n_traj = 2000;
  config.t_final = 15.0;
  config.burn_in = 5.0;
  config.record_stride = 0.01;
  config.master_seed = kSeed;
  const EnsembleResult result = run_ensemble(config);
  const SteadyStats stats = steady_statistics(result);

  const DensityMatrix geo = thermal_geometric(1.0, dim);
  double worst_z = 0.0;
  int worst_level = 0;
  for (int n = 0; n < dim; ++n) {
    const double want = geo.entries(n, n).real();
    if (want < 1e-4) break;  // below the estimator's resolution
    const double z =
        std::abs(stats.populations[n] - want) / stats.populations_se[n];
    if (z > worst_z) {
      worst_z = z;
      worst_level = n;
    }
  }
  report(4, "sse harmonic thermalization",
         std::abs(stats.mean_n - 1.0) < 0.1 && worst_z < 3.0,
         fmt("<n> = %.4f +- %.4f (want 1.0 +- 0.1), worst population "
             "z-score %.2f at level %.0f (want < 3)",
             stats.mean_n, stats.se_n, worst_z,
             static_cast<double>(worst_level)));

  int good = 0;
  for (int j = 0; j < result.n_traj; ++j) {
    if (std::abs(result.traj_mean_var_x[j] - 0.5) < 0.02 &&
        std::abs(result.traj_mean_var_p[j] - 0.5) < 0.02 &&
        std::abs(result.traj_mean_cov_xp[j]) < 0.02) {
      ++good;
    }
  }
  const double frac = static_cast<double>(good) / result.n_traj;
  report(5, "per-trajectory gaussian collapse", frac >= 0.95,
         fmt("%.1f%% of trajectories hold |V_x-1/2|, |V_p-1/2|, |C_xp| "
             "< 0.02 time-averaged (want >= 95%%)",
             100.0 * frac));
}

void criterion_6() {
  const FockSpace space = make_space(30);
  // dt small enough that the O(dt) bias of the one-step variance is well
  // below the 5% window; 2e5 samples keep 3 standard errors below the
  // drift signal (gamma/2) <p> dt.
  const double gamma = 4.0, n_t = 1.0, dt = 2e-4;
  const SseParams params = SseParams::brownian(
      gamma, n_t, dt, harmonic_hamiltonian(space, kOmega));
  const PureState st = coherent_state(space, complexd(0.0, 1.0 / sqrt2));
  const Moments m0 = moments(st);

  const int samples = 200000;
  GaussianRng rng(kSeed, 1);
  const double sdt = std::sqrt(dt);
  double psum = 0.0, psumsq = 0.0, xsum = 0.0, xsumsq = 0.0;
  for (int i = 0; i < samples; ++i) {
    const NoisePair noise{rng.normal() * sdt, rng.normal() * sdt};
    const Moments m = moments(sse_step(st, params, noise));
    const double dp = m.mean_p - m0.mean_p;
    const double dx = m.mean_x - m0.mean_x;
    psum += dp;
    psumsq += dp * dp;
    xsum += dx;
    xsumsq += dx * dx;
  }
  const double pmean = psum / samples;
  const double pvar = psumsq / samples - pmean * pmean;
  const double xmean = xsum / samples;
  const double xvar = xsumsq / samples - xmean * xmean;
  const double want_drift =
      -0.5 * gamma * m0.mean_p * dt - kOmega * m0.mean_x * dt;
  const double se = std::sqrt(pvar / samples);
  const bool drift_ok = std::abs(pmean - want_drift) < 3.0 * se;
  const bool pvar_ok = std::abs(pvar - gamma * n_t * dt) < 0.05 * gamma * n_t * dt;
  const bool xvar_ok = xvar < 0.05 * gamma * n_t * dt;
  report(6, "langevin drift and diffusion", drift_ok && pvar_ok && xvar_ok,
         fmt("d<p> drift %.2e vs theory %.2e (3se = %.2e); Var d<p> "
             "ratio %.3f (want 1 +- 0.05)",
             pmean, want_drift, 3.0 * se, pvar / (gamma * n_t * dt)) +
             fmt("; Var d<x> / (gamma n_T dt) = %.4f (want < 0.05)",
                 xvar / (gamma * n_t * dt)));
}

void criterion_7() {
  const FockSpace space = make_space(30);
  const double k = 1.0, dt = 1e-4, t_final = 2.0;
  const SseParams params =
      SseParams::joint(k, dt, harmonic_hamiltonian(space, kOmega));
  const PureState coh = coherent_state(space, complexd(1.0, 0.0));
  const TrajectoryResult traj =
      simulate_trajectory(coh, params, t_final, kSeed, 2, RecordSpec{10});

  CovarianceState c{0.5, 0.5, 0.0};
  const auto add = [](const CovarianceState& a, const CovarianceState& b,
                      double w) {
    return CovarianceState{a.var_x + w * b.var_x, a.var_p + w * b.var_p,
                           a.cov_xp + w * b.cov_xp};
  };
  double dev = 0.0;
  std::size_t r = 1;
  const int steps = static_cast<int>(std::llround(t_final / dt));
  for (int i = 1; i <= steps; ++i) {
    const CovarianceState k1 = covariance_ode_rhs(c, k, kOmega);
    const CovarianceState k2 = covariance_ode_rhs(add(c, k1, dt / 2), k, kOmega);
    const CovarianceState k3 = covariance_ode_rhs(add(c, k2, dt / 2), k, kOmega);
    const CovarianceState k4 = covariance_ode_rhs(add(c, k3, dt), k, kOmega);
    c.var_x += dt / 6.0 * (k1.var_x + 2 * k2.var_x + 2 * k3.var_x + k4.var_x);
    c.var_p += dt / 6.0 * (k1.var_p + 2 * k2.var_p + 2 * k3.var_p + k4.var_p);
    c.cov_xp +=
        dt / 6.0 * (k1.cov_xp + 2 * k2.cov_xp + 2 * k3.cov_xp + k4.cov_xp);
    if (i % 10 == 0) {
      dev = std::max(dev, std::abs(traj.moments[r].var_x - c.var_x));
      dev = std::max(dev, std::abs(traj.moments[r].var_p - c.var_p));
      dev = std::max(dev, std::abs(traj.moments[r].cov_xp - c.cov_xp));
      ++r;
    }
  }
  const double tol = 5.0 * std::sqrt(dt);
  report(7, "covariances track the deterministic oracle", dev <= tol,
         fmt("max |trajectory - ode| = %.4f over 2 periods (want <= %.4f)",
             dev, tol));
}

void criterion_8() {
  const SteadyStats stats = kerr_sweep_point(0.1, 2.5e-4, 100.0, 40.0, 1000);
  ThermalSpec spec;
  spec.n_t = 1.0;
  spec.omega = kOmega;
  spec.energies = kerr_energies(kOmega, 50);
  const double p0_thermal = boltzmann_distribution(spec, 30)[0];
  const bool n2_ok = std::abs(stats.mean_n2 - 0.24) < 0.05;
  const bool p0_ok = stats.populations[0] > p0_thermal;
  report(8, "weak-damping kerr steady energy", n2_ok && p0_ok,
         fmt("<n^2> = %.4f +- %.4f (want 0.24 +- 0.05); ground weight "
             "%.4f vs thermal %.4f (want larger)",
             stats.mean_n2, stats.se_n2, stats.populations[0], p0_thermal));
}

void criteria_9_10() {
  // Two failure modes set the step sizes and dimensions here. First, the
  // feedback quadratics ignite a runaway on rare noise excursions once
  // (gamma n_T)^2 dt reaches ~2.6e-4 (violent by 4e-4), pumping the top
  // Fock levels at any dimension; every dt below keeps gamma^2 dt at or
  // under 1.28e-4, where that mode is fully suppressed. Second, with the
  // runaway off, the strongest feedback still transiently squeezes rare
  // trajectories into states whose high-n tails dwarf their means: gamma
  // 6.4 events peaking at <n> ~ 5 grazed the 1e-4 guard at dim 34 and
  // even dim 44, and the measured tail falls only ~0.3 decades per Fock
  // level (worst event: 7.8e-7 at dim 48, 2.1e-10 at dim 60). The gamma
  // 6.4 point therefore runs at dim 60, putting the hottest observed
  // event 5.7 decades under the guard, with a short burn-in (5 time
  // units is 16 damping times) to limit guard exposure.
  const SteadyStats s04 = kerr_sweep_point(0.4, 2.5e-4, 60.0, 20.0, 160);
  const SteadyStats s16 = kerr_sweep_point(1.6, 5e-5, 40.0, 10.0, 160);
  const double lo = s04.mean_n2 - 0.49;
  const double hi = s16.mean_n2 - 0.49;
  report(9, "thermal crossing between gamma 0.4 and 1.6", lo * hi < 0.0,
         fmt("<n^2> - 0.49 = %+.4f at gamma 0.4 and %+.4f at gamma 1.6 "
             "(want a sign change)",
             lo, hi));

  const SteadyStats s32 = kerr_sweep_point(3.2, 1.25e-5, 40.0, 10.0, 160);
  const SteadyStats s64 = kerr_sweep_point(6.4, 3.125e-6, 25.0, 5.0, 160, 60);
  const bool near_three = std::abs(s64.mean_n2 - 3.0) <= 0.2 * 3.0;
  const bool rising = s64.mean_n2 > s32.mean_n2;
  report(10, "strong-damping approach to the harmonic thermal value",
         near_three && rising,
         fmt("<n^2> = %.4f +- %.4f at gamma 6.4 (want within 20%% of 3); "
             "gamma 3.2 -> 6.4 moves %.4f -> %.4f (want rising)",
             s64.mean_n2, s64.se_n2, s32.mean_n2, s64.mean_n2));
}

void criterion_11() {
  const FockSpace space = make_space(30);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(30);
  v(0) = v(2) = 1.0 / sqrt2;
  const DensityMatrix rho0 = pure_to_density(PureState{space, v, true});
  const MeModel model =
      MeModel::pbme(4.0, 1.0, harmonic_hamiltonian(space, kOmega));

  double min_eig = 1.0;
  const MeObserver obs = [&](double, const DensityMatrix& rho) {
    min_eig = std::min(min_eig, physicality_report(rho).min_eigenvalue);
  };
  evolve(rho0, make_rhs(model), 1e-4, 3.0, obs, 10);

  const SteadyStateResult ss = steady_state(
      model, pure_to_density(fock_state(space, 0)), 1e-4, 1e-8, 60.0);
  const double mean_n = phonon_stats(ss.rho).mean_n;
  report(11, "pbme positivity and heating", min_eig >= -1e-8 && mean_n > 1.0,
         fmt("min eigenvalue along the run %.2e (want >= -1e-8); steady "
             "<n> = %.5f (want > n_T = 1)",
             min_eig, mean_n));
}

void criterion_12() {
  std::string detail;
  bool ok = true;

  // trace preservation and hermiticity along a master-equation run
  {
    const FockSpace space = make_space(20);
    const MeModel model =
        MeModel::lbme(4.0, 1.0, harmonic_hamiltonian(space, kOmega));
    double tr = 0.0, he = 0.0;
    const MeObserver obs = [&](double, const DensityMatrix& rho) {
      tr = std::max(tr, std::abs(rho.entries.trace().real() - 1.0));
      he = std::max(
          he, (rho.entries - rho.entries.adjoint()).cwiseAbs().maxCoeff());
    };
    evolve(pure_to_density(coherent_state(space, complexd(1.0, 0.0))),
           make_rhs(model), 1e-4, 2.0, obs, 10);
    ok = ok && tr <= 1e-8 && he <= 1e-10;
    detail += fmt("trace drift %.1e, hermiticity %.1e", tr, he);
  }

  // sse normalization
  {
    const FockSpace space = make_space(20);
    const SseParams params = SseParams::brownian(
        4.0, 1.0, 1e-4, harmonic_hamiltonian(space, kOmega));
    RecordSpec rec;
    rec.stride = 100;
    rec.record_states = true;
    const TrajectoryResult traj =
        simulate_trajectory(fock_state(space, 0), params, 1.0, kSeed, 3, rec);
    double worst = 0.0;
    for (const PureState& s : traj.states) {
      worst = std::max(worst, std::abs(s.amplitudes.norm() - 1.0));
    }
    ok = ok && worst <= 1e-10;
    detail += fmt("; norm drift %.1e", worst);
  }

  // determinism by seed and across thread counts
  {
    const FockSpace space = make_space(16);
    EnsembleConfig config;
    config.params = SseParams::brownian(4.0, 1.0, 1e-4,
                                        harmonic_hamiltonian(space, kOmega));
    config.initial = fock_state(space, 0);
    config.n_traj = 24;
    config.t_final = 0.5;
    config.burn_in = 0.2;
    config.record_stride = 0.01;
    config.master_seed = kSeed;
    const EnsembleResult a = run_ensemble(config, 1);
    const EnsembleResult b = run_ensemble(config, 4);
    double dev = (a.rho_ss.entries - b.rho_ss.entries).cwiseAbs().maxCoeff();
    for (std::size_t r = 0; r < a.time_grid.size(); ++r) {
      dev = std::max(dev, std::abs(a.mean_observables.mean_n[r] -
                                   b.mean_observables.mean_n[r]));
    }
    ok = ok && dev == 0.0;
    detail += fmt("; thread-count deviation %.1f", dev);
  }

  // rk4 order
  {
    const FockSpace space = make_space(10);
    const MeModel model =
        MeModel::lbme(4.0, 1.0, harmonic_hamiltonian(space, kOmega));
    const MeRhs rhs = make_rhs(model);
    const DensityMatrix rho0 = pure_to_density(fock_state(space, 0));
    const Operator a = annihilation(space);
    const Operator num{space, a.entries.adjoint() * a.entries, true};
    const auto n_at = [&](double dt) {
      return density_expectation(num, evolve(rho0, rhs, dt, 0.1)).real();
    };
    const double ref = n_at(2.5e-4);
    const double ratio = std::abs(n_at(4e-3) - ref) /
                         std::abs(n_at(2e-3) - ref);
    ok = ok && ratio > 10.0 && ratio < 22.0;
    detail += fmt("; rk4 halving ratio %.1f", ratio);
  }

  // boltzmann/geometric identity
  {
    ThermalSpec spec;
    spec.n_t = 1.0;
    spec.omega = kOmega;
    spec.energies = harmonic_energies(kOmega, 50);
    const std::vector<double> p = boltzmann_distribution(spec, 30);
    const DensityMatrix geo = thermal_geometric(1.0, 30);
    double dev = 0.0;
    for (int n = 0; n < 30; ++n) {
      dev = std::max(dev, std::abs(p[n] - geo.entries(n, n).real()));
    }
    ok = ok && dev < 1e-12;
    detail += fmt("; boltzmann vs geometric %.1e", dev);
  }

  report(12, "property suite", ok, detail);
}

}  // namespace

int main() {
  t_start = std::chrono::steady_clock::now();
  std::printf("acceptance suite: 12 criteria\n");
  const auto guarded = [](const char* ids, int n_criteria, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      failures += n_criteria;
      std::printf("[FAIL] criteria %s aborted: %s\n", ids, e.what());
      std::fflush(stdout);
    }
  };
  guarded("1-2", 2, criterion_1_2);
  guarded("3", 1, criterion_3);
  guarded("4-5", 2, criteria_4_5);
  guarded("6", 1, criterion_6);
  guarded("7", 1, criterion_7);
  guarded("8", 1, criterion_8);
  guarded("9-10", 2, criteria_9_10);
  guarded("11", 1, criterion_11);
  guarded("12", 1, criterion_12);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
