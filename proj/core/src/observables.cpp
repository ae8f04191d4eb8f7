#include "qbm/observables.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "qbm/errors.hpp"

namespace qbm {

std::vector<double> harmonic_energies(double omega, int count) {
  std::vector<double> e(count);
  for (int n = 0; n < count; ++n) {
    e[n] = omega * (n + 0.5);
  }
  return e;
}

std::vector<double> kerr_energies(double omega, int count) {
  std::vector<double> e(count);
  for (int n = 0; n < count; ++n) {
    e[n] = omega * static_cast<double>(n) * n;
  }
  return e;
}

DensityMatrix thermal_geometric(double n_t, int dim) {
  if (n_t < 0.0) {
    throw config_error("thermal_geometric: n_t must be >= 0");
  }
  if (dim < 2) {
    throw invalid_dimension_error("thermal_geometric: dim must be >= 2");
  }
  const double r = n_t / (n_t + 1.0);
  // Exact tail mass of the untruncated distribution: sum_{n>=dim} of
  // (1-r) r^n = r^dim.
  const double tail = std::pow(r, dim);
  if (tail > 1e-6) {
    throw truncation_leakage_error(
        "thermal_geometric: tail weight " + std::to_string(tail) +
        " beyond dim " + std::to_string(dim) + " exceeds 1e-6; raise dim");
  }
  DensityMatrix rho;
  rho.space = FockSpace{dim};
  rho.entries = Eigen::MatrixXcd::Zero(dim, dim);
  double w = 1.0;
  double total = 0.0;
  for (int n = 0; n < dim; ++n) {
    rho.entries(n, n) = w;
    total += w;
    w *= r;
  }
  rho.entries /= total;
  return rho;
}

std::vector<double> boltzmann_distribution(const ThermalSpec& spec, int dim) {
  if (spec.n_t <= 0.0) {
    throw config_error("boltzmann_distribution: n_t must be > 0");
  }
  if (spec.omega <= 0.0) {
    throw config_error("boltzmann_distribution: omega must be > 0");
  }
  if (static_cast<int>(spec.energies.size()) < dim) {
    throw config_error("boltzmann_distribution: spectrum has " +
                       std::to_string(spec.energies.size()) +
                       " levels, need at least dim = " + std::to_string(dim));
  }
  const double beta = std::log1p(1.0 / spec.n_t) / spec.omega;
  const int provided = static_cast<int>(spec.energies.size());
  double kept = 0.0;
  std::vector<double> p(dim);
  for (int n = 0; n < dim; ++n) {
    p[n] = std::exp(-beta * spec.energies[n]);
    kept += p[n];
  }
  double discarded = 0.0;
  for (int n = dim; n < provided; ++n) {
    discarded += std::exp(-beta * spec.energies[n]);
  }
  // Geometric extrapolation beyond the last provided level, using the last
  // spectral gap; exact for harmonic spectra and an overestimate for
  // spectra with growing gaps. Skipped if the spectrum does not increase
  // at its end.
  if (provided >= 2) {
    const double gap =
        spec.energies[provided - 1] - spec.energies[provided - 2];
    if (gap > 0.0) {
      const double q = std::exp(-beta * gap);
      if (q < 1.0) {
        discarded +=
            std::exp(-beta * spec.energies[provided - 1]) * q / (1.0 - q);
      }
    }
  }
  const double leakage = discarded / (kept + discarded);
  if (leakage > 1e-6) {
    throw truncation_leakage_error(
        "boltzmann_distribution: estimated tail weight " +
        std::to_string(leakage) + " beyond dim " + std::to_string(dim) +
        " exceeds 1e-6; raise dim");
  }
  for (double& v : p) v /= kept;
  return p;
}

PhononStats phonon_stats(const DensityMatrix& rho) {
  const int dim = rho.space.dim;
  PhononStats stats;
  stats.populations.resize(dim);
  for (int n = 0; n < dim; ++n) {
    const double pn = rho.entries(n, n).real();
    stats.populations[n] = pn;
    stats.mean_n += n * pn;
    stats.mean_n2 += static_cast<double>(n) * n * pn;
  }
  return stats;
}

PhysicalityReport physicality_report(const DensityMatrix& rho) {
  PhysicalityReport report;
  const Eigen::MatrixXcd sym =
      0.5 * (rho.entries + rho.entries.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      sym, Eigen::EigenvaluesOnly);
  report.min_eigenvalue = es.eigenvalues().minCoeff();
  report.trace_error = std::abs(rho.entries.trace() - complexd(1.0));
  report.hermiticity_error =
      (rho.entries - rho.entries.adjoint()).cwiseAbs().maxCoeff();
  report.purity = (rho.entries * rho.entries).trace().real();
  return report;
}

}  // namespace qbm
