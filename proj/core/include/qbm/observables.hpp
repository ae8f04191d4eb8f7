// Reference thermal distributions, phonon statistics and physicality
// diagnostics for density matrices.
#pragma once

#include <vector>

#include "qbm/fock.hpp"

namespace qbm {

// Thermal reference for an arbitrary spectrum. Temperature is specified
// through the occupation n_t of the reference harmonic oscillator at
// frequency omega: beta = ln(1 + 1/n_t) / omega with hbar = 1. energies
// may hold more than dim entries; the surplus sharpens the truncation
// leakage estimate.
struct ThermalSpec {
  double n_t = 0.0;
  double omega = 0.0;
  std::vector<double> energies;
};

std::vector<double> harmonic_energies(double omega, int count);  // w(n + 1/2)
std::vector<double> kerr_energies(double omega, int count);      // w n^2

// Geometric thermal state truncated at dim and renormalized,
//   p_n = (1/(n_t+1)) (n_t/(n_t+1))^n.
// Throws truncation_leakage_error when the discarded tail exceeds 1e-6.
DensityMatrix thermal_geometric(double n_t, int dim);

// Boltzmann distribution p_n proportional to exp(-beta E_n), truncated at
// dim and renormalized; same leakage threshold. With harmonic energies this
// reproduces thermal_geometric exactly.
std::vector<double> boltzmann_distribution(const ThermalSpec& spec, int dim);

struct PhononStats {
  double mean_n = 0.0;
  double mean_n2 = 0.0;
  std::vector<double> populations;
};

PhononStats phonon_stats(const DensityMatrix& rho);

struct PhysicalityReport {
  double min_eigenvalue = 0.0;  // from a symmetric eigensolve of (rho+rho†)/2
  double trace_error = 0.0;     // |Tr rho - 1|
  double hermiticity_error = 0.0;  // max entrywise |rho - rho†|
  double purity = 0.0;             // Tr(rho^2)
};

PhysicalityReport physicality_report(const DensityMatrix& rho);

}  // namespace qbm
