// Brownian-motion master equations: right-hand sides for the low-temperature,
// standard, positive and general-coefficient variants, plus a fixed-step RK4
// integrator with steady-state detection.
#pragma once

#include <functional>
#include <optional>

#include "qbm/fock.hpp"

namespace qbm {

// Time-dependent coefficients of the general master equation
//   d rho/dt = -i[H,rho] - i*Gamma(t)[x,{p,rho}] - xi(t)[x,[x,rho]]
//              + zeta(t)[x,[p,rho]].
struct BmeCoefficients {
  std::function<double(double)> gamma_fn;
  std::function<double(double)> xi_fn;
  std::function<double(double)> zeta_fn;
};

enum class MeVariant { general, lbme, sbme, pbme };

class MeModel {
 public:
  static MeModel lbme(double gamma, double n_t, Operator hamiltonian);
  // Rejects n_t = 0: the high-temperature coefficient 1/ln(1 + 1/n_t)
  // is undefined there.
  static MeModel sbme(double gamma, double n_t, Operator hamiltonian);
  static MeModel pbme(double gamma, double n_t, Operator hamiltonian);
  static MeModel general(BmeCoefficients coefficients, Operator hamiltonian);

  MeVariant variant() const { return variant_; }
  double gamma() const { return gamma_; }
  double n_t() const { return n_t_; }
  // k_B T/(hbar omega) implied by n_t; defined for the sbme variant.
  double kbt_over_homega() const { return kbt_over_homega_; }
  const Operator& hamiltonian() const { return hamiltonian_; }
  const BmeCoefficients& coefficients() const;
  bool hamiltonian_is_diagonal() const { return h_diagonal_; }

 private:
  MeModel(MeVariant variant, double gamma, double n_t, Operator hamiltonian);

  MeVariant variant_;
  double gamma_ = 0.0;
  double n_t_ = 0.0;
  double kbt_over_homega_ = 0.0;
  Operator hamiltonian_;
  std::optional<BmeCoefficients> coefficients_;
  bool h_diagonal_ = false;
};

DensityMatrix lbme_rhs(const DensityMatrix& rho, const MeModel& model);
DensityMatrix sbme_rhs(const DensityMatrix& rho, const MeModel& model);
DensityMatrix pbme_rhs(const DensityMatrix& rho, const MeModel& model);
DensityMatrix general_bme_rhs(const DensityMatrix& rho,
                              const BmeCoefficients& coefficients,
                              const Operator& hamiltonian, double t);

using MeRhs = std::function<DensityMatrix(double, const DensityMatrix&)>;

// Binds the model's variant dispatch into a (t, rho) -> drho/dt callable.
MeRhs make_rhs(const MeModel& model);

using MeObserver = std::function<void(double, const DensityMatrix&)>;

// Classical RK4 with per-step re-symmetrization rho <- (rho + rho†)/2.
// Throws integration_diverged_error when |Tr rho - 1| > 1e-6 and
// truncation_leakage_error when the top-level population exceeds 1e-4.
// The observer, when set, is invoked every record_every steps.
DensityMatrix evolve(const DensityMatrix& rho0, const MeRhs& rhs, double dt,
                     double t_final, const MeObserver& observer = {},
                     int record_every = 1);

struct SteadyStateResult {
  DensityMatrix rho;
  double time = 0.0;  // integration time at which the tolerance was met
};

// Integrates until the trace norm of drho/dt falls below tol; throws
// no_convergence_error if t_max is exhausted first.
SteadyStateResult steady_state(const MeModel& model, const DensityMatrix& rho0,
                               double dt, double tol = 1e-8,
                               double t_max = 60.0);

}  // namespace qbm
