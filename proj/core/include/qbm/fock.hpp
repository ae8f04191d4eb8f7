// Truncated number-basis Hilbert space: operators, states, expectation
// values and quadrature moments.
#pragma once

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "qbm/errors.hpp"

namespace qbm {

using complexd = std::complex<double>;

// Number basis |0>..|dim-1|. dim >= 2.
struct FockSpace {
  int dim = 0;
};

FockSpace make_space(int dim);

struct Operator {
  FockSpace space;
  Eigen::MatrixXcd entries;
  bool hermitian = false;
};

struct PureState {
  FockSpace space;
  Eigen::VectorXcd amplitudes;
  bool normalized = false;
};

struct DensityMatrix {
  FockSpace space;
  Eigen::MatrixXcd entries;
};

// Quadrature statistics of a state: means, variances and the symmetrized
// covariance <(xp+px)/2> - <x><p>.
struct Moments {
  double mean_x = 0.0;
  double mean_p = 0.0;
  double var_x = 0.0;
  double var_p = 0.0;
  double cov_xp = 0.0;
};

// Lowering operator: a[n-1, n] = sqrt(n).
Operator annihilation(const FockSpace& space);

// x = (a + a†)/sqrt(2), p = -i(a - a†)/sqrt(2). Returned as {x, p}.
std::pair<Operator, Operator> quadratures(const FockSpace& space);

// Diagonal omega*(n + 1/2), hbar = 1.
Operator harmonic_hamiltonian(const FockSpace& space, double omega);

// Diagonal omega*n^2, hbar = 1.
Operator kerr_hamiltonian(const FockSpace& space, double omega);

PureState fock_state(const FockSpace& space, int n);

// Amplitudes proportional to alpha^n/sqrt(n!); throws truncation_leakage_error
// if the pre-normalization tail weight beyond the space exceeds 1e-6.
PureState coherent_state(const FockSpace& space, complexd alpha);

complexd expectation(const Operator& op, const PureState& state);

Moments moments(const PureState& state);

DensityMatrix pure_to_density(const PureState& state);

complexd density_expectation(const Operator& op, const DensityMatrix& rho);

}  // namespace qbm
