#include "qbm/fock.hpp"

#include <cmath>
#include <string>

#include "qbm/errors.hpp"

namespace qbm {

namespace {

void check_same_dim(int a, int b, const char* what) {
  if (a != b) {
    throw dimension_mismatch_error(std::string(what) + ": dimension mismatch " +
                                   std::to_string(a) + " vs " +
                                   std::to_string(b));
  }
}

}  // namespace

FockSpace make_space(int dim) {
  if (dim < 2) {
    throw invalid_dimension_error("FockSpace requires dim >= 2, got " +
                                  std::to_string(dim));
  }
  return FockSpace{dim};
}

Operator annihilation(const FockSpace& space) {
  Operator op;
  op.space = space;
  op.entries = Eigen::MatrixXcd::Zero(space.dim, space.dim);
  for (int n = 1; n < space.dim; ++n) {
    op.entries(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  op.hermitian = false;
  return op;
}

std::pair<Operator, Operator> quadratures(const FockSpace& space) {
  const Operator a = annihilation(space);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Operator x;
  x.space = space;
  x.entries = inv_sqrt2 * (a.entries + a.entries.adjoint());
  x.hermitian = true;
  Operator p;
  p.space = space;
  p.entries = complexd(0.0, -1.0) * inv_sqrt2 *
              (a.entries - a.entries.adjoint());
  p.hermitian = true;
  return {x, p};
}

Operator harmonic_hamiltonian(const FockSpace& space, double omega) {
  Operator op;
  op.space = space;
  op.entries = Eigen::MatrixXcd::Zero(space.dim, space.dim);
  for (int n = 0; n < space.dim; ++n) {
    op.entries(n, n) = omega * (n + 0.5);
  }
  op.hermitian = true;
  return op;
}

Operator kerr_hamiltonian(const FockSpace& space, double omega) {
  Operator op;
  op.space = space;
  op.entries = Eigen::MatrixXcd::Zero(space.dim, space.dim);
  for (int n = 0; n < space.dim; ++n) {
    op.entries(n, n) = omega * static_cast<double>(n) * n;
  }
  op.hermitian = true;
  return op;
}

PureState fock_state(const FockSpace& space, int n) {
  if (n < 0 || n >= space.dim) {
    throw index_error("fock_state: level " + std::to_string(n) +
                      " outside [0, " + std::to_string(space.dim - 1) + "]");
  }
  PureState psi;
  psi.space = space;
  psi.amplitudes = Eigen::VectorXcd::Zero(space.dim);
  psi.amplitudes(n) = 1.0;
  psi.normalized = true;
  return psi;
}

PureState coherent_state(const FockSpace& space, complexd alpha) {
  PureState psi;
  psi.space = space;
  psi.amplitudes.resize(space.dim);
  // c_n = exp(-|a|^2/2) a^n / sqrt(n!), built by recursion to avoid
  // overflowing factorials.
  complexd c = std::exp(-0.5 * std::norm(alpha));
  psi.amplitudes(0) = c;
  for (int n = 1; n < space.dim; ++n) {
    c *= alpha / std::sqrt(static_cast<double>(n));
    psi.amplitudes(n) = c;
  }
  const double kept = psi.amplitudes.squaredNorm();
  const double leakage = 1.0 - kept;
  if (leakage > 1e-6) {
    throw truncation_leakage_error(
        "coherent_state: truncation tail weight " + std::to_string(leakage) +
        " exceeds 1e-6 at dim " + std::to_string(space.dim));
  }
  psi.amplitudes /= std::sqrt(kept);
  psi.normalized = true;
  return psi;
}

complexd expectation(const Operator& op, const PureState& state) {
  check_same_dim(op.space.dim, state.space.dim, "expectation");
  return state.amplitudes.dot(op.entries * state.amplitudes);
}

Moments moments(const PureState& state) {
  const int dim = state.space.dim;
  const auto& c = state.amplitudes;
  // Tridiagonal action of the ladder structure: (x psi)_m and (p psi)_m
  // read only the neighbouring amplitudes.
  Eigen::VectorXcd xps(dim), pps(dim);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int m = 0; m < dim; ++m) {
    complexd up = (m + 1 < dim)
                      ? std::sqrt(static_cast<double>(m + 1)) * c(m + 1)
                      : complexd(0.0);
    complexd down =
        (m > 0) ? std::sqrt(static_cast<double>(m)) * c(m - 1) : complexd(0.0);
    xps(m) = inv_sqrt2 * (up + down);
    pps(m) = complexd(0.0, -1.0) * inv_sqrt2 * (up - down);
  }
  Moments mom;
  mom.mean_x = c.dot(xps).real();
  mom.mean_p = c.dot(pps).real();
  const double x2 = xps.squaredNorm();
  const double p2 = pps.squaredNorm();
  const double xp_sym = xps.dot(pps).real();  // <(xp+px)/2>
  mom.var_x = x2 - mom.mean_x * mom.mean_x;
  mom.var_p = p2 - mom.mean_p * mom.mean_p;
  mom.cov_xp = xp_sym - mom.mean_x * mom.mean_p;
  return mom;
}

DensityMatrix pure_to_density(const PureState& state) {
  DensityMatrix rho;
  rho.space = state.space;
  rho.entries = state.amplitudes * state.amplitudes.adjoint();
  return rho;
}

complexd density_expectation(const Operator& op, const DensityMatrix& rho) {
  check_same_dim(op.space.dim, rho.space.dim, "density_expectation");
  return (op.entries * rho.entries).trace();
}

}  // namespace qbm
