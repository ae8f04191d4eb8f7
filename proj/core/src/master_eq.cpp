#include "qbm/master_eq.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

#include "qbm/errors.hpp"

namespace qbm {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

VectorXcd sqrt_ladder(int dim) {
  VectorXcd s(dim);
  for (int n = 0; n < dim; ++n) {
    s(n) = std::sqrt(static_cast<double>(n));
  }
  return s;
}

// x and p are tridiagonal, so left/right products cost O(d^2) as shifted
// row/column scalings instead of O(d^3) dense products.

MatrixXcd x_left(const MatrixXcd& m, const VectorXcd& s) {
  const int d = static_cast<int>(m.rows());
  MatrixXcd out = MatrixXcd::Zero(d, d);
  const auto s1 = s.segment(1, d - 1);
  out.topRows(d - 1) = s1.asDiagonal() * m.bottomRows(d - 1);
  out.bottomRows(d - 1) += s1.asDiagonal() * m.topRows(d - 1);
  out *= 1.0 / std::numbers::sqrt2;
  return out;
}

MatrixXcd x_right(const MatrixXcd& m, const VectorXcd& s) {
  const int d = static_cast<int>(m.rows());
  MatrixXcd out = MatrixXcd::Zero(d, d);
  const auto s1 = s.segment(1, d - 1);
  out.leftCols(d - 1) = m.rightCols(d - 1) * s1.asDiagonal();
  out.rightCols(d - 1) += m.leftCols(d - 1) * s1.asDiagonal();
  out *= 1.0 / std::numbers::sqrt2;
  return out;
}

MatrixXcd p_left(const MatrixXcd& m, const VectorXcd& s) {
  const int d = static_cast<int>(m.rows());
  MatrixXcd out = MatrixXcd::Zero(d, d);
  const auto s1 = s.segment(1, d - 1);
  out.topRows(d - 1) = s1.asDiagonal() * m.bottomRows(d - 1);
  out.bottomRows(d - 1) -= s1.asDiagonal() * m.topRows(d - 1);
  out *= complexd(0.0, -1.0 / std::numbers::sqrt2);
  return out;
}

MatrixXcd p_right(const MatrixXcd& m, const VectorXcd& s) {
  const int d = static_cast<int>(m.rows());
  MatrixXcd out = MatrixXcd::Zero(d, d);
  const auto s1 = s.segment(1, d - 1);
  out.leftCols(d - 1) = m.rightCols(d - 1) * s1.asDiagonal();
  out.rightCols(d - 1) -= m.leftCols(d - 1) * s1.asDiagonal();
  out *= complexd(0.0, 1.0 / std::numbers::sqrt2);
  return out;
}

MatrixXcd hamiltonian_commutator(const Operator& h, bool diagonal,
                                 const MatrixXcd& rho) {
  if (diagonal) {
    const VectorXcd hd = h.entries.diagonal();
    MatrixXcd out = hd.asDiagonal() * rho;
    out -= rho * hd.asDiagonal();
    return out;
  }
  MatrixXcd out = h.entries * rho;
  out.noalias() -= rho * h.entries;
  return out;
}

void check_dim(const DensityMatrix& rho, const Operator& h, const char* what) {
  if (rho.space.dim != h.space.dim) {
    throw dimension_mismatch_error(
        std::string(what) + ": rho dim " + std::to_string(rho.space.dim) +
        " vs hamiltonian dim " + std::to_string(h.space.dim));
  }
}

// Common dissipator -i*G [x,{p,rho}] - xi [x,[x,rho]] shared by the
// constant-coefficient variants.
MatrixXcd drift_diffusion(const MatrixXcd& rho, const VectorXcd& s, double g_coef,
                          double xi) {
  MatrixXcd anti = p_left(rho, s) + p_right(rho, s);
  MatrixXcd t1 = x_left(anti, s) - x_right(anti, s);
  MatrixXcd xc = x_left(rho, s) - x_right(rho, s);
  MatrixXcd t2 = x_left(xc, s) - x_right(xc, s);
  return complexd(0.0, -g_coef) * t1 - xi * t2;
}

bool is_diagonal(const MatrixXcd& m) {
  const int d = static_cast<int>(m.rows());
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      if (i != j && m(i, j) != complexd(0.0, 0.0)) return false;
    }
  }
  return true;
}

}  // namespace

MeModel::MeModel(MeVariant variant, double gamma, double n_t,
                 Operator hamiltonian)
    : variant_(variant),
      gamma_(gamma),
      n_t_(n_t),
      hamiltonian_(std::move(hamiltonian)) {
  if (gamma_ < 0.0) {
    throw config_error("MeModel: gamma must be >= 0, got " +
                       std::to_string(gamma_));
  }
  if (n_t_ < 0.0) {
    throw config_error("MeModel: n_t must be >= 0, got " +
                       std::to_string(n_t_));
  }
  if (n_t_ > 0.0) {
    kbt_over_homega_ = 1.0 / std::log1p(1.0 / n_t_);
  }
  h_diagonal_ = is_diagonal(hamiltonian_.entries);
}

MeModel MeModel::lbme(double gamma, double n_t, Operator hamiltonian) {
  return MeModel(MeVariant::lbme, gamma, n_t, std::move(hamiltonian));
}

MeModel MeModel::sbme(double gamma, double n_t, Operator hamiltonian) {
  if (n_t <= 0.0) {
    throw unsupported_variant_error(
        "sbme requires n_t > 0: the high-temperature coefficient "
        "1/ln(1 + 1/n_t) diverges at n_t = 0");
  }
  return MeModel(MeVariant::sbme, gamma, n_t, std::move(hamiltonian));
}

MeModel MeModel::pbme(double gamma, double n_t, Operator hamiltonian) {
  return MeModel(MeVariant::pbme, gamma, n_t, std::move(hamiltonian));
}

MeModel MeModel::general(BmeCoefficients coefficients, Operator hamiltonian) {
  if (!coefficients.gamma_fn || !coefficients.xi_fn || !coefficients.zeta_fn) {
    throw config_error("general MeModel requires all three coefficient "
                       "functions to be set");
  }
  MeModel model(MeVariant::general, 0.0, 0.0, std::move(hamiltonian));
  model.coefficients_ = std::move(coefficients);
  return model;
}

const BmeCoefficients& MeModel::coefficients() const {
  if (!coefficients_) {
    throw config_error("coefficients() is defined only for the general "
                       "variant");
  }
  return *coefficients_;
}

DensityMatrix lbme_rhs(const DensityMatrix& rho, const MeModel& model) {
  check_dim(rho, model.hamiltonian(), "lbme_rhs");
  const VectorXcd s = sqrt_ladder(rho.space.dim);
  const double g = model.gamma();
  DensityMatrix out;
  out.space = rho.space;
  out.entries = complexd(0.0, -1.0) *
                hamiltonian_commutator(model.hamiltonian(),
                                       model.hamiltonian_is_diagonal(),
                                       rho.entries);
  out.entries += drift_diffusion(rho.entries, s, 0.25 * g,
                                 0.25 * g * (2.0 * model.n_t() + 1.0));
  return out;
}

DensityMatrix sbme_rhs(const DensityMatrix& rho, const MeModel& model) {
  check_dim(rho, model.hamiltonian(), "sbme_rhs");
  if (model.n_t() <= 0.0) {
    throw unsupported_variant_error(
        "sbme_rhs requires n_t > 0: the high-temperature coefficient "
        "1/ln(1 + 1/n_t) diverges at n_t = 0");
  }
  const VectorXcd s = sqrt_ladder(rho.space.dim);
  const double g = model.gamma();
  DensityMatrix out;
  out.space = rho.space;
  out.entries = complexd(0.0, -1.0) *
                hamiltonian_commutator(model.hamiltonian(),
                                       model.hamiltonian_is_diagonal(),
                                       rho.entries);
  out.entries += drift_diffusion(rho.entries, s, 0.25 * g,
                                 0.5 * g * model.kbt_over_homega());
  return out;
}

DensityMatrix pbme_rhs(const DensityMatrix& rho, const MeModel& model) {
  check_dim(rho, model.hamiltonian(), "pbme_rhs");
  const VectorXcd s = sqrt_ladder(rho.space.dim);
  DensityMatrix out = lbme_rhs(rho, model);
  MatrixXcd pc = p_left(rho.entries, s) - p_right(rho.entries, s);
  MatrixXcd t3 = p_left(pc, s) - p_right(pc, s);
  const double coef =
      model.gamma() / (16.0 * (2.0 * model.n_t() + 1.0));
  out.entries -= coef * t3;
  return out;
}

DensityMatrix general_bme_rhs(const DensityMatrix& rho,
                              const BmeCoefficients& coefficients,
                              const Operator& hamiltonian, double t) {
  check_dim(rho, hamiltonian, "general_bme_rhs");
  const VectorXcd s = sqrt_ladder(rho.space.dim);
  const double big_gamma = coefficients.gamma_fn(t);
  const double xi = coefficients.xi_fn(t);
  const double zeta = coefficients.zeta_fn(t);
  DensityMatrix out;
  out.space = rho.space;
  out.entries =
      complexd(0.0, -1.0) *
      hamiltonian_commutator(hamiltonian, is_diagonal(hamiltonian.entries),
                             rho.entries);
  out.entries += drift_diffusion(rho.entries, s, big_gamma, xi);
  if (zeta != 0.0) {
    MatrixXcd pc = p_left(rho.entries, s) - p_right(rho.entries, s);
    MatrixXcd t3 = x_left(pc, s) - x_right(pc, s);
    out.entries += zeta * t3;
  }
  return out;
}

MeRhs make_rhs(const MeModel& model) {
  switch (model.variant()) {
    case MeVariant::lbme:
      return [model](double, const DensityMatrix& rho) {
        return lbme_rhs(rho, model);
      };
    case MeVariant::sbme:
      return [model](double, const DensityMatrix& rho) {
        return sbme_rhs(rho, model);
      };
    case MeVariant::pbme:
      return [model](double, const DensityMatrix& rho) {
        return pbme_rhs(rho, model);
      };
    case MeVariant::general:
      return [model](double t, const DensityMatrix& rho) {
        return general_bme_rhs(rho, model.coefficients(), model.hamiltonian(),
                               t);
      };
  }
  throw config_error("make_rhs: unknown variant");
}

namespace {

// Shared RK4 core; t0 keeps rhs time arguments honest when evolve is
// resumed in chunks (steady_state).
DensityMatrix rk4_span(DensityMatrix rho, const MeRhs& rhs, double dt,
                       double t0, long nsteps, const MeObserver& observer,
                       int record_every) {
  const int d = rho.space.dim;
  DensityMatrix stage;
  stage.space = rho.space;
  for (long i = 1; i <= nsteps; ++i) {
    const double t = t0 + (i - 1) * dt;
    const DensityMatrix k1 = rhs(t, rho);
    stage.entries = rho.entries + (0.5 * dt) * k1.entries;
    const DensityMatrix k2 = rhs(t + 0.5 * dt, stage);
    stage.entries = rho.entries + (0.5 * dt) * k2.entries;
    const DensityMatrix k3 = rhs(t + 0.5 * dt, stage);
    stage.entries = rho.entries + dt * k3.entries;
    const DensityMatrix k4 = rhs(t + dt, stage);
    rho.entries += (dt / 6.0) * (k1.entries + 2.0 * k2.entries +
                                 2.0 * k3.entries + k4.entries);
    MatrixXcd sym = 0.5 * (rho.entries + rho.entries.adjoint());
    rho.entries = std::move(sym);

    const double t_now = t0 + i * dt;
    const double trace_err = std::abs(rho.entries.trace() - complexd(1.0));
    if (trace_err > 1e-6) {
      throw integration_diverged_error(
          "evolve: |trace - 1| = " + std::to_string(trace_err) + " at t = " +
          std::to_string(t_now));
    }
    const double top = rho.entries(d - 1, d - 1).real();
    if (top > 1e-4) {
      throw truncation_leakage_error(
          "evolve: top-level population " + std::to_string(top) +
          " exceeds 1e-4 at t = " + std::to_string(t_now) +
          "; raise dim");
    }
    if (observer && i % record_every == 0) {
      observer(t_now, rho);
    }
  }
  return rho;
}

}  // namespace

DensityMatrix evolve(const DensityMatrix& rho0, const MeRhs& rhs, double dt,
                     double t_final, const MeObserver& observer,
                     int record_every) {
  if (dt <= 0.0) {
    throw config_error("evolve: dt must be > 0");
  }
  if (record_every < 1) {
    throw config_error("evolve: record_every must be >= 1");
  }
  const long nsteps = std::llround(t_final / dt);
  if (nsteps < 1) {
    throw config_error("evolve: t_final must be at least dt");
  }
  if (observer) {
    observer(0.0, rho0);
  }
  return rk4_span(rho0, rhs, dt, 0.0, nsteps, observer, record_every);
}

SteadyStateResult steady_state(const MeModel& model, const DensityMatrix& rho0,
                               double dt, double tol, double t_max) {
  if (dt <= 0.0 || tol <= 0.0 || t_max <= 0.0) {
    throw config_error("steady_state: dt, tol and t_max must be > 0");
  }
  const MeRhs rhs = make_rhs(model);
  const long max_steps = std::llround(t_max / dt);
  const long check_every = 200;
  DensityMatrix rho = rho0;
  long done = 0;
  double residual = 0.0;
  while (done < max_steps) {
    const long chunk = std::min(check_every, max_steps - done);
    rho = rk4_span(std::move(rho), rhs, dt, done * dt, chunk, {}, 1);
    done += chunk;
    const DensityMatrix deriv = rhs(done * dt, rho);
    const MatrixXcd sym = 0.5 * (deriv.entries + deriv.entries.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sym,
                                                Eigen::EigenvaluesOnly);
    residual = es.eigenvalues().cwiseAbs().sum();
    if (residual < tol) {
      return SteadyStateResult{std::move(rho), done * dt};
    }
  }
  throw no_convergence_error(
      "steady_state: trace-norm of drho/dt still " + std::to_string(residual) +
      " after t = " + std::to_string(t_max));
}

}  // namespace qbm
