#include "qbm/sse.hpp"

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
using Eigen::VectorXd;

constexpr complexd kI(0.0, 1.0);

void check_dims(const SseParams& params, int dim, const char* what) {
  if (params.hamiltonian.space.dim != dim) {
    throw dimension_mismatch_error(
        std::string(what) + ": state dim " + std::to_string(dim) +
        " vs hamiltonian dim " +
        std::to_string(params.hamiltonian.space.dim));
  }
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

SseParams SseParams::joint(double k, double dt, Operator hamiltonian,
                           SseScheme scheme) {
  if (k < 0.0) {
    throw config_error("SseParams::joint: k must be >= 0");
  }
  if (dt <= 0.0) {
    throw config_error("SseParams::joint: dt must be > 0");
  }
  SseParams p;
  p.kind = SseKind::joint_measurement;
  p.k = k;
  p.dt = dt;
  p.hamiltonian = std::move(hamiltonian);
  p.scheme = scheme;
  return p;
}

SseParams SseParams::brownian(double gamma, double n_t, double dt,
                              Operator hamiltonian, SseScheme scheme) {
  if (gamma < 0.0 || n_t < 0.0) {
    throw config_error("SseParams::brownian: gamma and n_t must be >= 0");
  }
  if (dt <= 0.0) {
    throw config_error("SseParams::brownian: dt must be > 0");
  }
  SseParams p;
  p.kind = SseKind::brownian;
  p.gamma = gamma;
  p.n_t = n_t;
  p.k = 0.5 * gamma * n_t;
  p.dt = dt;
  p.hamiltonian = std::move(hamiltonian);
  p.scheme = scheme;
  return p;
}

PureState joint_measurement_increment(const PureState& state, double k,
                                      const NoisePair& noise, double dt) {
  const auto [x, p] = quadratures(state.space);
  const Moments m = moments(state);
  const VectorXcd& psi = state.amplitudes;
  const VectorXcd u = x.entries * psi - m.mean_x * psi;
  const VectorXcd w = p.entries * psi - m.mean_p * psi;
  const VectorXcd xu = x.entries * u;
  const VectorXcd pw = p.entries * w;
  const double root = std::sqrt(2.0 * k);
  PureState out;
  out.space = state.space;
  out.amplitudes = (-k * dt) * (xu - m.mean_x * u + pw - m.mean_p * w) +
                   (root * noise.dw1) * u + (root * noise.dw2) * w;
  out.normalized = false;
  return out;
}

PureState brownian_sse_increment(const PureState& state,
                                 const SseParams& params,
                                 const NoisePair& noise) {
  const int dim = state.space.dim;
  check_dims(params, dim, "brownian_sse_increment");
  const auto [x, p] = quadratures(state.space);
  const Moments m = moments(state);
  const VectorXcd& psi = state.amplitudes;

  const VectorXcd xpsi = x.entries * psi;
  const VectorXcd ppsi = p.entries * psi;
  const VectorXcd u = xpsi - m.mean_x * psi;
  const VectorXcd w = ppsi - m.mean_p * psi;
  const VectorXcd xu = x.entries * u;
  const VectorXcd pu = p.entries * u;
  const VectorXcd xw = x.entries * w;
  const VectorXcd pw = p.entries * w;

  const double g = std::sqrt(params.gamma * params.n_t);
  const double g2 = params.gamma * params.n_t;
  const double ca = m.cov_xp - 0.5;

  const VectorXcd f1 = 2.0 * g * (ca * xpsi - m.var_x * ppsi);
  const VectorXcd f2 = 2.0 * g * (m.var_p * xpsi - m.cov_xp * ppsi);
  const VectorXcd xf1 = x.entries * f1;
  const VectorXcd pf1 = p.entries * f1;
  const VectorXcd xf2 = x.entries * f2;
  const VectorXcd pf2 = p.entries * f2;
  const VectorXcd f1f1 = 2.0 * g * (ca * xf1 - m.var_x * pf1);
  const VectorXcd f2f2 = 2.0 * g * (m.var_p * xf2 - m.cov_xp * pf2);
  const VectorXcd f1b1 = 2.0 * g2 * (ca * xu - m.var_x * pu);
  const VectorXcd f2b2 = 2.0 * g2 * (m.var_p * xw - m.cov_xp * pw);

  VectorXcd apsi = (-0.5 * g2) * (xu - m.mean_x * u + pw - m.mean_p * w) -
                   kI * (0.5 * params.gamma * m.mean_p) * xpsi -
                   0.5 * (f1f1 + f2f2) - kI * (f1b1 + f2b2) -
                   kI * (params.hamiltonian.entries * psi);
  const VectorXcd b1 = g * u - kI * f1;
  const VectorXcd b2 = g * w - kI * f2;

  PureState out;
  out.space = state.space;
  out.amplitudes = params.dt * apsi + noise.dw1 * b1 + noise.dw2 * b2;
  out.normalized = false;
  return out;
}

CovarianceState covariance_ode_rhs(const CovarianceState& c, double k,
                                   double omega) {
  CovarianceState d;
  const double c2 = c.cov_xp * c.cov_xp;
  d.var_x = -8.0 * k * c.var_x * c.var_x - 8.0 * k * c2 + 2.0 * k +
            2.0 * omega * c.cov_xp;
  d.var_p = -8.0 * k * c.var_p * c.var_p - 8.0 * k * c2 + 2.0 * k -
            2.0 * omega * c.cov_xp;
  d.cov_xp = -8.0 * k * (c.var_x + c.var_p) * c.cov_xp +
             omega * (c.var_p - c.var_x);
  return d;
}

namespace detail {

SseStepper::SseStepper(const SseParams& params, int dim)
    : params_(params), dim_(dim) {
  check_dims(params_, dim_, "SseStepper");
  if (params_.dt <= 0.0) {
    throw config_error("SseStepper: dt must be > 0");
  }
  sq_.resize(dim_ + 1);
  for (int n = 0; n <= dim_; ++n) {
    sq_(n) = std::sqrt(static_cast<double>(n));
  }
  g_ = params_.kind == SseKind::brownian
           ? std::sqrt(params_.gamma * params_.n_t)
           : std::sqrt(2.0 * params_.k);
  h_diagonal_ = is_diagonal(params_.hamiltonian.entries);
  if (h_diagonal_) {
    h_diag_ = params_.hamiltonian.entries.diagonal();
  } else {
    h_dense_ = params_.hamiltonian.entries;
  }
  if (params_.scheme == SseScheme::split_step) {
    if (h_diagonal_) {
      phase_.resize(dim_);
      for (int n = 0; n < dim_; ++n) {
        phase_(n) = std::exp(-kI * h_diag_(n) * params_.dt);
      }
    } else {
      // exp(-iH dt) through one Hermitian eigendecomposition, done once.
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h_dense_);
      VectorXcd ph(dim_);
      for (int n = 0; n < dim_; ++n) {
        ph(n) = std::exp(-kI * es.eigenvalues()(n) * params_.dt);
      }
      propagator_ = es.eigenvectors() * ph.asDiagonal() *
                    es.eigenvectors().adjoint();
    }
  }
  xps_.resize(dim_);
  pps_.resize(dim_);
  u_.resize(dim_);
  w_.resize(dim_);
  xu_.resize(dim_);
  pu_.resize(dim_);
  xw_.resize(dim_);
  pw_.resize(dim_);
  hpsi_.resize(dim_);
}

void SseStepper::apply_x(const VectorXcd& in, VectorXcd& out) const {
  constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  for (int m = 0; m < dim_; ++m) {
    const complexd up = m + 1 < dim_ ? sq_(m + 1) * in(m + 1) : complexd(0.0);
    const complexd dn = m >= 1 ? sq_(m) * in(m - 1) : complexd(0.0);
    out(m) = inv_sqrt2 * (up + dn);
  }
}

void SseStepper::apply_p(const VectorXcd& in, VectorXcd& out) const {
  constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  for (int m = 0; m < dim_; ++m) {
    const complexd up = m + 1 < dim_ ? sq_(m + 1) * in(m + 1) : complexd(0.0);
    const complexd dn = m >= 1 ? sq_(m) * in(m - 1) : complexd(0.0);
    out(m) = complexd(0.0, -inv_sqrt2) * (up - dn);
  }
}

double SseStepper::step(VectorXcd& psi, double dw1, double dw2) {
  const double dt = params_.dt;
  const bool em = params_.scheme == SseScheme::euler_maruyama;

  apply_x(psi, xps_);
  apply_p(psi, pps_);
  double mx = 0.0, mp = 0.0, x2 = 0.0, p2 = 0.0, cc = 0.0;
  for (int m = 0; m < dim_; ++m) {
    const complexd cpsi = std::conj(psi(m));
    mx += (cpsi * xps_(m)).real();
    mp += (cpsi * pps_(m)).real();
    x2 += std::norm(xps_(m));
    p2 += std::norm(pps_(m));
    cc += (std::conj(xps_(m)) * pps_(m)).real();
  }
  const double vx = x2 - mx * mx;
  const double vp = p2 - mp * mp;
  const double c = cc - mx * mp;

  u_ = xps_ - mx * psi;
  w_ = pps_ - mp * psi;

  if (em) {
    if (h_diagonal_) {
      hpsi_ = h_diag_.cwiseProduct(psi);
    } else {
      hpsi_.noalias() = h_dense_ * psi;
    }
  }

  double nrm2 = 0.0;
  if (params_.kind == SseKind::joint_measurement) {
    apply_x(u_, xu_);
    apply_p(w_, pw_);
    const double k = params_.k;
    for (int m = 0; m < dim_; ++m) {
      complexd apsi = -k * (xu_(m) - mx * u_(m) + pw_(m) - mp * w_(m));
      if (em) apsi -= kI * hpsi_(m);
      const complexd val =
          psi(m) + dt * apsi + (g_ * dw1) * u_(m) + (g_ * dw2) * w_(m);
      psi(m) = val;
      nrm2 += std::norm(val);
    }
  } else {
    apply_x(u_, xu_);
    apply_p(u_, pu_);
    apply_x(w_, xw_);
    apply_p(w_, pw_);
    const double g = g_;
    const double g2 = g_ * g_;
    const double ca = c - 0.5;
    const double gamma = params_.gamma;
    for (int m = 0; m < dim_; ++m) {
      const complexd xxps = xu_(m) + mx * xps_(m);
      const complexd xpps = xw_(m) + mp * xps_(m);
      const complexd pxps = pu_(m) + mx * pps_(m);
      const complexd ppps = pw_(m) + mp * pps_(m);
      const complexd f1 = 2.0 * g * (ca * xps_(m) - vx * pps_(m));
      const complexd f2 = 2.0 * g * (vp * xps_(m) - c * pps_(m));
      const complexd xf1 = 2.0 * g * (ca * xxps - vx * xpps);
      const complexd pf1 = 2.0 * g * (ca * pxps - vx * ppps);
      const complexd xf2 = 2.0 * g * (vp * xxps - c * xpps);
      const complexd pf2 = 2.0 * g * (vp * pxps - c * ppps);
      const complexd f1f1 = 2.0 * g * (ca * xf1 - vx * pf1);
      const complexd f2f2 = 2.0 * g * (vp * xf2 - c * pf2);
      const complexd f1b1 = 2.0 * g2 * (ca * xu_(m) - vx * pu_(m));
      const complexd f2b2 = 2.0 * g2 * (vp * xw_(m) - c * pw_(m));
      complexd apsi =
          -0.5 * g2 * (xu_(m) - mx * u_(m) + pw_(m) - mp * w_(m)) -
          kI * (0.5 * gamma * mp) * xps_(m) - 0.5 * (f1f1 + f2f2) -
          kI * (f1b1 + f2b2);
      if (em) apsi -= kI * hpsi_(m);
      const complexd b1 = g * u_(m) - kI * f1;
      const complexd b2 = g * w_(m) - kI * f2;
      const complexd val = psi(m) + dt * apsi + dw1 * b1 + dw2 * b2;
      psi(m) = val;
      nrm2 += std::norm(val);
    }
  }

  if (nrm2 < 1e-16) {
    throw degenerate_norm_error("sse step: pre-normalization norm " +
                                std::to_string(std::sqrt(nrm2)) +
                                " below 1e-8");
  }
  const double inv = 1.0 / std::sqrt(nrm2);
  if (params_.scheme == SseScheme::split_step) {
    if (h_diagonal_) {
      psi = inv * psi.cwiseProduct(phase_);
    } else {
      psi = inv * (propagator_ * psi).eval();
    }
  } else {
    psi *= inv;
  }
  const double top = std::norm(psi(dim_ - 1));
  if (top > 1e-4) {
    throw truncation_leakage_error("sse step: top-level population " +
                                   std::to_string(top) +
                                   " exceeds 1e-4; raise dim");
  }
  return nrm2;
}

}  // namespace detail

PureState sse_step(const PureState& state, const SseParams& params,
                   const NoisePair& noise) {
  detail::SseStepper stepper(params, state.space.dim);
  PureState out;
  out.space = state.space;
  out.amplitudes = state.amplitudes;
  stepper.step(out.amplitudes, noise.dw1, noise.dw2);
  out.normalized = true;
  return out;
}

TrajectoryResult simulate_trajectory(const PureState& initial,
                                     const SseParams& params, double t_final,
                                     std::uint64_t master_seed,
                                     std::uint64_t stream_index,
                                     const RecordSpec& record) {
  if (t_final <= 0.0) {
    throw config_error("simulate_trajectory: t_final must be > 0");
  }
  if (record.stride < 1) {
    throw config_error("simulate_trajectory: record stride must be >= 1");
  }
  const int dim = initial.space.dim;
  check_dims(params, dim, "simulate_trajectory");

  detail::SseStepper stepper(params, dim);
  GaussianRng rng(master_seed, stream_index);
  const double dt = params.dt;
  const double root_dt = std::sqrt(dt);
  const long nsteps = std::llround(t_final / dt);

  TrajectoryResult result;
  const long nrec = nsteps / record.stride + 1;
  result.times.reserve(nrec);
  result.moments.reserve(nrec);
  result.mean_n.reserve(nrec);
  result.mean_n2.reserve(nrec);

  Eigen::VectorXcd psi = initial.amplitudes;
  psi /= psi.norm();

  const auto record_sample = [&](double t) {
    PureState snap;
    snap.space = initial.space;
    snap.amplitudes = psi;
    snap.normalized = true;
    result.times.push_back(t);
    result.moments.push_back(moments(snap));
    double n1 = 0.0, n2 = 0.0;
    for (int m = 0; m < dim; ++m) {
      const double pr = std::norm(psi(m));
      n1 += m * pr;
      n2 += static_cast<double>(m) * m * pr;
    }
    result.mean_n.push_back(n1);
    result.mean_n2.push_back(n2);
    if (record.record_populations) {
      std::vector<double> pops(dim);
      for (int m = 0; m < dim; ++m) pops[m] = std::norm(psi(m));
      result.populations.push_back(std::move(pops));
    }
    if (record.record_states) {
      result.states.push_back(snap);
    }
  };

  record_sample(0.0);
  for (long i = 1; i <= nsteps; ++i) {
    const double dw1 = rng.normal() * root_dt;
    const double dw2 = rng.normal() * root_dt;
    try {
      stepper.step(psi, dw1, dw2);
    } catch (const degenerate_norm_error& e) {
      throw degenerate_norm_error("t = " + std::to_string(i * dt) + ": " +
                                  e.what());
    } catch (const truncation_leakage_error& e) {
      throw truncation_leakage_error("t = " + std::to_string(i * dt) + ": " +
                                     e.what());
    }
    if (i % record.stride == 0) {
      record_sample(i * dt);
    }
  }

  result.final_state.space = initial.space;
  result.final_state.amplitudes = std::move(psi);
  result.final_state.normalized = true;
  return result;
}

}  // namespace qbm
