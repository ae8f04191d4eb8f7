// Stochastic Schrodinger equations unravelling quantum Brownian motion:
// the joint position-momentum measurement equation and its feedback-composed
// form whose ensemble average damps the mean momentum at rate gamma/2.
#pragma once

#include <cstdint>
#include <vector>

#include "qbm/fock.hpp"
#include "qbm/rng.hpp"

namespace qbm {

enum class SseKind { joint_measurement, brownian };

// Integration scheme for the Hamiltonian part of a step. euler_maruyama
// treats -iH like any other drift term; split_step applies exp(-iH dt)
// exactly after the stochastic update, which keeps stiff Hamiltonians
// (Kerr at moderate dimension) stable at practical dt.
enum class SseScheme { euler_maruyama, split_step };

// Independent Wiener increments, each Gaussian with variance dt.
struct NoisePair {
  double dw1 = 0.0;
  double dw2 = 0.0;
};

struct SseParams {
  SseKind kind = SseKind::joint_measurement;
  double k = 0.0;      // measurement strength of each quadrature channel
  double gamma = 0.0;  // damping rate (brownian kind)
  double n_t = 0.0;    // thermal occupation (brownian kind)
  double dt = 1e-4;
  Operator hamiltonian;
  SseScheme scheme = SseScheme::euler_maruyama;

  static SseParams joint(double k, double dt, Operator hamiltonian,
                         SseScheme scheme = SseScheme::euler_maruyama);
  // Brownian unravelling; the measurement strength is tied to the bath,
  // k = gamma * n_t / 2, so it is not a free parameter here.
  static SseParams brownian(double gamma, double n_t, double dt,
                            Operator hamiltonian,
                            SseScheme scheme = SseScheme::euler_maruyama);
};

// Measurement-only increment of the joint x/p monitoring equation,
//   d psi = -k[(x-<x>)^2 + (p-<p>)^2] psi dt
//         + sqrt(2k) (x-<x>) psi dW1 + sqrt(2k) (p-<p>) psi dW2.
// The Hamiltonian part is composed separately by sse_step. Returns the
// (unnormalized) increment d psi itself.
PureState joint_measurement_increment(const PureState& state, double k,
                                      const NoisePair& noise, double dt);

// One increment of the feedback-composed Brownian equation. Writing
// g = sqrt(gamma n_t), u = (x-<x>)psi, w = (p-<p>)psi and the feedback
// operators F1 = 2g[(C_xp-1/2)x - V_x p], F2 = 2g[V_p x - C_xp p],
// the Ito-composed increment is
//   d psi = [-iH - (gamma n_t/2)((x-<x>)^2+(p-<p>)^2) - i(gamma<p>/2)x
//            - (F1^2+F2^2)/2 - i(F1 b1 + F2 b2)] psi dt
//         + (b1 - iF1) psi dW1 + (b2 - iF2) psi dW2,
// with b1 = g(x-<x>), b2 = g(p-<p>). All moments are those of the input
// state. Returns the increment d psi.
PureState brownian_sse_increment(const PureState& state,
                                 const SseParams& params,
                                 const NoisePair& noise);

// Advances one Euler-Maruyama step of the full equation selected by
// params.kind (measurement plus Hamiltonian plus, for the brownian kind,
// feedback), renormalizes, and applies the split-step phase when selected.
// Throws degenerate_norm_error if the pre-normalization norm falls below
// 1e-8 and truncation_leakage_error if the top-level population exceeds
// 1e-4.
PureState sse_step(const PureState& state, const SseParams& params,
                   const NoisePair& noise);

struct CovarianceState {
  double var_x = 0.0;
  double var_p = 0.0;
  double cov_xp = 0.0;
};

// Deterministic covariance flow under joint x/p measurement of strength k
// plus harmonic rotation at omega; the verification oracle for Gaussian
// trajectories:
//   dV_x/dt  = -8k V_x^2 - 8k C^2 + 2k + 2w C
//   dV_p/dt  = -8k V_p^2 - 8k C^2 + 2k - 2w C
//   dC/dt    = -8k (V_x + V_p) C + w (V_p - V_x).
CovarianceState covariance_ode_rhs(const CovarianceState& c, double k,
                                   double omega);

struct RecordSpec {
  int stride = 1;                   // record every stride-th step
  bool record_populations = false;  // per-level |psi_n|^2 time series
  bool record_states = false;       // full state snapshots
};

struct TrajectoryResult {
  std::vector<double> times;
  std::vector<Moments> moments;  // x, p, V_x, V_p, C_xp per sample
  std::vector<double> mean_n;
  std::vector<double> mean_n2;
  std::vector<std::vector<double>> populations;  // when record_populations
  std::vector<PureState> states;                 // when record_states
  PureState final_state;
};

// Integrates a single trajectory on the fixed grid t = 0..t_final in steps
// of params.dt. The noise stream is fully determined by (master_seed,
// stream_index); identical inputs reproduce the trajectory bit-for-bit.
// Step failures are rethrown with the simulation time at which they
// occurred prepended to the message.
TrajectoryResult simulate_trajectory(const PureState& initial,
                                     const SseParams& params, double t_final,
                                     std::uint64_t master_seed,
                                     std::uint64_t stream_index = 0,
                                     const RecordSpec& record = {});

namespace detail {

// Workspace reused across the steps of one trajectory. x and p act through
// their tridiagonal ladder structure on the amplitude vector; one step of
// the brownian kind costs six such applications, the joint kind four.
class SseStepper {
 public:
  SseStepper(const SseParams& params, int dim);

  // Overwrites psi with the normalized post-step state and returns the
  // pre-normalization squared norm. Throws degenerate_norm_error and
  // truncation_leakage_error per the sse_step contract.
  double step(Eigen::VectorXcd& psi, double dw1, double dw2);

 private:
  void apply_x(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;
  void apply_p(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;

  SseParams params_;
  int dim_ = 0;
  double g_ = 0.0;  // sqrt(gamma n_t) for brownian, sqrt(2k) for joint
  bool h_diagonal_ = false;
  Eigen::VectorXd sq_;  // sq_(n) = sqrt(n), n = 0..dim
  Eigen::VectorXcd h_diag_;
  Eigen::MatrixXcd h_dense_;
  Eigen::VectorXcd phase_;       // exp(-i E_n dt) for diagonal H, split step
  Eigen::MatrixXcd propagator_;  // exp(-iH dt) for dense H, split step
  Eigen::VectorXcd xps_, pps_, u_, w_, xu_, pu_, xw_, pw_, hpsi_;
};

}  // namespace detail

}  // namespace qbm
