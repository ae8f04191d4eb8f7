#include <benchmark/benchmark.h>

#include "qbm/fock.hpp"
#include "qbm/master_eq.hpp"
#include "qbm/observables.hpp"
#include "qbm/rng.hpp"
#include "qbm/sse.hpp"

using namespace qbm;
using std::numbers::pi;

namespace {

constexpr double kOmega = 2.0 * pi;

void bm_sse_step_brownian(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const FockSpace space = make_space(dim);
  const SseParams params = SseParams::brownian(
      4.0, 1.0, 1e-4, harmonic_hamiltonian(space, kOmega));
  PureState psi = fock_state(space, 0);
  GaussianRng rng(42, 0);
  const double sdt = std::sqrt(params.dt);
  for (auto _ : state) {
    psi = sse_step(psi, params, {rng.normal() * sdt, rng.normal() * sdt});
    benchmark::DoNotOptimize(psi.amplitudes.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_sse_step_brownian)->Arg(10)->Arg(20)->Arg(30)->Arg(50);

void bm_sse_step_joint(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const FockSpace space = make_space(dim);
  const SseParams params =
      SseParams::joint(1.0, 1e-4, harmonic_hamiltonian(space, kOmega));
  PureState psi = fock_state(space, 0);
  GaussianRng rng(42, 0);
  const double sdt = std::sqrt(params.dt);
  for (auto _ : state) {
    psi = sse_step(psi, params, {rng.normal() * sdt, rng.normal() * sdt});
    benchmark::DoNotOptimize(psi.amplitudes.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_sse_step_joint)->Arg(10)->Arg(30);

void bm_sse_step_kerr_split(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const FockSpace space = make_space(dim);
  const SseParams params =
      SseParams::brownian(4.0, 1.0, 1e-4, kerr_hamiltonian(space, kOmega),
                          SseScheme::split_step);
  PureState psi = fock_state(space, 0);
  GaussianRng rng(42, 0);
  const double sdt = std::sqrt(params.dt);
  for (auto _ : state) {
    psi = sse_step(psi, params, {rng.normal() * sdt, rng.normal() * sdt});
    benchmark::DoNotOptimize(psi.amplitudes.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_sse_step_kerr_split)->Arg(10)->Arg(30);

void bm_lbme_rhs(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const FockSpace space = make_space(dim);
  const MeModel model =
      MeModel::lbme(4.0, 1.0, harmonic_hamiltonian(space, kOmega));
  const DensityMatrix rho = thermal_geometric(1.0, dim);
  for (auto _ : state) {
    DensityMatrix d = lbme_rhs(rho, model);
    benchmark::DoNotOptimize(d.entries.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_lbme_rhs)->Arg(10)->Arg(20)->Arg(30)->Arg(50);

void bm_rk4_step(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const FockSpace space = make_space(dim);
  const MeModel model =
      MeModel::lbme(4.0, 1.0, harmonic_hamiltonian(space, kOmega));
  const MeRhs rhs = make_rhs(model);
  const DensityMatrix rho = thermal_geometric(1.0, dim);
  for (auto _ : state) {
    DensityMatrix out = evolve(rho, rhs, 1e-4, 1e-4);
    benchmark::DoNotOptimize(out.entries.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_rk4_step)->Arg(10)->Arg(30);

void bm_moments(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const FockSpace space = make_space(dim);
  const PureState psi = coherent_state(space, complexd(0.8, 0.3));
  for (auto _ : state) {
    Moments m = moments(psi);
    benchmark::DoNotOptimize(m);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_moments)->Arg(10)->Arg(30)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
