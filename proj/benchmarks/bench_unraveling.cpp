#include <benchmark/benchmark.h>

#include <array>

#include "qds/models.hpp"
#include "qds/unraveling.hpp"

namespace {

qds::GklsGenerator damping_qubit() {
  qds::models::TwoLevelParams p;
  p.gamma_down = 1.0;
  p.delta = 0.2;
  return qds::models::two_level_generator(p);
}

void BM_EmStep(benchmark::State& state) {
  const auto g = damping_qubit();
  qds::TrajectoryState s{qds::Vector::Constant(2, std::sqrt(0.5)), 0.0};
  const std::array<double, 2> dw{0.01, -0.02};
  for (auto _ : state) benchmark::DoNotOptimize(qds::em_step(g, s, dw, 1e-3));
}
BENCHMARK(BM_EmStep);

void BM_Ensemble(benchmark::State& state) {
  const auto g = damping_qubit();
  const auto rho0 = qds::DensityMatrix::maximally_mixed(2);
  qds::TrajectoryConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_traj = 1000;
  cfg.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(qds::ensemble_density(g, rho0, {0.0, 0.5, 1.0}, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.n_traj));
}
BENCHMARK(BM_Ensemble)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

}  // namespace
