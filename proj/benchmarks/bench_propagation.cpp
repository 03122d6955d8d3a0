#include <benchmark/benchmark.h>

#include "qds/gkls.hpp"
#include "qds/propagation.hpp"
#include "test_support.hpp"

namespace {

qds::GklsGenerator random_generator(qds::Index d, qds::Index n_jumps) {
  qds::testing::Rng rng(2024 + static_cast<unsigned>(d));
  std::vector<qds::Operator> jumps;
  for (qds::Index k = 0; k < n_jumps; ++k) jumps.push_back(qds::testing::random_matrix(d, d, rng, 0.3));
  return qds::GklsGenerator(qds::testing::random_hermitian(d, rng), jumps);
}

void BM_GeneratorAssembly(benchmark::State& state) {
  const auto g = random_generator(state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(qds::generator_superoperator(g));
}
BENCHMARK(BM_GeneratorAssembly)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_PropagatorExact(benchmark::State& state) {
  const auto l = qds::generator_superoperator(random_generator(state.range(0), 3));
  for (auto _ : state) benchmark::DoNotOptimize(qds::propagator_exact(l, 1.0));
}
BENCHMARK(BM_PropagatorExact)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_EvolveRk4(benchmark::State& state) {
  const auto d = state.range(0);
  const auto l = qds::generator_superoperator(random_generator(d, 3));
  const auto rho0 = qds::DensityMatrix::maximally_mixed(d);
  for (auto _ : state) benchmark::DoNotOptimize(qds::evolve_rk4(l, 1.0, rho0, 1e-2));
}
BENCHMARK(BM_EvolveRk4)->Arg(2)->Arg(4)->Arg(8);

}  // namespace
