#include <benchmark/benchmark.h>

#include "qds/davies.hpp"
#include "qds/operators.hpp"

namespace {

void BM_DaviesLadder(benchmark::State& state) {
  const auto d = state.range(0);
  qds::Operator h = qds::Operator::Zero(d, d);
  for (qds::Index k = 0; k < d; ++k) h(k, k) = static_cast<double>(k * k);
  qds::Operator x = qds::Operator::Zero(d, d);
  for (qds::Index k = 0; k + 1 < d; ++k) x(k, k + 1) = x(k + 1, k) = std::sqrt(static_cast<double>(k + 1));
  const auto r = qds::spectral_preset("ohmic-cubed-exp", {{"omega_c", 4.0}, {"beta", 1.0}});
  for (auto _ : state) benchmark::DoNotOptimize(qds::build_davies(h, {x}, r, 0.1));
}
BENCHMARK(BM_DaviesLadder)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_ChoiCheck(benchmark::State& state) {
  const auto d = state.range(0);
  const auto s = qds::Superoperator::identity(qds::HilbertDim(d));
  for (auto _ : state) benchmark::DoNotOptimize(qds::is_completely_positive(s));
}
BENCHMARK(BM_ChoiCheck)->Arg(2)->Arg(4)->Arg(8);

}  // namespace
