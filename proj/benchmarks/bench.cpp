#include <benchmark/benchmark.h>

#include "qdim/conformal_measure.hpp"
#include "qdim/pressure.hpp"
#include "qdim/quantization.hpp"

namespace {

qdim::IfsSystem cantor() {
  return qdim::similarity_system({0.0, 1.0}, {{1.0 / 3.0, 0.0, 1}, {1.0 / 3.0, 2.0 / 3.0, 1}});
}

void BM_GaussWordSum(benchmark::State& state) {
  const auto g = qdim::gauss_system(3);
  const auto fam = qdim::PotentialFamily::derivative_power(1.0);
  const auto depth = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(qdim::pressure_word_sum(g, fam, 0.5, 0.5, depth, 0));
  }
}
BENCHMARK(BM_GaussWordSum)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_SolveQdimE2(benchmark::State& state) {
  const auto fam = qdim::PotentialFamily::weights({0.7, 0.3});
  for (auto _ : state) {
    benchmark::DoNotOptimize(qdim::solve_quantization_dim(cantor(), fam, 2.0, 0).kappa_r);
  }
}
BENCHMARK(BM_SolveQdimE2);

void BM_SampleE2(benchmark::State& state) {
  const auto fam = qdim::PotentialFamily::weights({0.7, 0.3});
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(qdim::sample_measure(cantor(), fam, n, 0, 0, 1).points.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_SampleE2)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_Lloyd(benchmark::State& state) {
  const auto fam = qdim::PotentialFamily::weights({0.7, 0.3});
  const auto s = qdim::sample_measure(cantor(), fam, 100000, 0, 0, 1);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(qdim::lloyd_optimize(s, n, 2.0).V_hat);
  }
}
BENCHMARK(BM_Lloyd)->Arg(16)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
