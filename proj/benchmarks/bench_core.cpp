#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

#include "apex/expansion.hpp"
#include "apex/operator_core.hpp"
#include "apex/propagator.hpp"
#include "apex/spin_model.hpp"

namespace {

using apex::ComplexMatrix;

ComplexMatrix random_hermitian(int n) {
  std::mt19937 rng(11);
  std::normal_distribution<double> d;
  ComplexMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) a(i, k) = {d(rng), d(rng)};
  return (a + a.adjoint()) / 2.0;
}

apex::HamiltonianSource precession_source(double j, double b) {
  return apex::dipole_source(apex::spin_matrices(j),
                             apex::FieldCurve::precession(b, 1.0, std::numbers::pi / 3, 1.0));
}

void BM_Eigh(benchmark::State& state) {
  const auto h = random_hermitian(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(apex::eigh(h));
}
BENCHMARK(BM_Eigh)->Arg(2)->Arg(5)->Arg(17);

void BM_ExpmUnitary(benchmark::State& state) {
  const auto h = random_hermitian(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(apex::expm_unitary(h, 0.3));
}
BENCHMARK(BM_ExpmUnitary)->Arg(2)->Arg(5)->Arg(17);

// Reference propagation of a closed precession loop, spin j = range/2.
void BM_Propagate(benchmark::State& state) {
  const auto src = precession_source(state.range(0) / 2.0, 5.0);
  const auto grid = apex::TimeGrid::uniform(2 * std::numbers::pi, 128);
  for (auto _ : state) benchmark::DoNotOptimize(apex::propagate(src, grid, 1e-8));
}
BENCHMARK(BM_Propagate)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

// Expansion to order N on a 512-point grid, j = 1.
void BM_Expand(benchmark::State& state) {
  const auto src = precession_source(1.0, 5.0);
  const auto grid = apex::TimeGrid::uniform(2 * std::numbers::pi, 512);
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(apex::expand(src, grid, order));
}
BENCHMARK(BM_Expand)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
