#include <benchmark/benchmark.h>

#include "scatlab/birman.hpp"
#include "scatlab/propagator.hpp"
#include "scatlab/restriction.hpp"
#include "scatlab/wiener.hpp"

using namespace scatlab;

static void BM_SplitStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const RadialGrid grid(0.1 * static_cast<double>(n), n);
  const Potential V = Potential::gaussian(0.5);
  SplitStepPropagator prop(V, grid, 0.01);
  CplxVec u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = grid.node(i) * std::exp(-grid.node(i) * grid.node(i));
  for (auto _ : state) {
    prop.evolve(u, 0.1);  // ten steps
    benchmark::DoNotOptimize(u.data());
  }
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_SplitStep)->Arg(1024)->Arg(4096)->Arg(16384);

static void BM_FreeResolventKernel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const RadialGrid grid(20.0, n);
  for (auto _ : state) benchmark::DoNotOptimize(free_resolvent_kernel(grid, 1.0, Branch::Plus, 0.0).entries.data());
}
BENCHMARK(BM_FreeResolventKernel)->Arg(256)->Arg(512)->Arg(1024);

static void BM_BirmanSchwingerInvert(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const RadialGrid grid(20.0, n);
  const Potential V = Potential::gaussian(0.5);
  for (auto _ : state) {
    const auto bs = assemble_bs(V, grid, 1.0, Branch::Plus, 0.0);
    benchmark::DoNotOptimize(invert_bs(bs).norm);
  }
}
BENCHMARK(BM_BirmanSchwingerInvert)->Arg(256)->Arg(512);

static void BM_WienerConvolve(benchmark::State& state) {
  const Potential V = Potential::gaussian(0.5);
  const RadialGrid grid(6.0, static_cast<std::size_t>(state.range(0)));
  const auto T = build_t_minus(V, grid, LineGrid(25.6, 512));
  for (auto _ : state) benchmark::DoNotOptimize(convolve(T, T).samples.data());
}
BENCHMARK(BM_WienerConvolve)->Arg(16)->Arg(30);

static void BM_SphereFourier(benchmark::State& state) {
  const double xi_max = static_cast<double>(state.range(0));
  const auto s = resolved_measure(3, 1.0, xi_max);
  const RealVec xi = linspace(1.0, xi_max, 64);
  for (auto _ : state) benchmark::DoNotOptimize(sigma_hat(s, xi).data());
}
BENCHMARK(BM_SphereFourier)->Arg(25)->Arg(50);

BENCHMARK_MAIN();
