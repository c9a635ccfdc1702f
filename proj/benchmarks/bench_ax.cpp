// Serial reference kernel against the staged OpenMP variants.
//
//   ./bench_ax --benchmark_filter='N:7'

#include <benchmark/benchmark.h>
#include <omp.h>

#include <map>
#include <random>

#include "semlab/ax.hpp"
#include "semlab/geometry.hpp"

namespace {

using namespace semlab;

struct Fixture {
  SpectralBasis basis;
  GeomFactors g;
  ElementField u;
};

const Fixture& fixture(int degree) {
  static std::map<int, Fixture> cache;
  auto it = cache.find(degree);
  if (it != cache.end()) return it->second;
  auto basis = build_basis(degree);
  const auto mesh = build_box_mesh({8, 8, 8}, {0, 0, 0}, {8, 8, 8}, 0.1);
  auto g = build_geom_factors(mesh, basis);
  auto u = ElementField::zeros(degree, mesh.num_elements());
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (auto& v : u.values) v = dist(rng);
  return cache.emplace(degree, Fixture{std::move(basis), std::move(g), std::move(u)})
      .first->second;
}

void run(benchmark::State& state, KernelVariant variant, int threads) {
  const int degree = static_cast<int>(state.range(0));
  if (!variant.valid_for(degree)) {
    state.SkipWithError("variant not legal for this degree");
    return;
  }
  const auto& f = fixture(degree);
  OpCounters counters;
  ax_apply(variant, f.u, f.g, f.basis, &counters, threads);
  for (auto _ : state) {
    auto w = ax_apply(variant, f.u, f.g, f.basis, nullptr, threads);
    benchmark::DoNotOptimize(w.values.data());
  }
  state.counters["GFLOP"] = benchmark::Counter(static_cast<double>(counters.flops()) * 1e-9,
                                                 benchmark::Counter::kIsIterationInvariantRate);
  state.counters["threads"] = threads;
}

void BM_Reference(benchmark::State& s) { run(s, KernelVariant::reference(), 1); }
void BM_Buffered1(benchmark::State& s) { run(s, KernelVariant::buffered(), 1); }
void BM_BufferedAll(benchmark::State& s) { run(s, KernelVariant::buffered(), omp_get_max_threads()); }
void BM_Unroll4_1(benchmark::State& s) { run(s, KernelVariant::unrolled(4), 1); }
void BM_Unroll4_All(benchmark::State& s) {
  run(s, KernelVariant::unrolled(4), omp_get_max_threads());
}

}  // namespace

#define DEGREES ArgName("N")->Arg(3)->Arg(7)->Arg(11)->Arg(15)->Unit(benchmark::kMillisecond)
BENCHMARK(BM_Reference)->DEGREES;
BENCHMARK(BM_Buffered1)->DEGREES;
BENCHMARK(BM_BufferedAll)->DEGREES;
BENCHMARK(BM_Unroll4_1)->DEGREES;
BENCHMARK(BM_Unroll4_All)->DEGREES;

BENCHMARK_MAIN();
