// Serial scatter-add against the OpenMP gather kernel on solver-sized meshes.
#include "cmcfol/kernels.hpp"
#include "cmcfol/oracle.hpp"

#include <benchmark/benchmark.h>

#include <map>

namespace {

const cmcfol::DiscreteSurface& mesh(int n) {
  static std::map<int, cmcfol::DiscreteSurface> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, cmcfol::exact_cap(cmcfol::IdealCircle(cmcfol::Vec3(0, 0, 1), 1.0471975511965976), 0.4, n))
             .first;
  }
  return it->second;
}

void BM_Serial(benchmark::State& state) {
  const auto& s = mesh(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cmcfol::kernels::evaluate_serial(s.vertices, s.triangles, true));
  }
  state.SetItemsProcessed(state.iterations() * s.triangles.size());
}

void BM_OpenMP(benchmark::State& state) {
  const auto& s = mesh(static_cast<int>(state.range(0)));
  const auto inc = cmcfol::make_incidence(s);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cmcfol::kernels::evaluate_omp(s.vertices, s.triangles, inc, true));
  }
  state.SetItemsProcessed(state.iterations() * s.triangles.size());
}

}  // namespace

BENCHMARK(BM_Serial)->Arg(3000)->Arg(10000)->Arg(40000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_OpenMP)->Arg(3000)->Arg(10000)->Arg(40000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
