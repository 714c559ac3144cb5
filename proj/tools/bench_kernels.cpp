// Serial reference against the OpenMP path for the hot loops.
#include <benchmark/benchmark.h>

#include "equiconv/catalog.hpp"
#include "equiconv/criterion.hpp"
#include "equiconv/expansion.hpp"
#include "equiconv/torus.hpp"

using namespace equiconv;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::Parallel : Exec::Serial; }

void label(benchmark::State& s) { s.SetLabel(s.range(0) ? "parallel" : "serial"); }

void BM_sigma_r(benchmark::State& s) {
    const auto f = catalog::test_functions()[1].f;
    const RVec x = uniform_grid(100);
    for (auto _ : s) benchmark::DoNotOptimize(expansion::sigma_r(f, 2.0 * kPi * 20, x, exec_of(s)));
    label(s);
}

void BM_contour(benchmark::State& s) {
    const auto f = catalog::test_functions()[0].f;
    const RVec x = uniform_grid(100);
    expansion::ContourOptions o;
    o.exec = exec_of(s);
    for (auto _ : s) benchmark::DoNotOptimize(expansion::S_r_contour(catalog::clamped4(), f, 2.0 * kPi * 10 + 1.0, x, o));
    label(s);
}

void BM_I_r(benchmark::State& s) {
    const auto f0 = catalog::whole_interval_f0();
    const RVec x = uniform_grid(100);
    for (auto _ : s) benchmark::DoNotOptimize(criterion::I_r(f0, 400.0, 1, x, exec_of(s)));
    label(s);
}

void BM_torus_multiply(benchmark::State& s) {
    const auto F = torus::spike(kPi, 2048);
    const auto g = torus::raised_cosine_cutoff(kPi, 0.1, 0.2, 512);
    for (auto _ : s) benchmark::DoNotOptimize(torus::multiply(g, F, exec_of(s)));
    label(s);
}

} // namespace

BENCHMARK(BM_sigma_r)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_contour)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_I_r)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_torus_multiply)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
