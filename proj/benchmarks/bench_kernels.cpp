#include <benchmark/benchmark.h>

#include "sketchavg/kernels.hpp"
#include "sketchavg/rng.hpp"
#include "sketchavg/sketch.hpp"
#include "sketchavg/threads.hpp"
#include "sketchavg/types.hpp"

using namespace sketchavg;

namespace {

Matrix filled(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Matrix m(rows, cols);
    Rng rng(seed);
    for (double& v : m.data()) v = rng.next_unit_co() * 2.0 - 1.0;
    return m;
}

void bm_matmul_omp(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    Matrix a = filled(n, n, 1), b = filled(n, n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
    state.SetItemsProcessed(state.iterations() * n * n * n);
}

void bm_matmul_ref(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    Matrix a = filled(n, n, 1), b = filled(n, n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(ref::matmul(a, b));
    state.SetItemsProcessed(state.iterations() * n * n * n);
}

void bm_fwht_omp(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    Matrix m = filled(n, 16, 3);
    for (auto _ : state) {
        Matrix work = m;
        fwht_rows_inplace(work);
        benchmark::DoNotOptimize(work);
    }
    state.SetItemsProcessed(state.iterations() * n * 16);
}

void bm_fwht_ref(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    Matrix m = filled(n, 16, 3);
    for (auto _ : state) {
        Matrix work = m;
        ref::fwht_rows_inplace(work);
        benchmark::DoNotOptimize(work);
    }
    state.SetItemsProcessed(state.iterations() * n * 16);
}

void bm_gaussian_apply(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    Matrix a = filled(n, 8, 4);
    SketchSpec spec = SketchSpec::gaussian(n / 4);
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(apply_rows(spec, a, ++seed));
    state.SetItemsProcessed(state.iterations() * (n / 4) * 8 * n);
}

void bm_ros_apply(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    Matrix a = filled(n, 8, 5);
    SketchSpec spec = SketchSpec::ros(n / 4);
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(apply_rows(spec, a, ++seed));
    state.SetItemsProcessed(state.iterations() * n * 8);
}

}  // namespace

BENCHMARK(bm_matmul_omp)->Arg(64)->Arg(256);
BENCHMARK(bm_matmul_ref)->Arg(64)->Arg(256);
BENCHMARK(bm_fwht_omp)->Arg(1024)->Arg(8192);
BENCHMARK(bm_fwht_ref)->Arg(1024)->Arg(8192);
BENCHMARK(bm_gaussian_apply)->Arg(512)->Arg(2048);
BENCHMARK(bm_ros_apply)->Arg(512)->Arg(2048);

int main(int argc, char** argv) {
    apply_thread_env();
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    return 0;
}
