#include <benchmark/benchmark.h>

#include "homform/matrix.hpp"

using namespace homform;

static void BM_rref_mod(benchmark::State& state) {
    Field f = Field::modular(10007, 5);
    int n = static_cast<int>(state.range(0));
    Matrix a(f, n, n);
    long long v = 1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            v = (v * 1103515245 + 12345) % 2147483647;
            a.set(i, j, v);
        }
    for (auto _ : state) {
        auto r = rref(a);
        benchmark::DoNotOptimize(r.rank);
    }
}
BENCHMARK(BM_rref_mod)->Arg(32)->Arg(64)->Arg(128);

BENCHMARK_MAIN();
