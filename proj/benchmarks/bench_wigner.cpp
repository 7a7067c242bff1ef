// Exact-symbol throughput: single evaluations at growing j, and the identity
// suite that dominates the verification runtime.
#include <benchmark/benchmark.h>

#include "rf/wigner.hpp"

using rf::HalfInt;
namespace wig = rf::wigner;

namespace {

void three_jm_at(benchmark::State& state) {
    const int tj = static_cast<int>(state.range(0));
    const HalfInt j = HalfInt::from_twice(tj);
    const HalfInt m = HalfInt::from_twice(tj % 2);
    for (auto _ : state) {
        auto v = wig::three_jm(j, j, HalfInt::whole(1), m, m, -(m + m));
        benchmark::DoNotOptimize(v);
    }
}

void six_j_at(benchmark::State& state) {
    const int tj = static_cast<int>(state.range(0));
    const HalfInt j = HalfInt::from_twice(tj);
    for (auto _ : state) {
        auto v = wig::six_j(j, j, HalfInt::whole(1), j, j, HalfInt::whole(1));
        benchmark::DoNotOptimize(v);
    }
}

void identity_suite(benchmark::State& state) {
    const int max_two_j = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto r = wig::run_identity_suite(max_two_j);
        benchmark::DoNotOptimize(r.checked());
        if (r.failed() != 0) state.SkipWithError("suite failure");
    }
    state.SetItemsProcessed(state.iterations() *
                            wig::run_identity_suite(max_two_j).checked());
}

}  // namespace

BENCHMARK(three_jm_at)->Arg(4)->Arg(16)->Arg(40)->Arg(80);
BENCHMARK(six_j_at)->Arg(4)->Arg(16)->Arg(40)->Arg(80);
BENCHMARK(identity_suite)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
