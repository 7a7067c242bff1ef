// Frame-level costs: coupling-table construction, the MUB coefficient
// battery, and the seeded equiangular search.
#include <benchmark/benchmark.h>

#include "rf/mub.hpp"
#include "rf/sic.hpp"
#include "rf/tensor.hpp"

namespace {

void coupling_table_build(benchmark::State& state) {
    const int two_j = static_cast<int>(state.range(0));
    for (auto _ : state) {
        rf::tensor::CouplingTable table(two_j);
        benchmark::DoNotOptimize(table.six(1, 1, 2));
    }
}

void mub_battery(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const auto set = rf::mub::build_prime_mubs(d);
    for (auto _ : state) {
        auto report = rf::mub::coefficient_battery(set);
        benchmark::DoNotOptimize(report.all_pass());
        if (!report.all_pass()) state.SkipWithError("battery failure");
    }
}

void sic_search(benchmark::State& state) {
    rf::sic::SearchConfig config;
    config.d = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto cand = rf::sic::search_fiducial(config);
        benchmark::DoNotOptimize(cand.residual);
        if (!cand.converged) state.SkipWithError("search did not converge");
    }
}

}  // namespace

BENCHMARK(coupling_table_build)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(mub_battery)->Arg(3)->Arg(7)->Arg(13)->Unit(benchmark::kMillisecond);
BENCHMARK(sic_search)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
