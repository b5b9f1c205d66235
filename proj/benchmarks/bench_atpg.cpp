#include <benchmark/benchmark.h>

#include "sfqv/atpg.hpp"
#include "sfqv/bench_io.hpp"
#include "sfqv/benchgen.hpp"

using namespace sfqv;

namespace {

void BM_GenerateTestSet(benchmark::State& state) {
    const Netlist net = sfq_map(gen_ksa(static_cast<int>(state.range(0))));
    for (auto _ : state) {
        auto run = generate_test_set(net);
        benchmark::DoNotOptimize(run.set.coverage_pct);
    }
}

void BM_ParseBench(benchmark::State& state) {
    const std::string text = write_bench(sfq_map(gen_ksa(32)));
    for (auto _ : state) {
        auto net = parse_bench(text);
        benchmark::DoNotOptimize(net.n_gates());
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(text.size()));
}

void BM_SuiteGeneration(benchmark::State& state) {
    for (auto _ : state) {
        auto net = build_benchmark({Family::Ksa, 16, Variant::Golden, 0});
        benchmark::DoNotOptimize(net.n_gates());
    }
}

} // namespace

BENCHMARK(BM_GenerateTestSet)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParseBench);
BENCHMARK(BM_SuiteGeneration)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
