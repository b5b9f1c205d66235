#include <benchmark/benchmark.h>

#include "sfqv/atpg.hpp"
#include "sfqv/benchgen.hpp"
#include "sfqv/simulator.hpp"

using namespace sfqv;

namespace {

void BM_PipelinedStep(benchmark::State& state) {
    const Netlist net = sfq_map(gen_ksa(static_cast<int>(state.range(0))));
    Simulator sim(net);
    RandomVectorSource source(net.primary_inputs().size(), 1);
    std::vector<std::vector<uint8_t>> vectors;
    for (int i = 0; i < 256; ++i) vectors.push_back(source.next());
    size_t i = 0;
    for (auto _ : state) {
        const auto& values = sim.advance(vectors[i++ & 255]);
        benchmark::DoNotOptimize(values.data());
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(net.n_gates()));
}

void BM_CombEval(benchmark::State& state) {
    const Netlist net = sfq_map(gen_ksa(static_cast<int>(state.range(0))));
    const CombEval eval(net);
    RandomVectorSource source(net.primary_inputs().size(), 1);
    std::vector<std::vector<uint8_t>> vectors;
    for (int i = 0; i < 256; ++i) vectors.push_back(source.next());
    size_t i = 0;
    for (auto _ : state) {
        auto po = eval.eval(vectors[i++ & 255]);
        benchmark::DoNotOptimize(po.data());
    }
}

void BM_FaultSimulate(benchmark::State& state) {
    const Netlist net = sfq_map(gen_ksa(static_cast<int>(state.range(0))));
    auto universe = enumerate_faults(net);
    const auto reps = collapse_faults(net, universe);
    RandomVectorSource source(net.primary_inputs().size(), 1);
    std::vector<std::vector<uint8_t>> vectors;
    for (int i = 0; i < 8; ++i) vectors.push_back(source.next());
    const CombEval eval(net);
    for (auto _ : state) {
        auto matrix = fault_simulate(eval, vectors, reps);
        benchmark::DoNotOptimize(matrix.bits.data());
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(reps.size() * vectors.size()));
}

} // namespace

BENCHMARK(BM_PipelinedStep)->Arg(8)->Arg(32);
BENCHMARK(BM_CombEval)->Arg(8)->Arg(32);
BENCHMARK(BM_FaultSimulate)->Arg(4)->Arg(8);
