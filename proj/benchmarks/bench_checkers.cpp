#include <benchmark/benchmark.h>

#include "sfqv/benchgen.hpp"
#include "sfqv/checkers.hpp"

using namespace sfqv;

namespace {

const Netlist& mapped_ksa(int n) {
    static std::map<int, Netlist> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, sfq_map(gen_ksa(n))).first;
    return it->second;
}

void BM_CheckFanout(benchmark::State& state) {
    const Netlist& net = mapped_ksa(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto result = check_fanout(net);
        benchmark::DoNotOptimize(result.work);
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(net.n_gates()));
}

void BM_CheckPathBalance(benchmark::State& state) {
    const Netlist& net = mapped_ksa(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto result = check_path_balance(net);
        benchmark::DoNotOptimize(result.work);
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(net.n_gates()));
}

void BM_InsertBalancingDffs(benchmark::State& state) {
    const Netlist logical = gen_ksa(static_cast<int>(state.range(0)));
    const Netlist split = insert_splitter_trees(logical).netlist;
    for (auto _ : state) {
        auto result = insert_balancing_dffs(split);
        benchmark::DoNotOptimize(result.dffs_added);
    }
}

} // namespace

BENCHMARK(BM_CheckFanout)->Arg(4)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(BM_CheckPathBalance)->Arg(4)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(BM_InsertBalancingDffs)->Arg(8)->Arg(32);
