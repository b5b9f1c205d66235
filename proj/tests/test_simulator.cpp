#include "doctest.h"

#include "sfqv/atpg.hpp"
#include "sfqv/bench_io.hpp"
#include "sfqv/benchgen.hpp"
#include "sfqv/simulator.hpp"
#include "support/test_util.hpp"

using namespace sfqv;
using namespace sfqv::test;

TEST_CASE("step: one clocked stage is one cycle") {
    const Netlist net = parse_bench("INPUT(a)\nOUTPUT(y)\ny = BUF(a)");
    Simulator sim(net);
    CHECK(sim.latency() == 1);
    const uint8_t one[1] = {1}, zero[1] = {0};
    // pulse applied at cycle 0 appears on the output during cycle 1
    CHECK(sim.step(one) == std::vector<uint8_t>{1});
    CHECK(sim.step(zero) == std::vector<uint8_t>{0});
    CHECK(sim.cycle() == 2);
}

TEST_CASE("splitter branches carry their driver's value in the same cycle") {
    const Netlist net = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(o1)\nOUTPUT(o2)\n"
                                    "t = AND(a, b)\ns = SPLIT(t)\no1 = DFF(s)\no2 = DFF(s)");
    Simulator sim(net);
    const std::vector<std::vector<uint8_t>> vectors = {{1, 1}, {1, 0}, {0, 1}, {1, 1}};
    const PulseTrace trace = sim.run(vectors, true);
    const NetId t = *net.find_net("t"), s = *net.find_net("s");
    for (size_t c = 0; c < trace.n_cycles; ++c) CHECK(trace.bits[s][c] == trace.bits[t][c]);
}

TEST_CASE("all-zero input stream keeps every net at zero") {
    const Netlist golden = sfq_map(gen_ksa(8));
    Simulator sim(golden);
    const std::vector<std::vector<uint8_t>> vectors(50, std::vector<uint8_t>(17, 0));
    const PulseTrace trace = sim.run(vectors, false);
    for (NetId n = 0; n < golden.n_nets(); ++n)
        for (size_t c = 0; c < trace.n_cycles; ++c) REQUIRE(trace.bits[n][c] == 0);
}

TEST_CASE("run: KSA4 pipeline timing") {
    const Netlist golden = sfq_map(gen_ksa(4));
    Simulator sim(golden);
    REQUIRE(sim.latency() == 6);

    auto encode = [](int a, int b, int cin) {
        std::vector<uint8_t> pi(9, 0);
        for (int i = 0; i < 4; ++i) pi[static_cast<size_t>(i)] = (a >> i) & 1;
        for (int i = 0; i < 4; ++i) pi[static_cast<size_t>(4 + i)] = (b >> i) & 1;
        pi[8] = static_cast<uint8_t>(cin);
        return pi;
    };
    auto decode = [&](const PulseTrace& trace, size_t cycle) {
        int sum = 0;
        const auto& pos = golden.primary_outputs();
        for (size_t i = 0; i < pos.size(); ++i) sum |= trace.bits[pos[i]][cycle] << i;
        return sum;
    };

    SUBCASE("a=3 b=5 cin=0 lands at cycle 6") {
        const PulseTrace trace = sim.run({encode(3, 5, 0)}, true);
        CHECK(trace.n_cycles == 7);
        CHECK(decode(trace, 6) == 8);
    }
    SUBCASE("back-to-back vectors land at cycles 6 and 7") {
        const PulseTrace trace = sim.run({encode(3, 5, 0), encode(7, 9, 1)}, true);
        CHECK(trace.n_cycles == 8);
        CHECK(decode(trace, 6) == 8);
        CHECK(decode(trace, 7) == 17);
    }
    SUBCASE("empty vector sequence without flush is an empty trace") {
        const PulseTrace trace = sim.run({}, false);
        CHECK(trace.n_cycles == 0);
    }
}

TEST_CASE("latency: single gate, KSA8, ArrMult8 (reported)") {
    CHECK(latency(parse_bench("INPUT(a)\nOUTPUT(y)\ny = DFF(a)")) == 1);
    CHECK(latency(sfq_map(gen_ksa(8))) == 8);
    const uint32_t arrmult8 = latency(sfq_map(gen_arrmult(8)));
    CHECK(arrmult8 > 0);
    // published mapping reaches 40; ours is deeper (ripple rows, fixed cells)
    MESSAGE("ArrMult8 latency (reference 40): ", arrmult8);
}

TEST_CASE("pipeline theorem on KSA4: delayed output equals combinational evaluation") {
    const Netlist golden = sfq_map(gen_ksa(4));
    Simulator sim(golden);
    const uint32_t l = sim.latency();

    std::vector<std::vector<uint8_t>> vectors;
    for (uint64_t x = 0; x < 512; ++x) vectors.push_back(index_to_bits(x, 9));
    const PulseTrace trace = sim.run(vectors, true);
    const CombEval comb(golden);
    const auto& pos = golden.primary_outputs();
    for (size_t c = 0; c < vectors.size(); ++c) {
        const std::vector<uint8_t> expected = comb.eval(vectors[c]);
        for (size_t i = 0; i < pos.size(); ++i)
            REQUIRE(trace.bits[pos[i]][c + l] == expected[i]);
    }
}

TEST_CASE("determinism: evaluation order cannot change results") {
    const Netlist golden = sfq_map(gen_arrmult(4));

    Netlist shuffled;
    for (NetId n = 0; n < golden.n_nets(); ++n) shuffled.add_net(golden.net_name(n));
    for (size_t i = golden.n_gates(); i-- > 0;) {
        const Gate& g = golden.gates()[i];
        std::vector<NetId> ins(g.input_span().begin(), g.input_span().end());
        shuffled.add_gate(g.kind, ins, g.output);
    }
    for (NetId pi : golden.primary_inputs()) shuffled.mark_input(pi);
    for (NetId po : golden.primary_outputs()) shuffled.mark_output(po);
    shuffled.finalize();

    RandomVectorSource source(8, 99);
    std::vector<std::vector<uint8_t>> vectors;
    for (int i = 0; i < 64; ++i) vectors.push_back(source.next());

    Simulator sim_a(golden), sim_b(shuffled);
    const PulseTrace ta = sim_a.run(vectors, true);
    const PulseTrace tb = sim_b.run(vectors, true);
    REQUIRE(ta.n_cycles == tb.n_cycles);
    for (NetId n = 0; n < golden.n_nets(); ++n) {
        const NetId m = *shuffled.find_net(golden.net_name(n));
        REQUIRE(ta.bits[n] == tb.bits[m]);
    }
}

TEST_CASE("simulator rejects unchecked netlists unless explicitly waived") {
    const Netlist broken = parse_bench("INPUT(a)\nOUTPUT(y)\nOUTPUT(z)\n"
                                       "y = DFF(a)\nz = DFF(a)");
    CHECK_THROWS_AS(Simulator{broken}, std::invalid_argument);
    Simulator sim(broken, {.skip_checks = true});
    const uint8_t one[1] = {1};
    CHECK(sim.step(one).size() == 2);
}

TEST_CASE("injected faults are forced every cycle in the pipelined simulator") {
    const Netlist net = parse_bench("INPUT(a)\nOUTPUT(y)\ny = BUF(a)");
    Fault fault;
    fault.site = {FaultSiteKind::GateOutput, *net.find_net("y"), 0, 0};
    fault.stuck_value = 0;
    const Netlist faulty = inject_fault(net, fault);
    Simulator sim(faulty);
    const uint8_t one[1] = {1};
    for (int c = 0; c < 4; ++c) CHECK(sim.step(one) == std::vector<uint8_t>{0});
}

TEST_CASE("trace exports") {
    const Netlist net = parse_bench("INPUT(a)\nOUTPUT(y)\ny = BUF(a)");
    Simulator sim(net);
    const PulseTrace trace = sim.run({{1}, {0}}, true);

    const std::string csv = trace_to_csv(net, trace);
    CHECK(csv.rfind("cycle,net,value\n", 0) == 0);
    CHECK(csv.find("0,a,1") != std::string::npos);

    const std::string vcd = trace_to_vcd(net, trace);
    CHECK(vcd.find("$timescale 1ps $end") != std::string::npos);
    CHECK(vcd.find("$var wire 1") != std::string::npos);
    CHECK(vcd.find("flux_quantum_mv_ps=2.07") != std::string::npos);
}
