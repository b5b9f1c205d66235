#include "doctest.h"

#include <set>

#include "sfqv/bench_io.hpp"
#include "sfqv/benchgen.hpp"
#include "sfqv/checkers.hpp"
#include "sfqv/faults.hpp"
#include "support/test_util.hpp"

using namespace sfqv;
using namespace sfqv::test;

namespace {

// brute-force faulty-function fingerprint over all inputs (<= 16 PIs)
std::vector<uint8_t> fault_fingerprint(const Netlist& net, const Fault& fault) {
    const size_t n = net.primary_inputs().size();
    std::vector<uint8_t> fp;
    for (uint64_t x = 0; x < (1ull << n); ++x) {
        const auto po = naive_eval(net, index_to_bits(x, n), fault);
        fp.insert(fp.end(), po.begin(), po.end());
    }
    return fp;
}

} // namespace

TEST_CASE("enumerate_faults: single AND from PIs") {
    const Netlist net = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)");
    const auto universe = enumerate_faults(net);
    // fanout-1 pins coincide with their PI stems: sites are a, b, y
    CHECK(universe.size() == 6);
    std::set<std::string> labels;
    for (const Fault& f : universe) labels.insert(f.label(net));
    CHECK(labels.count("a SA0") == 1);
    CHECK(labels.count("y SA1") == 1);
}

TEST_CASE("enumerate_faults: empty netlist") {
    Netlist empty;
    empty.finalize();
    CHECK(enumerate_faults(empty).empty());
}

TEST_CASE("enumerate_faults: c17 has the 34-fault universe") {
    const Netlist net = c17();
    CHECK(enumerate_faults(net).size() == 34);
}

TEST_CASE("collapse_faults: single AND gives the classic 4 classes") {
    const Netlist net = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)");
    auto universe = enumerate_faults(net);
    const auto reps = collapse_faults(net, universe);
    REQUIRE(reps.size() == 4);

    // brute-force: merged faults must have identical faulty functions
    for (const Fault& f : universe)
        for (const Fault& g : universe)
            if (f.class_id == g.class_id)
                CHECK(fault_fingerprint(net, f) == fault_fingerprint(net, g));

    // the SA0 class covers both input-SA0s and the output SA0
    std::set<std::string> sa0_class;
    for (const Fault& f : universe)
        if (f.class_id == universe[0].class_id) sa0_class.insert(f.label(net));
    CHECK(sa0_class == std::set<std::string>{"a SA0", "b SA0", "y SA0"});
}

TEST_CASE("collapse_faults: inverter chain collapses to 2 classes") {
    const Netlist net = parse_bench("INPUT(a)\nOUTPUT(y)\nt = INV(a)\ny = INV(t)");
    auto universe = enumerate_faults(net);
    const auto reps = collapse_faults(net, universe);
    CHECK(reps.size() == 2);
    for (const Fault& f : universe)
        for (const Fault& g : universe)
            if (f.class_id == g.class_id)
                CHECK(fault_fingerprint(net, f) == fault_fingerprint(net, g));
}

TEST_CASE("collapse_faults: c17 yields 22 classes, soundly") {
    const Netlist net = c17();
    auto universe = enumerate_faults(net);
    const auto reps = collapse_faults(net, universe);
    CHECK(reps.size() == 22);

    std::map<int32_t, std::vector<uint8_t>> fingerprint_of_class;
    for (const Fault& f : universe) {
        const auto fp = fault_fingerprint(net, f);
        auto [it, fresh] = fingerprint_of_class.emplace(f.class_id, fp);
        if (!fresh) CHECK(it->second == fp);
    }
}

TEST_CASE("collapse_faults: partition over the mapped KSA4 universe") {
    const Netlist golden = sfq_map(gen_ksa(4));
    auto universe = enumerate_faults(golden);
    const auto reps = collapse_faults(golden, universe);
    std::set<int32_t> seen;
    for (const Fault& f : universe) {
        REQUIRE(f.class_id >= 0);
        REQUIRE(f.class_id < static_cast<int32_t>(reps.size()));
        seen.insert(f.class_id);
    }
    CHECK(seen.size() == reps.size());

    // soundness spot check: every class with several members agrees functionally
    std::map<int32_t, std::vector<uint8_t>> fingerprint_of_class;
    for (const Fault& f : universe) {
        const auto fp = fault_fingerprint(golden, f);
        auto [it, fresh] = fingerprint_of_class.emplace(f.class_id, fp);
        if (!fresh) REQUIRE(it->second == fp);
    }
}

TEST_CASE("inject_fault: stuck site forced, golden untouched") {
    const Netlist net = parse_bench("INPUT(a)\nOUTPUT(y)\ny = BUF(a)");
    Fault sa0{{FaultSiteKind::GateOutput, *net.find_net("y"), 0, 0}, 0, -1};
    const Netlist faulty = inject_fault(net, sa0);
    CHECK(net.forced_sites().empty());
    REQUIRE(faulty.forced_sites().size() == 1);
    const CombEval eval(faulty);
    for (uint64_t x = 0; x < 2; ++x) {
        const auto pi = index_to_bits(x, 1);
        CHECK(eval.eval(pi) == std::vector<uint8_t>{0});
        CHECK(naive_eval(net, pi, sa0) == std::vector<uint8_t>{0});
    }
}

TEST_CASE("inject_fault: detection and non-detection vectors on KSA4") {
    const Netlist golden = sfq_map(gen_ksa(4));
    // SA1 on some AND output
    Fault fault;
    for (const Gate& g : golden.gates())
        if (g.kind == GateKind::And2) {
            fault = {{FaultSiteKind::GateOutput, g.output, g.id, 0}, 1, -1};
            break;
        }
    const Netlist faulty = inject_fault(golden, fault);
    const CombEval golden_eval(golden), faulty_eval(faulty);

    int first_detect = -1, first_miss = -1;
    for (uint64_t x = 0; x < 512; ++x) {
        const auto pi = index_to_bits(x, 9);
        const bool differs = golden_eval.eval(pi) != faulty_eval.eval(pi);
        // oracle: the same verdict from the independent evaluator
        CHECK(differs == (naive_eval(golden, pi) != naive_eval(golden, pi, fault)));
        if (differs && first_detect < 0) first_detect = static_cast<int>(x);
        if (!differs && first_miss < 0) first_miss = static_cast<int>(x);
    }
    CHECK(first_detect >= 0);
    CHECK(first_miss >= 0);
}

TEST_CASE("injected netlists still pass both structural checkers") {
    const Netlist golden = sfq_map(gen_ksa(4));
    const Netlist faulty = inject_fault(golden, sample_fault(golden, 42));
    CHECK(check_fanout(faulty).passed());
    CHECK(check_path_balance(faulty).passed());
}

TEST_CASE("sample_fault: deterministic per seed, SA0-heavy") {
    const Netlist golden = sfq_map(gen_ksa(8));
    const Fault a = sample_fault(golden, 123);
    const Fault b = sample_fault(golden, 123);
    CHECK(a.site == b.site);
    CHECK(a.stuck_value == b.stuck_value);

    size_t sa0 = 0;
    const size_t samples = 2000;
    for (uint64_t seed = 0; seed < samples; ++seed)
        if (sample_fault(golden, seed).stuck_value == 0) ++sa0;
    const double fraction = static_cast<double>(sa0) / static_cast<double>(samples);
    CHECK(fraction > 0.97);
    CHECK(fraction <= 1.0);
}

TEST_CASE("sample_fault: single-net netlist") {
    const Netlist net = parse_bench("INPUT(a)\nOUTPUT(y)\ny = BUF(a)");
    const Fault f = sample_fault(net, 7);
    const std::string label = f.label(net);
    CHECK((label.rfind("a ", 0) == 0 || label.rfind("y ", 0) == 0));
}

TEST_CASE("make_mutant: UnbalanceBug on KSA4 drops one DFF and skews depths by 1") {
    const Netlist golden = sfq_map(gen_ksa(4));
    const MutantResult mutant = make_mutant(golden, {MutantKind::UnbalanceBug, 17, {}});
    CHECK(mutant.netlist.stats().n_dffs == golden.stats().n_dffs - 1);
    const CheckResult result = check_path_balance(mutant.netlist);
    REQUIRE_FALSE(result.passed());
    CHECK(result.max_circuit_depth == 6);
}

TEST_CASE("make_mutant: FanoutBug on mapped c17 drops a splitter") {
    const Netlist golden = sfq_map(c17());
    REQUIRE(golden.stats().n_splitters == 3);
    const MutantResult mutant = make_mutant(golden, {MutantKind::FanoutBug, 5, {}});
    CHECK(mutant.netlist.stats().n_splitters == 2);
    CHECK_FALSE(check_fanout(mutant.netlist).passed());
}

TEST_CASE("make_mutant: WrongGate AND->OR differs on exactly 2 of 4 vectors") {
    const Netlist net = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)");
    const MutantResult mutant = make_mutant(net, {MutantKind::WrongGate, 1, {}});
    CHECK(mutant.netlist.gate(0).kind == GateKind::Or2);
    int differing = 0;
    for (uint64_t x = 0; x < 4; ++x)
        if (naive_eval(net, index_to_bits(x, 2)) != naive_eval(mutant.netlist, index_to_bits(x, 2)))
            ++differing;
    CHECK(differing == 2);
}

TEST_CASE("mutants fail exactly their designated checker") {
    for (Family family : {Family::Ksa, Family::C17}) {
        const Netlist golden = sfq_map(gen_logical(family, 4));
        for (uint64_t seed : {1, 2, 3, 4, 5}) {
            const auto fanout = make_mutant(golden, {MutantKind::FanoutBug, seed, {}});
            CHECK_FALSE(check_fanout(fanout.netlist).passed());

            const auto unbalanced = make_mutant(golden, {MutantKind::UnbalanceBug, seed, {}});
            CHECK(check_fanout(unbalanced.netlist).passed());
            CHECK_FALSE(check_path_balance(unbalanced.netlist).passed());

            const auto wrong = make_mutant(golden, {MutantKind::WrongGate, seed, {}});
            CHECK(check_fanout(wrong.netlist).passed());
            CHECK(check_path_balance(wrong.netlist).passed());

            const auto stuck = make_mutant(golden, {MutantKind::StuckAt, seed, {}});
            CHECK(check_fanout(stuck.netlist).passed());
            CHECK(check_path_balance(stuck.netlist).passed());
        }
    }
}

TEST_CASE("make_mutant: no eligible target") {
    const Netlist net = parse_bench("INPUT(a)\nOUTPUT(y)\ny = BUF(a)");
    CHECK_THROWS_AS(make_mutant(net, {MutantKind::FanoutBug, 1, {}}), std::runtime_error);
}

TEST_CASE("fault CSV and mutant spec JSON round-trip") {
    const Netlist golden = sfq_map(c17());
    auto universe = enumerate_faults(golden);
    collapse_faults(golden, universe);
    const std::string csv = faults_to_csv(golden, universe);
    CHECK(csv.rfind("site_kind,net,gate,pin,stuck,class\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(universe.size()) + 1);

    MutantSpec spec{MutantKind::StuckAt, 99, sample_fault(golden, 99)};
    const std::string json = mutant_spec_to_json(golden, spec);
    const MutantSpec parsed = mutant_spec_from_json(golden, json);
    CHECK(parsed.kind == spec.kind);
    CHECK(parsed.seed == spec.seed);
    REQUIRE(parsed.target.has_value());
    CHECK(parsed.target->site == spec.target->site);
    CHECK(parsed.target->stuck_value == spec.target->stuck_value);
}

TEST_CASE("make_mutant: explicit gate targets") {
    const Netlist golden = sfq_map(c17());

    // wrong gate on a named logic gate
    std::optional<GateId> some_and;
    for (const Gate& g : golden.gates())
        if (g.kind == GateKind::And2) {
            some_and = g.id;
            break;
        }
    REQUIRE(some_and);
    MutantSpec wrong{MutantKind::WrongGate, 0, {}, some_and};
    const MutantResult mutated = make_mutant(golden, wrong);
    CHECK(mutated.netlist.gate(*some_and).kind == GateKind::Or2);

    // the gate target round-trips through JSON by output-net name
    const MutantSpec parsed = mutant_spec_from_json(golden, mutant_spec_to_json(golden, wrong));
    REQUIRE(parsed.target_gate.has_value());
    CHECK(*parsed.target_gate == *some_and);

    // kind-inappropriate targets are rejected
    MutantSpec bad{MutantKind::FanoutBug, 0, {}, some_and};
    CHECK_THROWS_AS(make_mutant(golden, bad), std::runtime_error);
}

TEST_CASE("transparent sites can be enumerated on request") {
    const Netlist golden = sfq_map(c17());
    const auto logical_only = enumerate_faults(golden, false);
    auto with_transparent = enumerate_faults(golden, true);
    CHECK(with_transparent.size() > logical_only.size());
    // identity collapsing folds the DFF/splitter sites back onto stems:
    // same class count either way
    auto universe = logical_only;
    const auto reps = collapse_faults(golden, universe);
    const auto reps_t = collapse_faults(golden, with_transparent);
    CHECK(reps.size() == reps_t.size());
}
