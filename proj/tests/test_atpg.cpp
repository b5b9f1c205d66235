#include "doctest.h"

#include "sfqv/atpg.hpp"
#include "sfqv/bench_io.hpp"
#include "sfqv/benchgen.hpp"
#include "support/test_util.hpp"

using namespace sfqv;
using namespace sfqv::test;

namespace {

Fault find_fault(const Netlist& net, const std::string& label) {
    for (const Fault& f : enumerate_faults(net))
        if (f.label(net) == label) return f;
    FAIL(("no fault labelled " + label).c_str());
    return {};
}

} // namespace

TEST_CASE("fault_simulate: truth-table cases on a single AND") {
    const Netlist net = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)");
    const std::vector<Fault> faults = {find_fault(net, "y SA1"), find_fault(net, "a SA1")};
    const std::vector<std::vector<uint8_t>> vectors = {{0, 0}, {1, 1}};
    const DetectionMatrix m = fault_simulate(net, vectors, faults);
    CHECK(m.detected(0, 0));        // output SA1 visible on (0,0)
    CHECK_FALSE(m.detected(1, 1));  // input-a SA1 masked by (1,1)
    CHECK_FALSE(m.detected(1, 0));  // (0,0): faulty a=1 but b=0 keeps y=0
}

TEST_CASE("fault_simulate: exhaustive c17 matches the independent oracle") {
    const Netlist net = c17();
    auto universe = enumerate_faults(net);
    std::vector<std::vector<uint8_t>> vectors;
    for (uint64_t x = 0; x < 32; ++x) vectors.push_back(index_to_bits(x, 5));
    const DetectionMatrix m = fault_simulate(net, vectors, universe);
    for (size_t f = 0; f < universe.size(); ++f)
        for (size_t v = 0; v < vectors.size(); ++v) {
            const bool oracle =
                naive_eval(net, vectors[v]) != naive_eval(net, vectors[v], universe[f]);
            REQUIRE(m.detected(f, v) == oracle);
        }
}

TEST_CASE("generate_test: AND output SA0 has the unique test (1,1)") {
    const Netlist net = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)");
    const CombEval eval(net);
    const TestGenResult r = generate_test(eval, find_fault(net, "y SA0"), {});
    REQUIRE(r.outcome == TestGenOutcome::Found);
    CHECK(r.vector == std::vector<uint8_t>{1, 1});
}

TEST_CASE("generate_test: constant-0 cone is provably redundant") {
    const Netlist net = parse_bench("INPUT(a)\nOUTPUT(y)\nt = INV(a)\ny = AND(a, t)");
    const CombEval eval(net);
    const Fault out_sa0 = find_fault(net, "y SA0");
    // exhaustive sweep confirms undetectability first
    for (uint64_t x = 0; x < 2; ++x)
        REQUIRE(naive_eval(net, index_to_bits(x, 1)) ==
                naive_eval(net, index_to_bits(x, 1), out_sa0));
    CHECK(generate_test(eval, out_sa0, {}).outcome == TestGenOutcome::Redundant);
}

TEST_CASE("generate_test: every c17 collapsed fault gets a test") {
    const Netlist net = c17();
    auto universe = enumerate_faults(net);
    const auto reps = collapse_faults(net, universe);
    const CombEval eval(net);
    for (const Fault& rep : reps) {
        const TestGenResult r = generate_test(eval, rep, {});
        REQUIRE(r.outcome == TestGenOutcome::Found);
        CHECK(naive_eval(net, r.vector) != naive_eval(net, r.vector, rep));
    }
}

TEST_CASE("generate_test_set: c17 reaches full coverage") {
    const AtpgRun run = generate_test_set(c17());
    CHECK(run.set.coverage_pct == doctest::Approx(100.0));
    CHECK(run.set.redundant.empty());
    CHECK(run.set.aborted.empty());
    MESSAGE("c17 vectors (reference 7): ", run.set.vectors.size());
    CHECK(run.set.vectors.size() <= 14);
}

TEST_CASE("generate_test_set: KSA4 and KSA8 at 100%, none redundant or aborted") {
    for (int n : {4, 8}) {
        const AtpgRun run = generate_test_set(sfq_map(gen_ksa(n)));
        CHECK(run.set.coverage_pct == doctest::Approx(100.0));
        CHECK(run.set.redundant.empty());
        CHECK(run.set.aborted.empty());
    }
}

TEST_CASE("generate_test_set: single AND needs exactly the 3 forced vectors") {
    const Netlist net = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)");
    const AtpgRun run = generate_test_set(net);
    CHECK(run.set.n_classes == 4);
    CHECK(run.set.coverage_pct == doctest::Approx(100.0));
    // out-SA0 needs (1,1), a-SA1 needs (0,1), b-SA1 needs (1,0)
    CHECK(run.set.vectors.size() == 3);
}

TEST_CASE("generate_test_set: soundness and first-detection indices") {
    const AtpgRun run = generate_test_set(sfq_map(gen_ksa(4)));
    const Netlist golden = sfq_map(gen_ksa(4));
    REQUIRE(isomorphic(golden, sfq_map(gen_ksa(4))));

    // every vector is some class's first detector
    std::vector<uint8_t> first_detector(run.set.vectors.size(), 0);
    for (size_t c = 0; c < run.set.n_classes; ++c)
        if (run.set.detects[c] >= 0) first_detector[static_cast<size_t>(run.set.detects[c])] = 1;
    for (uint8_t used : first_detector) CHECK(used == 1);

    // recorded indices equal a from-scratch fault simulation
    const DetectionMatrix m = fault_simulate(golden, run.set.vectors, run.representatives);
    for (size_t c = 0; c < run.set.n_classes; ++c)
        REQUIRE(run.set.detects[c] == m.first_detection(c));
}

TEST_CASE("generate_test_set: coverage recomputed by the independent oracle") {
    const auto recompute = [](const Netlist& net) {
        const AtpgRun run = generate_test_set(net);
        size_t detected = 0;
        for (const Fault& rep : run.representatives) {
            bool hit = false;
            for (const auto& v : run.set.vectors)
                if (naive_eval(net, v) != naive_eval(net, v, rep)) {
                    hit = true;
                    break;
                }
            if (hit) ++detected;
        }
        const double oracle_pct =
            100.0 * static_cast<double>(detected) /
            static_cast<double>(run.set.n_classes - run.set.redundant.size());
        CHECK(run.set.coverage_pct == doctest::Approx(oracle_pct));
    };
    recompute(c17());
    recompute(sfq_map(gen_ksa(4)));
}

TEST_CASE("every declared-redundant fault is confirmed by exhaustive sweep") {
    struct Case {
        Netlist net;
        const char* name;
        int reference;
    };
    std::vector<Case> cases;
    cases.push_back({sfq_map(gen_arrmult(4)), "ArrMult4", 1});
    cases.push_back({sfq_map(gen_intdiv(4)), "IntDiv4", 10});
    for (const Case& c : cases) {
        const AtpgRun run = generate_test_set(c.net);
        CHECK(run.set.aborted.empty());
        const size_t n_pis = c.net.primary_inputs().size();
        for (int32_t cls : run.set.redundant) {
            const Fault& rep = run.representatives[static_cast<size_t>(cls)];
            for (uint64_t x = 0; x < (1ull << n_pis); ++x) {
                const auto pi = index_to_bits(x, n_pis);
                REQUIRE(naive_eval(c.net, pi) == naive_eval(c.net, pi, rep));
            }
        }
        MESSAGE(std::string(c.name), " redundant classes (reference ", c.reference,
                "): ", run.set.redundant.size());
    }
}

TEST_CASE("test set text round-trips and the sidecar is well-formed") {
    const AtpgRun run = generate_test_set(c17());
    const std::string text = run.set.vectors_text();
    const auto parsed = parse_vectors_text(text, 5);
    CHECK(parsed == run.set.vectors);
    CHECK_THROWS(parse_vectors_text("01\n", 5));
    CHECK_THROWS(parse_vectors_text("01x01\n", 5));

    const std::string json = run.set.sidecar_json(c17(), run.representatives);
    CHECK(json.find("\"coverage_pct\": 100.0") != std::string::npos);
}

TEST_CASE("pseudo-random vectors: determinism, weights, balance") {
    CHECK_THROWS_AS(RandomVectorSource(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(RandomVectorSource(4, 1, {0.5}), std::invalid_argument);

    RandomVectorSource a(16, 42), b(16, 42);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next() == b.next());

    RandomVectorSource pinned(3, 7, {1.0, 0.0, 0.5});
    for (int i = 0; i < 50; ++i) {
        const auto v = pinned.next();
        CHECK(v[0] == 1);
        CHECK(v[1] == 0);
    }

    RandomVectorSource fair(8, 13);
    std::vector<size_t> ones(8, 0);
    const size_t samples = 10000;
    for (size_t i = 0; i < samples; ++i) {
        const auto v = fair.next();
        for (size_t bit = 0; bit < 8; ++bit) ones[bit] += v[bit];
    }
    for (size_t bit = 0; bit < 8; ++bit) {
        const double mean = static_cast<double>(ones[bit]) / static_cast<double>(samples);
        CHECK(mean > 0.48);
        CHECK(mean < 0.52);
    }
}

TEST_CASE("abort path: proving redundancy needs backtracks the limit can deny") {
    const Netlist net = parse_bench("INPUT(a)\nOUTPUT(y)\nt = INV(a)\ny = AND(a, t)");
    const CombEval eval(net);
    const Fault out_sa0 = find_fault(net, "y SA0");
    AtpgConfig strict;
    strict.backtrack_limit = 1000;
    CHECK(generate_test(eval, out_sa0, strict).outcome == TestGenOutcome::Redundant);
    AtpgConfig tiny;
    tiny.backtrack_limit = 0; // the first backtrack aborts the search
    CHECK(generate_test(eval, out_sa0, tiny).outcome == TestGenOutcome::Aborted);
}
