#include "doctest.h"

#include "sfqv/atpg.hpp"
#include "sfqv/bench_io.hpp"
#include "sfqv/benchgen.hpp"
#include "sfqv/verifier.hpp"
#include "support/test_util.hpp"

using namespace sfqv;
using namespace sfqv::test;

TEST_CASE("scoreboard alignment: golden vs golden is mismatch-free") {
    const Netlist golden = sfq_map(gen_ksa(4));
    for (EngineKind engine : {EngineKind::Random, EngineKind::Atpg}) {
        AtpgRun run;
        EngineOptions options;
        options.engine = engine;
        options.seed = 9;
        options.budget = 100;
        if (engine == EngineKind::Atpg) {
            run = generate_test_set(golden);
            options.test_set = &run.set;
        }
        const VerificationReport report = run_engine(golden, golden, options);
        CHECK_FALSE(report.detected);
        CHECK(report.mismatches.empty());
        CHECK(report.n_transactions_applied == 100);
        CHECK(report.simulated_cycles == 100 + report.latency);
    }
}

TEST_CASE("Engine 2 first error equals the fault-simulation prediction") {
    const Netlist golden = sfq_map(gen_ksa(4));
    const AtpgRun run = generate_test_set(golden);
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        const Fault fault = sample_fault(golden, seed);
        const DetectionMatrix m = fault_simulate(golden, run.set.vectors, {fault});
        const int32_t predicted = m.first_detection(0);
        REQUIRE(predicted >= 0); // KSA test sets cover every fault

        EngineOptions options;
        options.engine = EngineKind::Atpg;
        options.test_set = &run.set;
        options.seed = seed;
        options.budget = run.set.vectors.size();
        options.stop_on_first_error = true;
        const VerificationReport report =
            run_engine(inject_fault(golden, fault), golden, options);
        REQUIRE(report.detected);
        CHECK(report.first_error_transaction == static_cast<size_t>(predicted));
        CHECK(report.first_error_cycle ==
              static_cast<uint64_t>(predicted) + report.latency);
    }
}

TEST_CASE("unbalanced mutant surfaces as a functional mismatch") {
    const Netlist golden = sfq_map(gen_ksa(4));
    const MutantResult mutant = make_mutant(golden, {MutantKind::UnbalanceBug, 21, {}});
    EngineOptions options;
    options.engine = EngineKind::Random;
    options.seed = 5;
    options.budget = 2000;
    options.stop_on_first_error = true;
    const VerificationReport report = run_engine(mutant.netlist, golden, options);
    CHECK(report.detected);
}

TEST_CASE("reference models: behavioral and netlist modes agree") {
    SUBCASE("KSA4 exhaustive") {
        const Netlist golden = sfq_map(gen_ksa(4));
        ReferenceModel netlist_mode = ReferenceModel::from_netlist(golden);
        ReferenceModel behavioral_mode = ReferenceModel::from_behavioral(
            [](std::span<const uint8_t> pi) { return behavioral(Family::Ksa, 4, pi); },
            golden.primary_outputs().size(), latency(golden));
        for (uint64_t x = 0; x < 512 + 6; ++x) {
            const auto pi = index_to_bits(x % 512, 9);
            REQUIRE(netlist_mode.advance(pi) == behavioral_mode.advance(pi));
        }
    }
    SUBCASE("behavioral multiplier: 3 x 5 = 15") {
        std::vector<uint8_t> pi(8, 0);
        pi[0] = 1; pi[1] = 1; // a = 3
        pi[4] = 1; pi[6] = 1; // b = 5
        const auto po = behavioral(Family::ArrMult, 4, pi);
        uint64_t value = 0;
        for (size_t i = 0; i < po.size(); ++i) value |= static_cast<uint64_t>(po[i]) << i;
        CHECK(value == 15);
    }
    SUBCASE("netlist mode on c17 equals the truth table") {
        const Netlist golden = sfq_map(c17());
        ReferenceModel model = ReferenceModel::from_netlist(golden);
        const uint32_t l = latency(golden);
        std::vector<std::vector<uint8_t>> expected;
        for (uint64_t x = 0; x < 32 + l; ++x) {
            const auto pi = index_to_bits(x % 32, 5);
            expected.push_back(behavioral(Family::C17, 0, pi));
            const auto po = model.advance(pi);
            if (x >= l) REQUIRE(po == expected[x - l]);
        }
    }
}

TEST_CASE("coverage model basics") {
    CoverageModel cov(2);
    CHECK(cov.covered_pct() == doctest::Approx(0.0));
    const uint8_t low[2] = {0, 0};
    cov.observe(low);
    CHECK(cov.covered_pct() == doctest::Approx(0.0)); // zeros alone cover nothing
    const uint8_t mixed[2] = {1, 0};
    cov.observe(mixed);
    CHECK(cov.covered_pct() == doctest::Approx(50.0));
}

TEST_CASE("exhaustive stimulus reaches full toggle coverage on mapped c17") {
    const Netlist golden = sfq_map(c17());
    Simulator sim(golden);
    CoverageModel cov(golden.n_nets());
    for (uint64_t x = 0; x < 32; ++x) cov.observe(sim.advance(index_to_bits(x, 5)));
    for (uint32_t d = 0; d < latency(golden); ++d)
        cov.observe(sim.advance(std::vector<uint8_t>(5, 0)));
    CHECK(cov.covered_pct() == doctest::Approx(100.0));
}

TEST_CASE("coverage curve is monotone and recorded per transaction") {
    const Netlist golden = sfq_map(gen_ksa(4));
    EngineOptions options;
    options.engine = EngineKind::Random;
    options.seed = 3;
    options.budget = 50;
    const VerificationReport report = run_engine(golden, golden, options);
    REQUIRE(report.coverage_curve.size() == 50);
    for (size_t i = 1; i < report.coverage_curve.size(); ++i)
        REQUIRE(report.coverage_curve[i] >= report.coverage_curve[i - 1]);
    CHECK(report.final_coverage_pct >= report.coverage_curve.back());
}

TEST_CASE("campaign determinism: identical seeds give identical reports") {
    const Netlist golden = sfq_map(gen_ksa(4));
    TrialOptions options;
    options.kind = MutantKind::StuckAt;
    options.engine = EngineKind::Random;
    options.n_trials = 8;
    options.base_seed = 77;
    options.budget = 500;

    const TrialSet a = detection_trials(golden, options);
    const TrialSet b = detection_trials(golden, options);
    CHECK(a.trials_csv() == b.trials_csv());
    CHECK(a.cdf_csv() == b.cdf_csv());

    options.jobs = 4; // scheduling must not change campaign output
    const TrialSet c = detection_trials(golden, options);
    CHECK(a.trials_csv() == c.trials_csv());
}

TEST_CASE("verification reports serialize; determinism modulo wall time") {
    const Netlist golden = sfq_map(gen_ksa(4));
    const MutantResult mutant = make_mutant(golden, {MutantKind::WrongGate, 4, {}});
    EngineOptions options;
    options.engine = EngineKind::Random;
    options.seed = 11;
    options.budget = 200;
    options.mutant_description = mutant.description;

    VerificationReport r1 = run_engine(mutant.netlist, golden, options);
    VerificationReport r2 = run_engine(mutant.netlist, golden, options);
    r1.wall_ms = r2.wall_ms = 0.0;
    CHECK(r1.to_json() == r2.to_json());
    CHECK(r1.to_json().find("\"mutant\"") != std::string::npos);
    CHECK(r1.coverage_csv().rfind("transaction,coverage_pct\n", 0) == 0);
}

TEST_CASE("trial medians: wrong gates are found no later than stuck-at-0") {
    const Netlist golden = sfq_map(gen_ksa(8));
    TrialOptions options;
    options.engine = EngineKind::Random;
    options.n_trials = 10;
    options.base_seed = 5;
    options.budget = 10000;

    options.kind = MutantKind::StuckAt;
    options.stuck_polarity = 0;
    const TrialSet sa0 = detection_trials(golden, options);

    options.kind = MutantKind::WrongGate;
    options.stuck_polarity.reset();
    const TrialSet wrong = detection_trials(golden, options);

    CHECK(wrong.median_transactions() <= sa0.median_transactions());
}

TEST_CASE("Engine 2 finds every detectable stuck-at within one test-set pass") {
    const Netlist golden = sfq_map(gen_ksa(16));
    const AtpgRun run = generate_test_set(golden);
    REQUIRE(run.set.coverage_pct == doctest::Approx(100.0));

    TrialOptions options;
    options.kind = MutantKind::StuckAt;
    options.stuck_polarity = 0;
    options.engine = EngineKind::Atpg;
    options.test_set = &run.set;
    options.n_trials = 10;
    options.base_seed = 31;
    options.budget = run.set.vectors.size(); // exactly one pass, no random tail
    const TrialSet set = detection_trials(golden, options);
    for (const TrialRecord& t : set.trials) {
        REQUIRE(t.detected);
        REQUIRE(t.transactions_to_detection <= run.set.vectors.size());
    }
}

TEST_CASE("degenerate latency-0 netlist still runs cleanly") {
    const Netlist wires = parse_bench("INPUT(a)\nOUTPUT(a)");
    REQUIRE(latency(wires) == 0);
    EngineOptions options;
    options.engine = EngineKind::Random;
    options.seed = 1;
    options.budget = 16;
    const VerificationReport report = run_engine(wires, wires, options);
    CHECK_FALSE(report.detected);
    CHECK(report.n_transactions_applied == 16);
}

TEST_CASE("interface mismatch is rejected") {
    const Netlist a = sfq_map(gen_ksa(4));
    const Netlist b = sfq_map(c17());
    CHECK_THROWS_AS(run_engine(b, a, {}), std::invalid_argument);
}

TEST_CASE("cdf dataset shape") {
    TrialSet set;
    set.budget = 100;
    set.trials = {{1, "m", true, 3, 9, 0.0},
                  {2, "m", true, 3, 9, 0.0},
                  {3, "m", true, 7, 13, 0.0},
                  {4, "m", false, 0, 0, 0.0}};
    const std::string csv = set.cdf_csv();
    CHECK(csv.rfind("transactions,fraction_detected\n", 0) == 0);
    CHECK(csv.find("3,0.5") != std::string::npos);
    CHECK(csv.find("7,0.75") != std::string::npos);
    CHECK(set.median_transactions() == doctest::Approx((3 + 7) / 2.0));

    // a clean DUV never detects: the CDF stays flat at zero
    TrialSet clean;
    clean.budget = 100;
    clean.trials = {{1, "", false, 0, 0, 0.0}};
    CHECK(clean.cdf_csv() == "transactions,fraction_detected\n");
}
