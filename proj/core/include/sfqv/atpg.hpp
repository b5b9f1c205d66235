// Deterministic test pattern generation for single stuck-at faults.
//
// ATPG operates on the DFF-stripped combinational skeleton (CombEval):
// for a netlist passing both checkers, the pipelined circuit is a delayed
// combinational function, so a combinational test detects the same fault
// in the pipeline l cycles later.
//
// generate_test is a PODEM-style branch-and-bound search: decision
// variables are primary inputs only, with objective/backtrace steering
// and an X-path pruning check. A fault is Redundant when the search space
// is exhausted without a test, Aborted when the backtrack limit is hit.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sfqv/faults.hpp"
#include "sfqv/netlist.hpp"
#include "sfqv/rng.hpp"
#include "sfqv/simulator.hpp"

namespace sfqv {

struct AtpgConfig {
    int backtrack_limit = 1000;
    bool compaction = true;
    enum class Fill : uint8_t { Zero, One, Random } fill = Fill::Zero;
    uint64_t fill_seed = 1;
};

struct TestSet {
    std::vector<std::vector<uint8_t>> vectors;
    // collapsed class id -> index of the first detecting vector, or -1
    std::vector<int32_t> detects;
    std::vector<int32_t> redundant; // class ids proven undetectable
    std::vector<int32_t> aborted;   // class ids abandoned at the backtrack limit
    size_t n_classes = 0;
    double coverage_pct = 0.0; // detected / (n_classes - redundant) * 100

    size_t n_detected() const;
    // one vector per line as a bit string, first character = first PI
    std::string vectors_text() const;
    std::string sidecar_json(const Netlist& net, const std::vector<Fault>& reps) const;
};

std::vector<std::vector<uint8_t>> parse_vectors_text(const std::string& text, size_t n_bits);

struct DetectionMatrix {
    size_t n_faults = 0;
    size_t n_vectors = 0;
    std::vector<uint8_t> bits; // [fault * n_vectors + vector]

    bool detected(size_t fault, size_t vector) const { return bits[fault * n_vectors + vector] != 0; }
    int32_t first_detection(size_t fault) const;
};

// detected iff the faulty PO vector differs from the golden PO vector
DetectionMatrix fault_simulate(const CombEval& eval,
                               const std::vector<std::vector<uint8_t>>& vectors,
                               const std::vector<Fault>& faults);
DetectionMatrix fault_simulate(const Netlist& net,
                               const std::vector<std::vector<uint8_t>>& vectors,
                               const std::vector<Fault>& faults);

enum class TestGenOutcome : uint8_t { Found, Redundant, Aborted };

struct TestGenResult {
    TestGenOutcome outcome = TestGenOutcome::Aborted;
    std::vector<uint8_t> vector; // valid when Found (validated by fault simulation)
    int backtracks = 0;
};

TestGenResult generate_test(const CombEval& eval, const Fault& fault, const AtpgConfig& cfg);

struct AtpgRun {
    TestSet set;
    std::vector<Fault> universe;        // class ids assigned
    std::vector<Fault> representatives; // one per class
};

// Fault-dropping loop over collapsed classes with optional reverse-order
// compaction. detects indices refer to the final vector list.
AtpgRun generate_test_set(const Netlist& net, const AtpgConfig& cfg = {});

// Seeded unbounded stream of PI vectors; each bit is 1 with its weight
// (default 0.5). Deterministic per seed.
class RandomVectorSource {
public:
    RandomVectorSource(size_t n_bits, uint64_t seed, std::vector<double> weights = {});

    std::vector<uint8_t> next();
    size_t n_bits() const { return n_bits_; }

private:
    size_t n_bits_;
    Rng rng_;
    std::vector<double> weights_;
};

} // namespace sfqv
