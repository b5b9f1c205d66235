// Simulation-based verification of a DUV against a pipelined golden
// reference.
//
// Transactions are issued on consecutive clocks (fully pipelined); the
// response to the transaction issued at cycle c is read and compared at
// cycle c + l, where l is the GOLDEN latency. A full run of t
// transactions therefore simulates exactly t + l cycles (issue + drain).
// Using the golden latency for readout is what makes unbalanced mutants
// observable functionally: their early/late cone mismatches whenever
// consecutive vectors differ in that cone.
//
// Engine 1 applies seeded pseudo-random vectors; Engine 2 replays an ATPG
// test set once and, if budget remains without an error, continues with a
// seeded random tail so both engines are comparable under one budget.

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sfqv/atpg.hpp"
#include "sfqv/faults.hpp"
#include "sfqv/netlist.hpp"
#include "sfqv/simulator.hpp"

namespace sfqv {

enum class EngineKind : uint8_t { Random, Atpg };

std::string_view engine_name(EngineKind kind);
std::optional<EngineKind> engine_from_name(std::string_view name);

// Per-net value coverage: a net counts as covered once it has been
// observed carrying both a 0 and a 1 (value coverage, not edge pairs).
class CoverageModel {
public:
    explicit CoverageModel(size_t n_nets) : seen0_(n_nets, 0), seen1_(n_nets, 0) {}

    void observe(std::span<const uint8_t> net_values);
    double covered_pct() const;
    size_t n_nets() const { return seen0_.size(); }

private:
    std::vector<uint8_t> seen0_, seen1_;
};

// Pipelined expected-output provider. advance(v) consumes the vector
// issued this cycle and returns the PO response due this cycle, i.e. the
// response to the vector issued latency cycles earlier.
class ReferenceModel {
public:
    using Behavior = std::function<std::vector<uint8_t>(std::span<const uint8_t>)>;

    static ReferenceModel from_netlist(const Netlist& golden);
    static ReferenceModel from_behavioral(Behavior fn, size_t n_pos, uint32_t latency);

    std::vector<uint8_t> advance(std::span<const uint8_t> pi);
    uint32_t latency() const { return latency_; }
    void reset();

private:
    ReferenceModel() = default;

    std::unique_ptr<Simulator> sim_;
    const Netlist* golden_ = nullptr;
    Behavior fn_;
    size_t n_pos_ = 0;
    uint32_t latency_ = 0;
    std::vector<std::vector<uint8_t>> pipe_; // behavioral mode delay line
};

struct Mismatch {
    size_t transaction = 0;
    uint64_t readout_cycle = 0;
    std::vector<uint8_t> pi, expected, observed;
};

struct VerificationReport {
    EngineKind engine = EngineKind::Random;
    uint64_t seed = 0;
    std::string mutant; // description, empty for a clean DUV
    size_t budget = 0;
    size_t n_transactions_applied = 0;
    uint32_t latency = 0;
    bool detected = false;
    size_t first_error_transaction = 0;
    uint64_t first_error_cycle = 0;
    std::vector<Mismatch> mismatches; // first few only
    double final_coverage_pct = 0.0;
    std::vector<double> coverage_curve; // sampled after each transaction
    uint64_t simulated_cycles = 0;
    double wall_ms = 0.0; // excluded from determinism guarantees

    std::string to_json() const;
    std::string coverage_csv() const; // columns: transaction, percent
};

struct EngineOptions {
    EngineKind engine = EngineKind::Random;
    uint64_t seed = 1;
    size_t budget = 1000;
    bool stop_on_first_error = false;
    bool track_coverage = true;
    size_t mismatch_log_limit = 10;
    std::vector<double> weights;       // Engine 1 per-bit weights
    const TestSet* test_set = nullptr; // Engine 2
    std::string mutant_description;
};

VerificationReport run_engine(const Netlist& duv, const Netlist& golden,
                              const EngineOptions& options);

struct TrialRecord {
    uint64_t seed = 0;
    std::string mutant;
    bool detected = false;
    size_t transactions_to_detection = 0; // 1-based count when detected
    uint64_t first_error_cycle = 0;
    double wall_ms = 0.0;
};

struct TrialSet {
    MutantKind kind = MutantKind::StuckAt;
    EngineKind engine = EngineKind::Random;
    size_t budget = 0;
    std::vector<TrialRecord> trials;

    // detection-time CDF over trials; x = transactions, y = fraction
    std::string cdf_csv() const;
    // wall-clock variant (x = milliseconds); not deterministic across runs
    std::string cdf_ms_csv() const;
    std::string trials_csv() const; // deterministic (no wall time)
    // median transactions-to-detection, timeouts counted at budget + 1
    double median_transactions() const;
};

struct TrialOptions {
    MutantKind kind = MutantKind::StuckAt;
    // force the sampled stuck polarity (StuckAt trials only)
    std::optional<uint8_t> stuck_polarity;
    EngineKind engine = EngineKind::Random;
    size_t n_trials = 30;
    uint64_t base_seed = 1; // trial i uses base_seed + i
    size_t budget = 10000;
    int jobs = 1;
    const TestSet* test_set = nullptr; // Engine 2; generated once if null
};

// One fresh seeded mutant per trial, verified with stop-on-first-error.
TrialSet detection_trials(const Netlist& golden, const TrialOptions& options);

} // namespace sfqv
