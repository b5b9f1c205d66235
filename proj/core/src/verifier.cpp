#include "sfqv/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <future>
#include <memory>

#include "json.hpp"

#include "sfqv/checkers.hpp"

namespace sfqv {

std::string_view engine_name(EngineKind kind) {
    return kind == EngineKind::Random ? "random" : "atpg";
}

std::optional<EngineKind> engine_from_name(std::string_view name) {
    if (name == "random" || name == "1") return EngineKind::Random;
    if (name == "atpg" || name == "2") return EngineKind::Atpg;
    return std::nullopt;
}

void CoverageModel::observe(std::span<const uint8_t> net_values) {
    if (net_values.size() != seen0_.size())
        throw std::invalid_argument("coverage net count mismatch");
    for (size_t i = 0; i < net_values.size(); ++i) {
        if (net_values[i]) seen1_[i] = 1;
        else seen0_[i] = 1;
    }
}

double CoverageModel::covered_pct() const {
    if (seen0_.empty()) return 100.0;
    size_t covered = 0;
    for (size_t i = 0; i < seen0_.size(); ++i)
        if (seen0_[i] && seen1_[i]) ++covered;
    return 100.0 * static_cast<double>(covered) / static_cast<double>(seen0_.size());
}

ReferenceModel ReferenceModel::from_netlist(const Netlist& golden) {
    ReferenceModel ref;
    ref.golden_ = &golden;
    ref.sim_ = std::make_unique<Simulator>(golden);
    ref.latency_ = ref.sim_->latency();
    ref.n_pos_ = golden.primary_outputs().size();
    return ref;
}

ReferenceModel ReferenceModel::from_behavioral(Behavior fn, size_t n_pos, uint32_t latency) {
    ReferenceModel ref;
    ref.fn_ = std::move(fn);
    ref.n_pos_ = n_pos;
    ref.latency_ = latency;
    return ref;
}

void ReferenceModel::reset() {
    if (sim_) sim_->reset();
    pipe_.clear();
}

std::vector<uint8_t> ReferenceModel::advance(std::span<const uint8_t> pi) {
    if (sim_) {
        const auto& values = sim_->advance(pi);
        std::vector<uint8_t> po(n_pos_);
        const auto& pos = golden_->primary_outputs();
        for (size_t i = 0; i < po.size(); ++i) po[i] = values[pos[i]];
        return po;
    }
    pipe_.push_back(fn_(pi));
    if (pipe_.size() <= latency_) return std::vector<uint8_t>(n_pos_, 0);
    std::vector<uint8_t> out = std::move(pipe_.front());
    pipe_.erase(pipe_.begin());
    return out;
}

namespace {

std::string bits_to_string(std::span<const uint8_t> bits) {
    std::string s;
    s.reserve(bits.size());
    for (uint8_t b : bits) s += b ? '1' : '0';
    return s;
}

// Engine 2's random tail draws from a derived stream so replayed test-set
// prefixes stay independent of the tail.
uint64_t tail_seed(uint64_t seed) {
    uint64_t s = seed ^ 0x7a115eedull;
    return splitmix64(s);
}

} // namespace

std::string VerificationReport::to_json() const {
    nlohmann::json j;
    j["engine"] = std::string(engine_name(engine));
    j["seed"] = seed;
    if (!mutant.empty()) j["mutant"] = mutant;
    j["budget"] = budget;
    j["n_transactions_applied"] = n_transactions_applied;
    j["latency"] = latency;
    j["detected"] = detected;
    if (detected)
        j["first_error"] = {{"transaction", first_error_transaction},
                            {"cycle", first_error_cycle}};
    nlohmann::json mm = nlohmann::json::array();
    for (const Mismatch& m : mismatches)
        mm.push_back({{"transaction", m.transaction},
                      {"cycle", m.readout_cycle},
                      {"pi", bits_to_string(m.pi)},
                      {"expected", bits_to_string(m.expected)},
                      {"observed", bits_to_string(m.observed)}});
    j["mismatches"] = mm;
    j["final_coverage_pct"] = final_coverage_pct;
    j["simulated_cycles"] = simulated_cycles;
    j["wall_ms"] = wall_ms;
    return j.dump(2);
}

std::string VerificationReport::coverage_csv() const {
    std::string out = "transaction,coverage_pct\n";
    for (size_t i = 0; i < coverage_curve.size(); ++i)
        out += std::to_string(i + 1) + "," + std::to_string(coverage_curve[i]) + "\n";
    return out;
}

VerificationReport run_engine(const Netlist& duv, const Netlist& golden,
                              const EngineOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();

    if (duv.primary_inputs().size() != golden.primary_inputs().size() ||
        duv.primary_outputs().size() != golden.primary_outputs().size())
        throw std::invalid_argument("DUV and golden PI/PO interfaces differ");
    if (options.engine == EngineKind::Atpg && options.test_set == nullptr)
        throw std::invalid_argument("ATPG engine requires a test set");
    if (options.budget < 1) throw std::invalid_argument("budget must be >= 1");

    ReferenceModel reference = ReferenceModel::from_netlist(golden); // checks golden
    Simulator duv_sim(duv, {.skip_checks = true});
    const uint32_t l = reference.latency();

    const size_t n_pis = golden.primary_inputs().size();
    RandomVectorSource stream(n_pis,
                              options.engine == EngineKind::Random ? options.seed
                                                                   : tail_seed(options.seed),
                              options.weights);

    VerificationReport report;
    report.engine = options.engine;
    report.seed = options.seed;
    report.mutant = options.mutant_description;
    report.budget = options.budget;
    report.latency = l;

    CoverageModel coverage(duv.n_nets());

    const auto& duv_pos = duv.primary_outputs();
    const std::vector<uint8_t> zeros(n_pis, 0);
    std::vector<std::vector<uint8_t>> pending; // issued vectors awaiting readout
    pending.reserve(options.budget + 1);

    size_t issued = 0;
    bool stop = false;
    for (uint64_t c = 0; !stop; ++c) {
        std::vector<uint8_t> vec;
        const bool issuing = issued < options.budget;
        if (issuing) {
            if (options.engine == EngineKind::Atpg && issued < options.test_set->vectors.size())
                vec = options.test_set->vectors[issued];
            else
                vec = stream.next();
            pending.push_back(vec);
            ++issued;
        } else {
            vec = zeros;
        }

        const auto& values = duv_sim.advance(vec);
        const std::vector<uint8_t> expected = reference.advance(vec);
        if (options.track_coverage) {
            coverage.observe(values);
            if (issuing) report.coverage_curve.push_back(coverage.covered_pct());
        }

        if (c >= l) {
            const size_t k = static_cast<size_t>(c - l);
            if (k < issued) {
                std::vector<uint8_t> observed(duv_pos.size());
                for (size_t i = 0; i < observed.size(); ++i) observed[i] = values[duv_pos[i]];
                if (observed != expected) {
                    if (!report.detected) {
                        report.detected = true;
                        report.first_error_transaction = k;
                        report.first_error_cycle = c;
                    }
                    if (report.mismatches.size() < options.mismatch_log_limit)
                        report.mismatches.push_back({k, c, pending[k], expected, observed});
                    if (options.stop_on_first_error) stop = true;
                }
                if (k + 1 == issued && !issuing) stop = true; // all readouts drained
            } else if (!issuing) {
                stop = true;
            }
        }
    }

    report.n_transactions_applied = issued;
    report.final_coverage_pct = options.track_coverage ? coverage.covered_pct() : 0.0;
    report.simulated_cycles = duv_sim.cycle();
    report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                         .count();
    return report;
}

std::string TrialSet::cdf_csv() const {
    std::vector<size_t> times;
    for (const TrialRecord& t : trials)
        if (t.detected) times.push_back(t.transactions_to_detection);
    std::sort(times.begin(), times.end());
    std::string out = "transactions,fraction_detected\n";
    const double n = static_cast<double>(trials.size());
    size_t i = 0;
    while (i < times.size()) {
        size_t j = i;
        while (j < times.size() && times[j] == times[i]) ++j;
        out += std::to_string(times[i]) + "," + std::to_string(static_cast<double>(j) / n) + "\n";
        i = j;
    }
    return out;
}

std::string TrialSet::cdf_ms_csv() const {
    std::vector<double> times;
    for (const TrialRecord& t : trials)
        if (t.detected) times.push_back(t.wall_ms);
    std::sort(times.begin(), times.end());
    std::string out = "milliseconds,fraction_detected\n";
    const double n = static_cast<double>(trials.size());
    for (size_t i = 0; i < times.size(); ++i)
        out += std::to_string(times[i]) + "," +
               std::to_string(static_cast<double>(i + 1) / n) + "\n";
    return out;
}

std::string TrialSet::trials_csv() const {
    std::string out = "seed,mutant,detected,transactions_to_detection,first_error_cycle\n";
    for (const TrialRecord& t : trials) {
        std::string mutant = t.mutant;
        std::replace(mutant.begin(), mutant.end(), ',', ';');
        out += std::to_string(t.seed) + "," + mutant + "," + (t.detected ? "1" : "0") + "," +
               (t.detected ? std::to_string(t.transactions_to_detection) : "") + "," +
               (t.detected ? std::to_string(t.first_error_cycle) : "") + "\n";
    }
    return out;
}

double TrialSet::median_transactions() const {
    std::vector<double> values;
    for (const TrialRecord& t : trials)
        values.push_back(t.detected ? static_cast<double>(t.transactions_to_detection)
                                    : static_cast<double>(budget + 1));
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return (values[mid - 1] + values[mid]) / 2.0;
}

TrialSet detection_trials(const Netlist& golden, const TrialOptions& options) {
    if (options.n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");

    // Engine 2 replays one shared test set, generated from the golden
    // circuit once for the whole campaign.
    std::optional<AtpgRun> generated;
    const TestSet* test_set = options.test_set;
    if (options.engine == EngineKind::Atpg && test_set == nullptr) {
        generated = generate_test_set(golden);
        test_set = &generated->set;
    }

    auto run_trial = [&](size_t index) {
        const uint64_t seed = options.base_seed + index;
        MutantSpec spec;
        spec.kind = options.kind;
        spec.seed = seed;
        if (options.kind == MutantKind::StuckAt && options.stuck_polarity) {
            Fault fault = sample_fault(golden, seed);
            fault.stuck_value = *options.stuck_polarity;
            spec.target = fault;
        }
        const MutantResult mutant = make_mutant(golden, spec);

        EngineOptions engine;
        engine.engine = options.engine;
        engine.seed = seed;
        engine.budget = options.budget;
        engine.stop_on_first_error = true;
        engine.track_coverage = false;
        engine.mismatch_log_limit = 1;
        engine.test_set = test_set;
        engine.mutant_description = mutant.description;
        const VerificationReport report = run_engine(mutant.netlist, golden, engine);

        TrialRecord record;
        record.seed = seed;
        record.mutant = mutant.description;
        record.detected = report.detected;
        record.transactions_to_detection = report.detected ? report.first_error_transaction + 1 : 0;
        record.first_error_cycle = report.first_error_cycle;
        record.wall_ms = report.wall_ms;
        return record;
    };

    TrialSet set;
    set.kind = options.kind;
    set.engine = options.engine;
    set.budget = options.budget;
    set.trials.resize(options.n_trials);

    const int jobs = std::max(1, options.jobs);
    if (jobs == 1) {
        for (size_t i = 0; i < options.n_trials; ++i) set.trials[i] = run_trial(i);
    } else {
        std::vector<std::future<void>> workers;
        std::atomic<size_t> next{0};
        for (int w = 0; w < jobs; ++w)
            workers.push_back(std::async(std::launch::async, [&] {
                for (;;) {
                    const size_t i = next.fetch_add(1);
                    if (i >= options.n_trials) return;
                    set.trials[i] = run_trial(i);
                }
            }));
        for (auto& worker : workers) worker.get();
    }
    return set;
}

} // namespace sfqv
