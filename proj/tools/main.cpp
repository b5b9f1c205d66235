// sfqv: gate-level verification toolkit for single-flux-quantum circuits.
//
// Subcommands wire the flow end to end: bench (generate circuits),
// check (structural checkers), sim (pulse simulation), faults (stuck-at
// universe), atpg (test generation), verify (one engine run), campaign
// (seeded bug-injection trials).
//
// Exit codes: 0 success, 1 usage/internal error, 2 fanout error,
// 3 path-balance error, 4 verification mismatch found.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "sfqv/atpg.hpp"
#include "sfqv/bench_io.hpp"
#include "sfqv/benchgen.hpp"
#include "sfqv/checkers.hpp"
#include "sfqv/faults.hpp"
#include "sfqv/simulator.hpp"
#include "sfqv/verifier.hpp"

namespace fs = std::filesystem;
using namespace sfqv;

namespace {

std::string default_out_dir() {
    if (const char* env = std::getenv("SFQV_OUT_DIR")) return env;
    return ".";
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

Family parse_family(const std::string& name) {
    if (name == "ksa") return Family::Ksa;
    if (name == "arrmult") return Family::ArrMult;
    if (name == "intdiv") return Family::IntDiv;
    if (name == "c17") return Family::C17;
    throw std::runtime_error("unknown family '" + name + "' (ksa|arrmult|intdiv|c17)");
}

// Structural gate shared by sim/atpg/verify: flawed designs are rejected
// before simulation time is spent on them.
int run_checkers_or_fail(const Netlist& net, const std::string& what) {
    const CheckResult result = check_all(net);
    if (!result.passed()) {
        std::cerr << what << " failed structural checks:\n" << result.to_json() << "\n";
        return result.exit_code();
    }
    return 0;
}

std::vector<double> parse_weights(const std::string& csv, size_t n_bits) {
    if (csv.empty()) return {};
    std::vector<double> weights;
    size_t start = 0;
    while (start <= csv.size()) {
        size_t end = csv.find(',', start);
        if (end == std::string::npos) end = csv.size();
        weights.push_back(std::stod(csv.substr(start, end - start)));
        start = end + 1;
    }
    if (weights.size() != n_bits)
        throw std::runtime_error("expected " + std::to_string(n_bits) + " weights, got " +
                                 std::to_string(weights.size()));
    return weights;
}

struct BenchArgs {
    bool suite = false;
    std::string family;
    int width = 4;
    std::string variant = "golden";
    uint64_t seed = 1;
    bool logical = false;
    bool stats = false;
    std::string out;
};

int cmd_bench(const BenchArgs& args) {
    if (args.suite) {
        const std::string dir = args.out.empty() ? default_out_dir() + "/benchmarks" : args.out;
        const SuiteManifest manifest = gen_benchmark_suite(dir);
        std::cout << "wrote " << manifest.entries.size() << " circuits + manifest.json to "
                  << dir << "\n";
        return 0;
    }
    if (args.family.empty()) throw std::runtime_error("bench: need --suite or --family");
    BenchmarkSpec spec;
    spec.family = parse_family(args.family);
    spec.width = args.width;
    spec.seed = args.seed;
    if (args.variant == "golden") spec.variant = Variant::Golden;
    else if (args.variant == "fanout") spec.variant = Variant::Fanout;
    else if (args.variant == "unbalanced") spec.variant = Variant::Unbalanced;
    else throw std::runtime_error("--variant: golden|fanout|unbalanced");

    const Netlist net =
        args.logical ? gen_logical(spec.family, spec.width) : build_benchmark(spec);
    if (args.stats) {
        const NetlistStats s = net.stats();
        nlohmann::json j{{"primary_inputs", s.n_primary_inputs},
                         {"primary_outputs", s.n_primary_outputs},
                         {"dffs", s.n_dffs},
                         {"splitters", s.n_splitters},
                         {"logic_gates", s.n_logic_gates},
                         {"nets", s.n_nets},
                         {"latency", s.latency}};
        std::cout << j.dump() << "\n";
    }
    if (!args.out.empty()) write_bench_file(net, args.out);
    else if (!args.stats) std::cout << write_bench(net);
    return 0;
}

struct CheckArgs {
    std::string file;
    std::string format = "json";
};

int cmd_check(const CheckArgs& args) {
    const Netlist net = parse_bench_file(args.file);
    const CheckResult result = check_all(net);
    if (args.format == "csv") {
        std::cout << "verdict,violations,mcd,work\n"
                  << verdict_name(result.verdict) << "," << result.offending.size() << ","
                  << result.max_circuit_depth << "," << result.work << "\n";
    } else {
        std::cout << result.to_json() << "\n";
    }
    return result.exit_code();
}

struct SimArgs {
    std::string file;
    std::string vectors_file;
    size_t random_count = 0;
    uint64_t seed = 1;
    std::string weights;
    bool flush = true;
    std::string csv_out, vcd_out;
};

int cmd_sim(const SimArgs& args) {
    const Netlist net = parse_bench_file(args.file);
    if (int rc = run_checkers_or_fail(net, args.file)) return rc;

    std::vector<std::vector<uint8_t>> vectors;
    const size_t n_pis = net.primary_inputs().size();
    if (!args.vectors_file.empty()) {
        vectors = parse_vectors_text(slurp(args.vectors_file), n_pis);
    } else {
        RandomVectorSource source(n_pis, args.seed, parse_weights(args.weights, n_pis));
        for (size_t i = 0; i < args.random_count; ++i) vectors.push_back(source.next());
    }

    Simulator sim(net);
    const PulseTrace trace = sim.run(vectors, args.flush);
    std::cout << "simulated " << trace.n_cycles << " cycles (" << vectors.size()
              << " vectors, latency " << sim.latency() << ")\n";
    if (!args.csv_out.empty()) write_file(args.csv_out, trace_to_csv(net, trace));
    if (!args.vcd_out.empty()) write_file(args.vcd_out, trace_to_vcd(net, trace));
    return 0;
}

struct FaultArgs {
    std::string file;
    bool collapsed = false;
    bool include_transparent = false;
    std::string out;
};

int cmd_faults(const FaultArgs& args) {
    const Netlist net = parse_bench_file(args.file);
    auto universe = enumerate_faults(net, args.include_transparent);
    const auto reps = collapse_faults(net, universe);
    const std::string csv = faults_to_csv(net, args.collapsed ? reps : universe);
    if (!args.out.empty()) write_file(args.out, csv);
    else std::cout << csv;
    std::cerr << "faults: " << universe.size() << " uncollapsed, " << reps.size()
              << " collapsed classes\n";
    return 0;
}

struct AtpgArgs {
    std::string file;
    std::string out;
    int backtrack_limit = 1000;
    bool no_compaction = false;
    std::string fill = "zero";
    uint64_t fill_seed = 1;
};

int cmd_atpg(const AtpgArgs& args) {
    const Netlist net = parse_bench_file(args.file);
    if (int rc = run_checkers_or_fail(net, args.file)) return rc;

    AtpgConfig cfg;
    cfg.backtrack_limit = args.backtrack_limit;
    cfg.compaction = !args.no_compaction;
    cfg.fill_seed = args.fill_seed;
    if (args.fill == "zero") cfg.fill = AtpgConfig::Fill::Zero;
    else if (args.fill == "one") cfg.fill = AtpgConfig::Fill::One;
    else if (args.fill == "random") cfg.fill = AtpgConfig::Fill::Random;
    else throw std::runtime_error("--fill: zero|one|random");

    const AtpgRun run = generate_test_set(net, cfg);
    const std::string base =
        args.out.empty() ? default_out_dir() + "/" + fs::path(args.file).stem().string()
                         : args.out;
    write_file(base + ".vec", run.set.vectors_text());
    write_file(base + ".json", run.set.sidecar_json(net, run.representatives));
    std::cout << "classes " << run.set.n_classes << ", vectors " << run.set.vectors.size()
              << ", coverage " << run.set.coverage_pct << "%, redundant "
              << run.set.redundant.size() << ", aborted " << run.set.aborted.size() << "\n";
    return 0;
}

struct VerifyArgs {
    std::string duv_file;
    std::string golden_file;
    std::string engine = "random";
    std::string testset_file;
    uint64_t seed = 1;
    size_t budget = 1000;
    bool stop_on_first_error = false;
    bool force = false;
    std::string weights;
    std::string report_out;
    std::string coverage_out;
};

int cmd_verify(const VerifyArgs& args) {
    const Netlist duv = parse_bench_file(args.duv_file);
    const Netlist golden = args.golden_file.empty() ? duv : parse_bench_file(args.golden_file);

    if (int rc = run_checkers_or_fail(golden, "golden")) return rc;
    if (!args.force) {
        // flawed designs are rejected before verification; --force lets a
        // deliberately broken DUV through for detection experiments
        if (int rc = run_checkers_or_fail(duv, args.duv_file)) return rc;
    }

    EngineOptions options;
    const auto engine = engine_from_name(args.engine);
    if (!engine) throw std::runtime_error("--engine: random|atpg");
    options.engine = *engine;
    options.seed = args.seed;
    options.budget = args.budget;
    options.stop_on_first_error = args.stop_on_first_error;
    options.weights = parse_weights(args.weights, golden.primary_inputs().size());

    TestSet loaded;
    AtpgRun generated;
    if (options.engine == EngineKind::Atpg) {
        if (!args.testset_file.empty()) {
            loaded.vectors =
                parse_vectors_text(slurp(args.testset_file), golden.primary_inputs().size());
            options.test_set = &loaded;
        } else {
            generated = generate_test_set(golden);
            options.test_set = &generated.set;
        }
    }

    const VerificationReport report = run_engine(duv, golden, options);
    const std::string json = report.to_json();
    if (!args.report_out.empty()) write_file(args.report_out, json);
    else std::cout << json << "\n";
    if (!args.coverage_out.empty()) write_file(args.coverage_out, report.coverage_csv());
    return report.detected ? 4 : 0;
}

struct CampaignArgs {
    std::string circuit_file;
    std::string family;
    int width = 16;
    std::string mutant = "stuck";
    std::string engine = "random";
    size_t trials = 30;
    uint64_t seed = 1;
    size_t budget = 10000;
    int jobs = 1;
    std::string out;
};

int cmd_campaign(const CampaignArgs& args) {
    Netlist golden;
    if (!args.circuit_file.empty()) {
        golden = parse_bench_file(args.circuit_file);
    } else if (!args.family.empty()) {
        golden = build_benchmark({parse_family(args.family), args.width, Variant::Golden, 0});
    } else {
        throw std::runtime_error("campaign: need --circuit or --family");
    }
    if (int rc = run_checkers_or_fail(golden, "golden")) return rc;

    TrialOptions options;
    options.n_trials = args.trials;
    options.base_seed = args.seed;
    options.budget = args.budget;
    options.jobs = args.jobs;
    const auto engine = engine_from_name(args.engine);
    if (!engine) throw std::runtime_error("--engine: random|atpg");
    options.engine = *engine;

    if (args.mutant == "sa0") {
        options.kind = MutantKind::StuckAt;
        options.stuck_polarity = 0;
    } else if (args.mutant == "sa1") {
        options.kind = MutantKind::StuckAt;
        options.stuck_polarity = 1;
    } else {
        const auto kind = mutant_kind_from_name(args.mutant);
        if (!kind)
            throw std::runtime_error("--mutant: stuck|sa0|sa1|wrong-gate|fanout|unbalance");
        options.kind = *kind;
    }

    const TrialSet set = detection_trials(golden, options);

    const std::string dir = args.out.empty() ? default_out_dir() + "/campaign" : args.out;
    fs::create_directories(dir);
    write_file(fs::path(dir) / "trials.csv", set.trials_csv());
    write_file(fs::path(dir) / "cdf.csv", set.cdf_csv());
    write_file(fs::path(dir) / "cdf_ms.csv", set.cdf_ms_csv());
    size_t detected = 0;
    for (const TrialRecord& t : set.trials) {
        detected += t.detected;
        nlohmann::json j{{"seed", t.seed},
                         {"mutant", t.mutant},
                         {"detected", t.detected},
                         {"wall_ms", t.wall_ms}};
        if (t.detected) {
            j["transactions_to_detection"] = t.transactions_to_detection;
            j["first_error_cycle"] = t.first_error_cycle;
        }
        write_file(fs::path(dir) / ("trial_" + std::to_string(t.seed) + ".json"),
                   j.dump(2) + "\n");
    }
    std::cout << "campaign: " << detected << "/" << set.trials.size()
              << " mutants detected, median transactions " << set.median_transactions()
              << ", reports in " << dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gate-level SFQ circuit verification toolkit"};
    app.require_subcommand(1);

    BenchArgs bench;
    auto* cmd_b = app.add_subcommand("bench", "generate benchmark circuits");
    cmd_b->add_flag("--suite", bench.suite, "write the full benchmark suite + manifest");
    cmd_b->add_option("--family", bench.family, "ksa|arrmult|intdiv|c17");
    cmd_b->add_option("--width,--n", bench.width, "circuit width");
    cmd_b->add_option("--variant", bench.variant, "golden|fanout|unbalanced");
    cmd_b->add_option("--seed", bench.seed, "mutant selection seed");
    cmd_b->add_flag("--logical", bench.logical, "emit the pre-mapping logical netlist");
    cmd_b->add_flag("--stats", bench.stats, "print netlist statistics as JSON");
    cmd_b->add_option("-o,--out", bench.out, "output file (or directory with --suite)");

    CheckArgs check;
    auto* cmd_c = app.add_subcommand("check", "run the fanout and path-balance checkers");
    cmd_c->add_option("file", check.file, "bench netlist")->required();
    cmd_c->add_option("--format", check.format, "json|csv");

    SimArgs sim;
    auto* cmd_s = app.add_subcommand("sim", "cycle-accurate pulse simulation");
    cmd_s->add_option("file", sim.file, "bench netlist")->required();
    cmd_s->add_option("--vectors", sim.vectors_file, "vector file (one bit string per line)");
    cmd_s->add_option("--random", sim.random_count, "number of seeded random vectors");
    cmd_s->add_option("--seed", sim.seed, "random vector seed");
    cmd_s->add_option("--weights", sim.weights, "comma-separated per-bit 1-probabilities");
    cmd_s->add_flag("--flush,!--no-flush", sim.flush, "drain the pipeline after the last vector");
    cmd_s->add_option("--csv", sim.csv_out, "write the trace as CSV");
    cmd_s->add_option("--vcd", sim.vcd_out, "write the trace as VCD");

    FaultArgs faults;
    auto* cmd_f = app.add_subcommand("faults", "enumerate and collapse stuck-at faults");
    cmd_f->add_option("file", faults.file, "bench netlist")->required();
    cmd_f->add_flag("--collapsed", faults.collapsed, "list class representatives only");
    cmd_f->add_flag("--include-transparent", faults.include_transparent,
                    "also enumerate DFF/splitter sites");
    cmd_f->add_option("-o,--out", faults.out, "CSV output file");

    AtpgArgs atpg;
    auto* cmd_a = app.add_subcommand("atpg", "generate a stuck-at test set");
    cmd_a->add_option("file", atpg.file, "bench netlist")->required();
    cmd_a->add_option("-o,--out", atpg.out, "output base path (.vec and .json)");
    cmd_a->add_option("--backtrack-limit", atpg.backtrack_limit, "PODEM backtrack limit");
    cmd_a->add_flag("--no-compaction", atpg.no_compaction, "skip reverse-order compaction");
    cmd_a->add_option("--fill", atpg.fill, "unassigned PI fill: zero|one|random");
    cmd_a->add_option("--fill-seed", atpg.fill_seed, "seed for --fill random");

    VerifyArgs verify;
    auto* cmd_v = app.add_subcommand("verify", "compare a DUV against a golden reference");
    cmd_v->add_option("duv", verify.duv_file, "device under verification")->required();
    cmd_v->add_option("--golden", verify.golden_file, "golden reference netlist");
    cmd_v->add_option("--engine", verify.engine, "random|atpg");
    cmd_v->add_option("--testset", verify.testset_file, "replay this .vec file (engine atpg)");
    cmd_v->add_option("--seed", verify.seed, "stimulus seed");
    cmd_v->add_option("--budget", verify.budget, "max transactions");
    cmd_v->add_flag("--stop-on-first-error", verify.stop_on_first_error);
    cmd_v->add_flag("--force", verify.force, "verify a DUV even if it fails the checkers");
    cmd_v->add_option("--weights", verify.weights, "per-bit stimulus weights");
    cmd_v->add_option("-o,--report", verify.report_out, "write the JSON report here");
    cmd_v->add_option("--coverage-csv", verify.coverage_out, "write the coverage curve CSV");

    CampaignArgs campaign;
    auto* cmd_k = app.add_subcommand("campaign", "seeded bug-injection detection trials");
    cmd_k->add_option("--circuit", campaign.circuit_file, "golden bench netlist");
    cmd_k->add_option("--family", campaign.family, "generate golden: ksa|arrmult|intdiv|c17");
    cmd_k->add_option("--n,--width", campaign.width, "generated circuit width");
    cmd_k->add_option("--mutant", campaign.mutant, "stuck|sa0|sa1|wrong-gate|fanout|unbalance");
    cmd_k->add_option("--engine", campaign.engine, "random|atpg");
    cmd_k->add_option("--trials", campaign.trials, "number of seeded trials");
    cmd_k->add_option("--seed", campaign.seed, "base seed (trial i uses seed+i)");
    cmd_k->add_option("--budget", campaign.budget, "max transactions per trial");
    cmd_k->add_option("--jobs", campaign.jobs, "parallel trial workers");
    cmd_k->add_option("-o,--out", campaign.out, "output directory");

    try {
        app.parse(argc, argv);
        if (cmd_b->parsed()) return cmd_bench(bench);
        if (cmd_c->parsed()) return cmd_check(check);
        if (cmd_s->parsed()) return cmd_sim(sim);
        if (cmd_f->parsed()) return cmd_faults(faults);
        if (cmd_a->parsed()) return cmd_atpg(atpg);
        if (cmd_v->parsed()) return cmd_verify(verify);
        if (cmd_k->parsed()) return cmd_campaign(campaign);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
