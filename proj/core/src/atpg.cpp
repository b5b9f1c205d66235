#include "sfqv/atpg.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

#include "json.hpp"

namespace sfqv {

size_t TestSet::n_detected() const {
    size_t n = 0;
    for (int32_t d : detects)
        if (d >= 0) ++n;
    return n;
}

std::string TestSet::vectors_text() const {
    std::string out;
    for (const auto& v : vectors) {
        for (uint8_t bit : v) out += bit ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::string TestSet::sidecar_json(const Netlist& net, const std::vector<Fault>& reps) const {
    nlohmann::json j;
    j["n_vectors"] = vectors.size();
    j["n_classes"] = n_classes;
    j["coverage_pct"] = coverage_pct;
    nlohmann::json classes = nlohmann::json::array();
    for (size_t c = 0; c < n_classes; ++c) {
        nlohmann::json entry;
        entry["class"] = c;
        if (c < reps.size()) entry["site"] = reps[c].label(net);
        entry["first_vector"] = detects[c];
        classes.push_back(entry);
    }
    j["detects"] = classes;
    j["redundant"] = redundant;
    j["aborted"] = aborted;
    return j.dump(2);
}

std::vector<std::vector<uint8_t>> parse_vectors_text(const std::string& text, size_t n_bits) {
    std::vector<std::vector<uint8_t>> vectors;
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (line.size() != n_bits)
            throw std::runtime_error("vector line " + std::to_string(line_no) + " has " +
                                     std::to_string(line.size()) + " bits, expected " +
                                     std::to_string(n_bits));
        std::vector<uint8_t> v(n_bits);
        for (size_t i = 0; i < n_bits; ++i) {
            if (line[i] != '0' && line[i] != '1')
                throw std::runtime_error("vector line " + std::to_string(line_no) +
                                         ": invalid character '" + line[i] + "'");
            v[i] = line[i] == '1';
        }
        vectors.push_back(std::move(v));
    }
    return vectors;
}

int32_t DetectionMatrix::first_detection(size_t fault) const {
    for (size_t v = 0; v < n_vectors; ++v)
        if (detected(fault, v)) return static_cast<int32_t>(v);
    return -1;
}

DetectionMatrix fault_simulate(const CombEval& eval,
                               const std::vector<std::vector<uint8_t>>& vectors,
                               const std::vector<Fault>& faults) {
    DetectionMatrix m;
    m.n_faults = faults.size();
    m.n_vectors = vectors.size();
    m.bits.assign(m.n_faults * m.n_vectors, 0);
    for (size_t v = 0; v < vectors.size(); ++v) {
        const std::vector<uint8_t> golden = eval.eval(vectors[v]);
        for (size_t f = 0; f < faults.size(); ++f)
            if (eval.eval_with(vectors[v], faults[f].to_forced_site()) != golden)
                m.bits[f * m.n_vectors + v] = 1;
    }
    return m;
}

DetectionMatrix fault_simulate(const Netlist& net,
                               const std::vector<std::vector<uint8_t>>& vectors,
                               const std::vector<Fault>& faults) {
    return fault_simulate(CombEval(net), vectors, faults);
}

// ---------------------------------------------------------------------
// PODEM

namespace {

// five-valued logic: 0, 1, X, D (good 1 / faulty 0), DB (good 0 / faulty 1)
enum V5 : uint8_t { V0 = 0, V1 = 1, VX = 2, VD = 3, VDB = 4 };

constexpr uint8_t kGood[5] = {0, 1, 2, 1, 0};
constexpr uint8_t kFaulty[5] = {0, 1, 2, 0, 1};

V5 combine(uint8_t good, uint8_t faulty) {
    if (good == faulty) return static_cast<V5>(good);
    if (good == 2 || faulty == 2) return VX; // partially determined -> X
    return good == 1 ? VD : VDB;
}

uint8_t and3(uint8_t a, uint8_t b) {
    if (a == 0 || b == 0) return 0;
    if (a == 2 || b == 2) return 2;
    return 1;
}
uint8_t or3(uint8_t a, uint8_t b) {
    if (a == 1 || b == 1) return 1;
    if (a == 2 || b == 2) return 2;
    return 0;
}
uint8_t xor3(uint8_t a, uint8_t b) {
    if (a == 2 || b == 2) return 2;
    return a ^ b;
}
uint8_t not3(uint8_t a) { return a == 2 ? 2 : !a; }

uint8_t eval3(GateKind kind, uint8_t a, uint8_t b) {
    switch (kind) {
    case GateKind::And2: return and3(a, b);
    case GateKind::Or2: return or3(a, b);
    case GateKind::Xor2: return xor3(a, b);
    case GateKind::Nand2: return not3(and3(a, b));
    case GateKind::Nor2: return not3(or3(a, b));
    case GateKind::Inv: return not3(a);
    default: return a; // Buf
    }
}

V5 eval5(GateKind kind, V5 a, V5 b) {
    return combine(eval3(kind, kGood[a], kGood[b]), eval3(kind, kFaulty[a], kFaulty[b]));
}

struct Podem {
    using Source = CombEval::Source;

    const CombEval& eval;
    const AtpgConfig& cfg;

    // fault location in the skeleton
    bool pin_fault = false;
    Source stem{};             // stem faults: the faulty line's source
    uint32_t fault_node = 0;   // pin faults
    int fault_pin = 0;
    uint8_t stuck = 0;

    std::vector<V5> pi_val;
    std::vector<V5> node_val;
    std::vector<std::vector<uint32_t>> node_sinks;
    std::vector<uint8_t> node_feeds_po;
    std::vector<uint8_t> x_reach; // scratch: X-path reachability to a PO

    Podem(const CombEval& e, const Fault& fault, const AtpgConfig& c) : eval(e), cfg(c) {
        stuck = fault.stuck_value;
        switch (fault.site.kind) {
        case FaultSiteKind::PiNet:
            stem = eval.source_of_net(fault.site.net);
            break;
        case FaultSiteKind::GateOutput:
            stem = eval.source_of_net(fault.site.net);
            break;
        case FaultSiteKind::GatePin: {
            const int node = eval.node_of_gate(fault.site.gate);
            if (node < 0) {
                // transparent pin: the fault rides on the stem
                stem = eval.source_of_net(fault.site.net);
            } else {
                pin_fault = true;
                fault_node = static_cast<uint32_t>(node);
                fault_pin = fault.site.pin;
            }
            break;
        }
        }

        pi_val.assign(eval.n_pis(), VX);
        node_val.assign(eval.nodes().size(), VX);
        node_sinks.assign(eval.nodes().size(), {});
        node_feeds_po.assign(eval.nodes().size(), 0);
        for (size_t i = 0; i < eval.nodes().size(); ++i)
            for (int k = 0; k < eval.nodes()[i].n_inputs; ++k) {
                const Source s = eval.nodes()[i].src[k];
                if (s.kind == Source::Kind::Node)
                    node_sinks[s.index].push_back(static_cast<uint32_t>(i));
            }
        for (const Source& s : eval.po_sources())
            if (s.kind == Source::Kind::Node) node_feeds_po[s.index] = 1;
        x_reach.assign(eval.nodes().size(), 0);
    }

    V5 transform(V5 raw) const { return combine(kGood[raw], stuck); }

    bool is_stem(Source s) const {
        return !pin_fault && s.kind == stem.kind && s.index == stem.index;
    }

    V5 read_source(Source s) const {
        const V5 raw = s.kind == Source::Kind::Pi ? pi_val[s.index] : node_val[s.index];
        return is_stem(s) ? transform(raw) : raw;
    }

    V5 read_pin(uint32_t node, int pin) const {
        V5 v = read_source(eval.nodes()[node].src[static_cast<size_t>(pin)]);
        if (pin_fault && node == fault_node && pin == fault_pin) v = transform(v);
        return v;
    }

    void simulate() {
        const auto& nodes = eval.nodes();
        for (size_t i = 0; i < nodes.size(); ++i) {
            const V5 a = read_pin(static_cast<uint32_t>(i), 0);
            const V5 b = nodes[i].n_inputs == 2 ? read_pin(static_cast<uint32_t>(i), 1) : V0;
            node_val[i] = eval5(nodes[i].kind, a, b);
        }
    }

    bool error_at_po() const {
        for (const Source& s : eval.po_sources()) {
            const V5 v = read_source(s);
            if (v == VD || v == VDB) return true;
        }
        return false;
    }

    // good value of the faulty line before the fault transform
    uint8_t site_good() const {
        if (pin_fault)
            return kGood[read_source(eval.nodes()[fault_node].src[static_cast<size_t>(fault_pin)])];
        const V5 raw = stem.kind == Source::Kind::Pi ? pi_val[stem.index] : node_val[stem.index];
        return kGood[raw];
    }

    int first_frontier() const {
        const auto& nodes = eval.nodes();
        for (size_t i = 0; i < nodes.size(); ++i) {
            if (node_val[i] != VX) continue;
            for (int k = 0; k < nodes[i].n_inputs; ++k) {
                const V5 v = read_pin(static_cast<uint32_t>(i), k);
                if (v == VD || v == VDB) return static_cast<int>(i);
            }
        }
        return -1;
    }

    // An X-path must exist from some D-frontier gate to a PO through
    // X-valued nodes, otherwise the error can no longer reach an output.
    bool x_path_ok() {
        const auto& nodes = eval.nodes();
        for (size_t ri = nodes.size(); ri-- > 0;) {
            uint8_t reach = 0;
            if (node_val[ri] == VX) {
                if (node_feeds_po[ri]) reach = 1;
                else
                    for (uint32_t s : node_sinks[ri])
                        if (x_reach[s]) {
                            reach = 1;
                            break;
                        }
            }
            x_reach[ri] = reach;
        }
        for (size_t i = 0; i < nodes.size(); ++i) {
            if (node_val[i] != VX || !x_reach[i]) continue;
            for (int k = 0; k < nodes[i].n_inputs; ++k) {
                const V5 v = read_pin(static_cast<uint32_t>(i), k);
                if (v == VD || v == VDB) return true;
            }
        }
        return false;
    }

    static uint8_t non_controlling(GateKind kind) {
        switch (kind) {
        case GateKind::And2:
        case GateKind::Nand2: return 1;
        case GateKind::Or2:
        case GateKind::Nor2: return 0;
        default: return 0; // XOR propagates with either value
        }
    }

    static bool inverts(GateKind kind) {
        return kind == GateKind::Inv || kind == GateKind::Nand2 || kind == GateKind::Nor2;
    }

    // walk an objective back to an unassigned PI through X-valued lines
    std::pair<uint32_t, uint8_t> backtrace(Source line, uint8_t value) const {
        while (line.kind == Source::Kind::Node) {
            const auto& node = eval.nodes()[line.index];
            if (inverts(node.kind)) value = !value;
            int chosen = -1;
            for (int k = 0; k < node.n_inputs; ++k)
                if (read_source(node.src[static_cast<size_t>(k)]) == VX) {
                    chosen = k;
                    break;
                }
            assert(chosen >= 0);
            line = node.src[static_cast<size_t>(chosen)];
        }
        return {line.index, value};
    }
};

} // namespace

TestGenResult generate_test(const CombEval& eval, const Fault& fault, const AtpgConfig& cfg) {
    Podem podem(eval, fault, cfg);
    TestGenResult result;

    struct Decision {
        uint32_t pi;
        uint8_t value;
        bool flipped;
    };
    std::vector<Decision> stack;

    for (;;) {
        podem.simulate();

        bool need_backtrack = false;
        std::optional<std::pair<CombEval::Source, uint8_t>> objective;

        if (podem.error_at_po()) {
            // success: fill the unassigned PIs and validate
            std::vector<uint8_t> vector(eval.n_pis(), 0);
            Rng fill_rng(cfg.fill_seed);
            for (size_t i = 0; i < vector.size(); ++i) {
                const V5 v = podem.pi_val[i];
                if (v == V0 || v == V1) vector[i] = static_cast<uint8_t>(v);
                else if (cfg.fill == AtpgConfig::Fill::One) vector[i] = 1;
                else if (cfg.fill == AtpgConfig::Fill::Random) vector[i] = fill_rng.next_bit();
            }
            if (eval.eval_with(vector, fault.to_forced_site()) == eval.eval(vector))
                throw std::logic_error("PODEM produced a non-detecting vector");
            result.outcome = TestGenOutcome::Found;
            result.vector = std::move(vector);
            return result;
        }

        const uint8_t sg = podem.site_good();
        if (sg == podem.stuck) {
            need_backtrack = true; // fault can no longer be excited
        } else if (sg == 2) {
            // activation objective: drive the faulty line to the opposite value
            CombEval::Source line =
                podem.pin_fault
                    ? eval.nodes()[podem.fault_node].src[static_cast<size_t>(podem.fault_pin)]
                    : podem.stem;
            objective = {line, static_cast<uint8_t>(!podem.stuck)};
        } else {
            const int frontier = podem.first_frontier();
            if (frontier < 0 || !podem.x_path_ok()) {
                need_backtrack = true;
            } else {
                const auto& node = eval.nodes()[static_cast<size_t>(frontier)];
                for (int k = 0; k < node.n_inputs; ++k)
                    if (podem.read_pin(static_cast<uint32_t>(frontier), k) == VX) {
                        objective = {node.src[static_cast<size_t>(k)],
                                     Podem::non_controlling(node.kind)};
                        break;
                    }
                if (!objective) need_backtrack = true; // frontier gate with no free input
            }
        }

        if (!need_backtrack) {
            const auto [pi, value] = podem.backtrace(objective->first, objective->second);
            podem.pi_val[pi] = value ? V1 : V0;
            stack.push_back({pi, value, false});
            continue;
        }

        // backtrack: flip the most recent untried decision
        for (;;) {
            if (stack.empty()) {
                result.outcome = TestGenOutcome::Redundant;
                return result;
            }
            Decision& top = stack.back();
            if (!top.flipped) {
                top.flipped = true;
                top.value = !top.value;
                podem.pi_val[top.pi] = top.value ? V1 : V0;
                ++result.backtracks;
                if (result.backtracks > cfg.backtrack_limit) {
                    result.outcome = TestGenOutcome::Aborted;
                    return result;
                }
                break;
            }
            podem.pi_val[top.pi] = VX;
            stack.pop_back();
        }
    }
}

AtpgRun generate_test_set(const Netlist& net, const AtpgConfig& cfg) {
    AtpgRun run;
    run.universe = enumerate_faults(net);
    run.representatives = collapse_faults(net, run.universe);
    const CombEval eval(net);

    const size_t n_classes = run.representatives.size();
    TestSet& set = run.set;
    set.n_classes = n_classes;
    set.detects.assign(n_classes, -1);

    std::vector<uint8_t> is_redundant(n_classes, 0), is_aborted(n_classes, 0);

    for (size_t c = 0; c < n_classes; ++c) {
        if (set.detects[c] >= 0) continue; // dropped by an earlier vector
        const TestGenResult gen = generate_test(eval, run.representatives[c], cfg);
        if (gen.outcome == TestGenOutcome::Redundant) {
            is_redundant[c] = 1;
            continue;
        }
        if (gen.outcome == TestGenOutcome::Aborted) {
            is_aborted[c] = 1;
            continue;
        }
        const auto index = static_cast<int32_t>(set.vectors.size());
        const std::vector<uint8_t> golden = eval.eval(gen.vector);
        for (size_t c2 = 0; c2 < n_classes; ++c2) {
            if (set.detects[c2] >= 0 || is_redundant[c2]) continue;
            if (eval.eval_with(gen.vector, run.representatives[c2].to_forced_site()) != golden) {
                set.detects[c2] = index;
                is_aborted[c2] = 0; // fortuitous detection of an aborted fault
            }
        }
        set.vectors.push_back(gen.vector);
        assert(set.detects[c] == index);
    }

    if (cfg.compaction && !set.vectors.empty()) {
        // reverse-order dropping over the full detection matrix
        std::vector<Fault> live;
        std::vector<size_t> live_class;
        for (size_t c = 0; c < n_classes; ++c)
            if (!is_redundant[c]) {
                live.push_back(run.representatives[c]);
                live_class.push_back(c);
            }
        const DetectionMatrix matrix = fault_simulate(eval, set.vectors, live);
        std::vector<uint32_t> count(live.size(), 0);
        for (size_t f = 0; f < live.size(); ++f)
            for (size_t v = 0; v < set.vectors.size(); ++v)
                if (matrix.detected(f, v)) ++count[f];

        std::vector<uint8_t> keep(set.vectors.size(), 1);
        for (size_t v = set.vectors.size(); v-- > 0;) {
            bool removable = true;
            for (size_t f = 0; f < live.size(); ++f)
                if (matrix.detected(f, v) && count[f] <= 1) {
                    removable = false;
                    break;
                }
            if (!removable) continue;
            keep[v] = 0;
            for (size_t f = 0; f < live.size(); ++f)
                if (matrix.detected(f, v)) --count[f];
        }

        std::vector<std::vector<uint8_t>> kept;
        std::fill(set.detects.begin(), set.detects.end(), -1);
        for (size_t v = 0; v < set.vectors.size(); ++v) {
            if (!keep[v]) continue;
            const auto new_index = static_cast<int32_t>(kept.size());
            for (size_t f = 0; f < live.size(); ++f)
                if (matrix.detected(f, v) && set.detects[live_class[f]] < 0)
                    set.detects[live_class[f]] = new_index;
            kept.push_back(set.vectors[v]);
        }
        set.vectors = std::move(kept);
    }

    size_t detected = 0;
    for (size_t c = 0; c < n_classes; ++c) {
        if (is_redundant[c]) set.redundant.push_back(static_cast<int32_t>(c));
        else if (set.detects[c] < 0 && is_aborted[c])
            set.aborted.push_back(static_cast<int32_t>(c));
        if (set.detects[c] >= 0) ++detected;
    }
    const size_t denominator = n_classes - set.redundant.size();
    set.coverage_pct =
        denominator == 0 ? 100.0 : 100.0 * static_cast<double>(detected) / static_cast<double>(denominator);
    return run;
}

RandomVectorSource::RandomVectorSource(size_t n_bits, uint64_t seed, std::vector<double> weights)
    : n_bits_(n_bits), rng_(seed), weights_(std::move(weights)) {
    if (n_bits_ == 0) throw std::invalid_argument("vector width must be >= 1");
    if (!weights_.empty() && weights_.size() != n_bits_)
        throw std::invalid_argument("weight count must match vector width");
}

std::vector<uint8_t> RandomVectorSource::next() {
    std::vector<uint8_t> v(n_bits_);
    for (size_t i = 0; i < n_bits_; ++i) {
        const double w = weights_.empty() ? 0.5 : weights_[i];
        v[i] = rng_.next_double() < w;
    }
    return v;
}

} // namespace sfqv
