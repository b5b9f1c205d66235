#include "sfqv/faults.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "json.hpp"

#include "sfqv/checkers.hpp"
#include "sfqv/rng.hpp"

namespace sfqv {

ForcedSite Fault::to_forced_site() const {
    if (site.kind == FaultSiteKind::GatePin)
        return {ForcedSite::Kind::Pin, kNoNet, site.gate, site.pin, stuck_value};
    return {ForcedSite::Kind::Net, site.net, 0, 0, stuck_value};
}

std::string Fault::label(const Netlist& net) const {
    std::string s;
    switch (site.kind) {
    case FaultSiteKind::PiNet: s = net.net_name(site.net); break;
    case FaultSiteKind::GateOutput: s = net.net_name(site.net); break;
    case FaultSiteKind::GatePin:
        s = net.net_name(site.net) + "->" + net.net_name(net.gate(site.gate).output) +
            ".pin" + std::to_string(site.pin);
        break;
    }
    return s + (stuck_value ? " SA1" : " SA0");
}

namespace {

// True when the transparent walk from this pin back to its stem crosses a
// net with more than one consumer; the pin is then a line of its own.
bool pin_is_branch_site(const Netlist& net, NetId pin_net) {
    NetId n = pin_net;
    for (;;) {
        if (net.fanout(n) >= 2) return true;
        const Driver d = net.driver(n);
        if (d.kind == Driver::Kind::PrimaryInput) return false;
        const Gate& g = net.gate(d.index);
        if (is_logic(g.kind)) return false;
        n = g.inputs[0];
    }
}

} // namespace

std::vector<Fault> enumerate_faults(const Netlist& net, bool include_transparent) {
    std::vector<Fault> universe;
    auto add_site = [&](const FaultSite& site) {
        universe.push_back({site, 0, -1});
        universe.push_back({site, 1, -1});
    };

    for (NetId pi : net.primary_inputs())
        add_site({FaultSiteKind::PiNet, pi, 0, 0});

    for (GateId id : net.topo_order()) {
        const Gate& g = net.gate(id);
        if (!is_logic(g.kind) && !include_transparent) continue;
        for (int pin = 0; pin < g.n_inputs(); ++pin) {
            const NetId in = g.inputs[static_cast<size_t>(pin)];
            if (pin_is_branch_site(net, in))
                add_site({FaultSiteKind::GatePin, in, id, pin});
        }
        add_site({FaultSiteKind::GateOutput, g.output, id, 0});
    }
    return universe;
}

namespace {

struct UnionFind {
    std::vector<size_t> parent;

    explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    size_t find(size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(size_t a, size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b); // keep earliest as root
    }
};

struct SiteKey {
    FaultSite site;
    bool operator<(const SiteKey& o) const {
        auto tup = [](const FaultSite& s) {
            return std::tuple(static_cast<int>(s.kind), s.net, s.gate, s.pin);
        };
        return tup(site) < tup(o.site);
    }
};

} // namespace

std::vector<Fault> collapse_faults(const Netlist& net, std::vector<Fault>& universe) {
    std::map<SiteKey, size_t> site_index; // site -> index of its SA0 fault
    for (size_t i = 0; i < universe.size(); ++i)
        if (universe[i].stuck_value == 0) site_index.emplace(SiteKey{universe[i].site}, i);

    auto fault_index = [&](const FaultSite& site, uint8_t value) -> std::optional<size_t> {
        auto it = site_index.find(SiteKey{site});
        if (it == site_index.end()) return std::nullopt;
        return it->second + value;
    };

    // Effective site of a gate input pin: the pin itself when it is a
    // branch site, otherwise its transparent stem.
    auto effective_input_site = [&](GateId gate, int pin) -> std::optional<FaultSite> {
        const NetId in = net.gate(gate).inputs[static_cast<size_t>(pin)];
        const FaultSite as_pin{FaultSiteKind::GatePin, in, gate, pin};
        if (site_index.contains(SiteKey{as_pin})) return as_pin;
        NetId n = in;
        for (;;) {
            const Driver d = net.driver(n);
            if (d.kind == Driver::Kind::PrimaryInput) {
                FaultSite s{FaultSiteKind::PiNet, n, 0, 0};
                if (site_index.contains(SiteKey{s})) return s;
                return std::nullopt;
            }
            const Gate& drv = net.gate(d.index);
            const FaultSite s{FaultSiteKind::GateOutput, n, drv.id, 0};
            if (site_index.contains(SiteKey{s})) return s;
            if (is_logic(drv.kind)) return std::nullopt;
            n = drv.inputs[0];
        }
    };

    UnionFind uf(universe.size());
    auto join = [&](const FaultSite& a, uint8_t va, const FaultSite& b, uint8_t vb) {
        const auto ia = fault_index(a, va);
        const auto ib = fault_index(b, vb);
        if (ia && ib) uf.unite(*ia, *ib);
    };

    // A pin site and the site of the fanout-1 net it reads are the same
    // electrical line (arises when transparent sites are enumerated).
    for (GateId id : net.topo_order()) {
        const Gate& g = net.gate(id);
        for (int pin = 0; pin < g.n_inputs(); ++pin) {
            const NetId in = g.inputs[static_cast<size_t>(pin)];
            const FaultSite as_pin{FaultSiteKind::GatePin, in, id, pin};
            if (!site_index.contains(SiteKey{as_pin}) || net.fanout(in) != 1) continue;
            const Driver d = net.driver(in);
            const FaultSite net_site =
                d.kind == Driver::Kind::PrimaryInput
                    ? FaultSite{FaultSiteKind::PiNet, in, 0, 0}
                    : FaultSite{FaultSiteKind::GateOutput, in, d.index, 0};
            join(as_pin, 0, net_site, 0);
            join(as_pin, 1, net_site, 1);
        }
    }

    for (GateId id : net.topo_order()) {
        const Gate& g = net.gate(id);
        const FaultSite out{FaultSiteKind::GateOutput, g.output, id, 0};
        if (!fault_index(out, 0)) continue; // gate's output is not in this universe
        for (int pin = 0; pin < g.n_inputs(); ++pin) {
            const auto in = effective_input_site(id, pin);
            if (!in) continue;
            switch (g.kind) {
            case GateKind::And2: join(*in, 0, out, 0); break;
            case GateKind::Or2: join(*in, 1, out, 1); break;
            case GateKind::Nand2: join(*in, 0, out, 1); break;
            case GateKind::Nor2: join(*in, 1, out, 0); break;
            case GateKind::Inv:
                join(*in, 0, out, 1);
                join(*in, 1, out, 0);
                break;
            case GateKind::Buf:
            case GateKind::Dff:
            case GateKind::Split:
                join(*in, 0, out, 0);
                join(*in, 1, out, 1);
                break;
            case GateKind::Xor2: break; // no structural input/output equivalence
            }
        }
    }

    // Class ids in order of each class's earliest fault.
    std::vector<int32_t> class_of(universe.size(), -1);
    int32_t next_class = 0;
    std::vector<Fault> representatives;
    for (size_t i = 0; i < universe.size(); ++i) {
        const size_t root = uf.find(i);
        if (class_of[root] < 0) {
            class_of[root] = next_class++;
            universe[i].class_id = class_of[root];
            representatives.push_back(universe[i]);
        }
        universe[i].class_id = class_of[root];
    }
    return representatives;
}

Netlist inject_fault(const Netlist& net, const Fault& fault) {
    Netlist faulty = net;
    faulty.add_forced_site(fault.to_forced_site());
    return faulty;
}

Fault sample_fault(const Netlist& net, uint64_t seed) {
    const std::vector<Fault> universe = enumerate_faults(net);
    if (universe.empty()) throw std::runtime_error("netlist has no fault sites");
    Rng rng(seed);
    const size_t site = rng.below(universe.size() / 2);
    const uint8_t value = rng.chance(0.99) ? 0 : 1;
    return universe[2 * site + value];
}

std::string_view mutant_kind_name(MutantKind kind) {
    switch (kind) {
    case MutantKind::StuckAt: return "stuck_at";
    case MutantKind::WrongGate: return "wrong_gate";
    case MutantKind::FanoutBug: return "fanout_bug";
    default: return "unbalance_bug";
    }
}

std::optional<MutantKind> mutant_kind_from_name(std::string_view name) {
    if (name == "stuck_at" || name == "stuck") return MutantKind::StuckAt;
    if (name == "wrong_gate" || name == "wrong-gate") return MutantKind::WrongGate;
    if (name == "fanout_bug" || name == "fanout") return MutantKind::FanoutBug;
    if (name == "unbalance_bug" || name == "unbalance") return MutantKind::UnbalanceBug;
    return std::nullopt;
}

namespace {

// Copy of `src` without one gate; references to `drop_net` are rewired to
// `alias_to` and the dropped net disappears.
Netlist rebuild_excluding(const Netlist& src, GateId skip, NetId drop_net, NetId alias_to) {
    Netlist out;
    std::vector<NetId> old2new(src.n_nets(), kNoNet);
    for (NetId n = 0; n < src.n_nets(); ++n) {
        if (n == drop_net) continue;
        old2new[n] = out.add_net(src.net_name(n));
    }
    auto remap = [&](NetId n) { return old2new[n == drop_net ? alias_to : n]; };
    for (const Gate& g : src.gates()) {
        if (g.id == skip) continue;
        std::vector<NetId> ins;
        for (NetId in : g.input_span()) ins.push_back(remap(in));
        out.add_gate(g.kind, ins, remap(g.output));
    }
    for (NetId pi : src.primary_inputs()) out.mark_input(remap(pi));
    for (NetId po : src.primary_outputs()) out.mark_output(remap(po));
    out.finalize();
    return out;
}

// The replacement kind is the fixed complementary misread of the cell
// (AND<->OR, XOR->AND, INV<->BUF, NAND<->NOR). Every such swap disagrees
// with the original on at least half of the input combinations; swapping
// toward XOR instead can be functionally invisible (an OR whose inputs
// are never both 1 equals XOR), which would make a "wrong gate" bug
// undetectable by construction.
GateKind wrong_kind_for(GateKind kind) {
    switch (kind) {
    case GateKind::And2: return GateKind::Or2;
    case GateKind::Or2: return GateKind::And2;
    case GateKind::Xor2: return GateKind::And2;
    case GateKind::Inv: return GateKind::Buf;
    case GateKind::Buf: return GateKind::Inv;
    case GateKind::Nand2: return GateKind::Nor2;
    case GateKind::Nor2: return GateKind::Nand2;
    default: return kind;
    }
}

MutantResult make_wrong_gate(const Netlist& golden, const MutantSpec& spec, Rng& rng) {
    GateId target;
    if (spec.target_gate) {
        target = *spec.target_gate;
        if (target >= golden.n_gates() || !is_logic(golden.gate(target).kind))
            throw std::runtime_error("wrong_gate mutant: target is not a logic gate");
    } else {
        std::vector<GateId> logic_gates;
        for (const Gate& g : golden.gates())
            if (is_logic(g.kind)) logic_gates.push_back(g.id);
        if (logic_gates.empty())
            throw std::runtime_error("wrong_gate mutant: netlist has no logic gates");
        target = logic_gates[rng.below(logic_gates.size())];
    }
    const GateKind old_kind = golden.gate(target).kind;
    const GateKind new_kind = wrong_kind_for(old_kind);

    MutantResult result;
    result.netlist = golden;
    result.netlist.set_gate_kind(target, new_kind);
    result.netlist.finalize();
    result.description = std::string("wrong_gate: ") + std::string(kind_name(old_kind)) +
                         "->" + std::string(kind_name(new_kind)) + " at '" +
                         golden.net_name(golden.gate(target).output) + "'";
    return result;
}

MutantResult make_fanout_bug(const Netlist& golden, const MutantSpec& spec, Rng& rng) {
    GateId split;
    if (spec.target_gate) {
        split = *spec.target_gate;
        if (split >= golden.n_gates() || golden.gate(split).kind != GateKind::Split ||
            golden.fanout(golden.gate(split).output) != 2)
            throw std::runtime_error("fanout_bug mutant: target is not a fanout-2 splitter");
    } else {
        std::vector<GateId> candidates;
        for (const Gate& g : golden.gates())
            if (g.kind == GateKind::Split && golden.fanout(g.output) == 2)
                candidates.push_back(g.id);
        if (candidates.empty())
            throw std::runtime_error("fanout_bug mutant: no splitter with fanout 2");
        split = candidates[rng.below(candidates.size())];
    }
    const Gate& s = golden.gate(split);
    MutantResult result;
    result.netlist = rebuild_excluding(golden, split, s.output, s.inputs[0]);
    result.description =
        "fanout_bug: removed splitter '" + golden.net_name(s.output) + "', its input '" +
        golden.net_name(s.inputs[0]) + "' now feeds both sinks";
    return result;
}

MutantResult make_unbalance_bug(const Netlist& golden, const MutantSpec& spec, Rng& rng) {
    if (spec.target_gate) {
        const GateId id = *spec.target_gate;
        if (id >= golden.n_gates() || golden.gate(id).kind != GateKind::Dff)
            throw std::runtime_error("unbalance_bug mutant: target is not a DFF");
        const Gate& d = golden.gate(id);
        Netlist candidate = rebuild_excluding(golden, id, d.output, d.inputs[0]);
        if (check_path_balance(candidate).passed())
            throw std::runtime_error("unbalance_bug mutant: removing the target keeps balance");
        MutantResult result;
        result.netlist = std::move(candidate);
        result.description = "unbalance_bug: removed DFF '" + golden.net_name(d.output) + "'";
        return result;
    }

    std::vector<GateId> dffs;
    for (const Gate& g : golden.gates())
        if (g.kind == GateKind::Dff) dffs.push_back(g.id);

    // Removing a DFF shortens exactly the paths through it; probe from a
    // seeded start until the checker actually fails (a removal can keep a
    // degenerate circuit balanced, e.g. a single chain).
    if (!dffs.empty()) {
        const size_t start = rng.below(dffs.size());
        for (size_t i = 0; i < dffs.size(); ++i) {
            const GateId id = dffs[(start + i) % dffs.size()];
            const Gate& d = golden.gate(id);
            Netlist candidate = rebuild_excluding(golden, id, d.output, d.inputs[0]);
            if (!check_path_balance(candidate).passed()) {
                MutantResult result;
                result.netlist = std::move(candidate);
                result.description =
                    "unbalance_bug: removed DFF '" + golden.net_name(d.output) + "'";
                return result;
            }
        }
    }

    // Fall back to adding one DFF in front of a seeded gate pin.
    std::vector<std::pair<GateId, int>> pins;
    for (const Gate& g : golden.gates())
        for (int pin = 0; pin < g.n_inputs(); ++pin) pins.emplace_back(g.id, pin);
    if (!pins.empty()) {
        const size_t start = rng.below(pins.size());
        for (size_t i = 0; i < pins.size(); ++i) {
            const auto [gate, pin] = pins[(start + i) % pins.size()];
            Netlist candidate = golden;
            const NetId in = golden.gate(gate).inputs[static_cast<size_t>(pin)];
            const NetId mid = candidate.add_net(golden.net_name(in) + "_ub");
            candidate.add_gate1(GateKind::Dff, in, mid);
            candidate.rewire_input(gate, pin, mid);
            candidate.finalize();
            if (!check_path_balance(candidate).passed()) {
                MutantResult result;
                result.netlist = std::move(candidate);
                result.description = "unbalance_bug: added DFF before pin " +
                                     std::to_string(pin) + " of '" +
                                     golden.net_name(golden.gate(gate).output) + "'";
                return result;
            }
        }
    }
    throw std::runtime_error("unbalance_bug mutant: no eligible target");
}

} // namespace

MutantResult make_mutant(const Netlist& golden, const MutantSpec& spec) {
    Rng rng(spec.seed);
    switch (spec.kind) {
    case MutantKind::StuckAt: {
        const Fault fault = spec.target ? *spec.target : sample_fault(golden, spec.seed);
        MutantResult result;
        result.netlist = inject_fault(golden, fault);
        result.description = "stuck_at: " + fault.label(golden);
        result.fault = fault;
        return result;
    }
    case MutantKind::WrongGate: return make_wrong_gate(golden, spec, rng);
    case MutantKind::FanoutBug: return make_fanout_bug(golden, spec, rng);
    case MutantKind::UnbalanceBug: return make_unbalance_bug(golden, spec, rng);
    }
    throw std::logic_error("unknown mutant kind");
}

std::string faults_to_csv(const Netlist& net, const std::vector<Fault>& faults) {
    std::string out = "site_kind,net,gate,pin,stuck,class\n";
    for (const Fault& f : faults) {
        switch (f.site.kind) {
        case FaultSiteKind::PiNet: out += "pi_net," + net.net_name(f.site.net) + ",,"; break;
        case FaultSiteKind::GateOutput:
            out += "gate_output," + net.net_name(f.site.net) + "," +
                   net.net_name(net.gate(f.site.gate).output) + ",";
            break;
        case FaultSiteKind::GatePin:
            out += "gate_pin," + net.net_name(f.site.net) + "," +
                   net.net_name(net.gate(f.site.gate).output) + "," +
                   std::to_string(f.site.pin);
            break;
        }
        out += "," + std::to_string(f.stuck_value) + "," +
               (f.class_id >= 0 ? std::to_string(f.class_id) : "") + "\n";
    }
    return out;
}

namespace {

nlohmann::json fault_json(const Netlist& net, const Fault& f) {
    nlohmann::json j;
    switch (f.site.kind) {
    case FaultSiteKind::PiNet: j["site"] = "pi_net"; break;
    case FaultSiteKind::GateOutput: j["site"] = "gate_output"; break;
    case FaultSiteKind::GatePin: j["site"] = "gate_pin"; break;
    }
    j["net"] = net.net_name(f.site.net);
    if (f.site.kind != FaultSiteKind::PiNet)
        j["gate"] = net.net_name(net.gate(f.site.gate).output);
    if (f.site.kind == FaultSiteKind::GatePin) j["pin"] = f.site.pin;
    j["stuck"] = f.stuck_value;
    return j;
}

Fault fault_parse(const Netlist& net, const nlohmann::json& j) {
    Fault f;
    const std::string kind = j.at("site");
    const std::string net_name = j.at("net");
    const auto net_id = net.find_net(net_name);
    if (!net_id) throw std::runtime_error("fault references unknown net '" + net_name + "'");
    f.site.net = *net_id;
    f.stuck_value = j.at("stuck").get<uint8_t>();
    if (kind == "pi_net") {
        f.site.kind = FaultSiteKind::PiNet;
        return f;
    }
    const std::string gate_name = j.at("gate");
    const auto gate_net = net.find_net(gate_name);
    if (!gate_net || net.driver(*gate_net).kind != Driver::Kind::Gate)
        throw std::runtime_error("fault references unknown gate '" + gate_name + "'");
    f.site.gate = net.driver(*gate_net).index;
    if (kind == "gate_output") {
        f.site.kind = FaultSiteKind::GateOutput;
    } else if (kind == "gate_pin") {
        f.site.kind = FaultSiteKind::GatePin;
        f.site.pin = j.at("pin").get<int>();
    } else {
        throw std::runtime_error("unknown fault site kind '" + kind + "'");
    }
    return f;
}

} // namespace

std::string fault_to_json(const Netlist& net, const Fault& fault) {
    return fault_json(net, fault).dump();
}

Fault fault_from_json(const Netlist& net, const std::string& text) {
    return fault_parse(net, nlohmann::json::parse(text));
}

std::string mutant_spec_to_json(const Netlist& net, const MutantSpec& spec) {
    nlohmann::json j;
    j["kind"] = std::string(mutant_kind_name(spec.kind));
    j["seed"] = spec.seed;
    if (spec.target) j["fault"] = fault_json(net, *spec.target);
    if (spec.target_gate) j["gate"] = net.net_name(net.gate(*spec.target_gate).output);
    return j.dump();
}

MutantSpec mutant_spec_from_json(const Netlist& net, const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    MutantSpec spec;
    const auto kind = mutant_kind_from_name(j.at("kind").get<std::string>());
    if (!kind) throw std::runtime_error("unknown mutant kind in spec");
    spec.kind = *kind;
    spec.seed = j.at("seed").get<uint64_t>();
    if (j.contains("fault")) spec.target = fault_parse(net, j.at("fault"));
    if (j.contains("gate")) {
        const std::string name = j.at("gate");
        const auto gate_net = net.find_net(name);
        if (!gate_net || net.driver(*gate_net).kind != Driver::Kind::Gate)
            throw std::runtime_error("mutant spec references unknown gate '" + name + "'");
        spec.target_gate = net.driver(*gate_net).index;
    }
    return spec;
}

} // namespace sfqv
