#include "sfqv/netlist.hpp"

#include <algorithm>
#include <cassert>
#include <queue>

namespace sfqv {

namespace {

struct KindName {
    GateKind kind;
    std::string_view name;
};

constexpr KindName kKindNames[] = {
    {GateKind::Dff, "DFF"},   {GateKind::Split, "SPLIT"}, {GateKind::Inv, "INV"},
    {GateKind::And2, "AND"},  {GateKind::Or2, "OR"},      {GateKind::Xor2, "XOR"},
    {GateKind::Buf, "BUF"},   {GateKind::Nand2, "NAND"},  {GateKind::Nor2, "NOR"},
};

std::string upper(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    return out;
}

} // namespace

std::string_view kind_name(GateKind kind) {
    for (const auto& [k, n] : kKindNames)
        if (k == kind) return n;
    return "?";
}

std::optional<GateKind> kind_from_name(std::string_view name) {
    std::string u = upper(name);
    // "AND2" style aliases and NOT are accepted on input.
    if (!u.empty() && u.back() == '2') u.pop_back();
    if (u == "NOT") u = "INV";
    for (const auto& [k, n] : kKindNames)
        if (n == u) return k;
    return std::nullopt;
}

NetId Netlist::add_net(std::string name) {
    const NetId id = static_cast<NetId>(net_names_.size());
    if (name.empty()) name = "n" + std::to_string(id);
    while (name_to_net_.contains(name)) name += "_";
    name_to_net_.emplace(name, id);
    net_names_.push_back(std::move(name));
    finalized_ = false;
    return id;
}

GateId Netlist::add_gate(GateKind kind, std::span<const NetId> inputs, NetId output) {
    if (static_cast<int>(inputs.size()) != arity(kind))
        throw NetlistError("gate arity mismatch for kind " + std::string(kind_name(kind)));
    Gate g;
    g.id = static_cast<GateId>(gates_.size());
    g.kind = kind;
    for (size_t i = 0; i < inputs.size(); ++i) g.inputs[i] = inputs[i];
    g.output = output;
    gates_.push_back(g);
    finalized_ = false;
    return g.id;
}

GateId Netlist::add_gate1(GateKind kind, NetId input, NetId output) {
    const NetId in[1] = {input};
    return add_gate(kind, in, output);
}

GateId Netlist::add_gate2(GateKind kind, NetId a, NetId b, NetId output) {
    const NetId in[2] = {a, b};
    return add_gate(kind, in, output);
}

void Netlist::mark_input(NetId net) {
    pis_.push_back(net);
    finalized_ = false;
}

void Netlist::mark_output(NetId net) {
    pos_.push_back(net);
    finalized_ = false;
}

void Netlist::set_output(size_t po_index, NetId net) {
    pos_.at(po_index) = net;
    finalized_ = false;
}

void Netlist::rewire_input(GateId gate, int pin, NetId net) {
    gates_.at(gate).inputs.at(static_cast<size_t>(pin)) = net;
    finalized_ = false;
}

void Netlist::set_gate_kind(GateId gate, GateKind kind) {
    if (arity(kind) != gates_.at(gate).n_inputs())
        throw NetlistError("set_gate_kind would change arity");
    gates_[gate].kind = kind;
    finalized_ = false;
}

void Netlist::set_gate_output(GateId gate, NetId net) {
    gates_.at(gate).output = net;
    finalized_ = false;
}

std::optional<NetId> Netlist::find_net(std::string_view name) const {
    auto it = name_to_net_.find(std::string(name));
    if (it == name_to_net_.end()) return std::nullopt;
    return it->second;
}

bool Netlist::is_primary_input(NetId net) const {
    return drivers_[net].kind == Driver::Kind::PrimaryInput;
}

size_t Netlist::po_count_of(NetId net) const {
    size_t count = 0;
    for (NetId po : pos_)
        if (po == net) ++count;
    return count;
}

void Netlist::require_finalized() const {
    if (!finalized_) throw NetlistError("netlist not finalized");
}

void Netlist::finalize() {
    const size_t n = net_names_.size();
    sinks_.assign(n, {});
    drivers_.assign(n, Driver{});

    auto check_net = [&](NetId id, const char* what) {
        if (id >= n)
            throw NetlistError(std::string("invalid net reference in ") + what);
    };

    for (size_t i = 0; i < pis_.size(); ++i) {
        const NetId net = pis_[i];
        check_net(net, "primary input list");
        if (drivers_[net].kind != Driver::Kind::None)
            throw NetlistError("net '" + net_names_[net] + "' declared as input more than once");
        drivers_[net] = {Driver::Kind::PrimaryInput, static_cast<uint32_t>(i)};
    }
    for (const Gate& g : gates_) {
        check_net(g.output, "gate output");
        if (drivers_[g.output].kind != Driver::Kind::None)
            throw NetlistError("net '" + net_names_[g.output] + "' has more than one driver");
        drivers_[g.output] = {Driver::Kind::Gate, g.id};
        for (NetId in : g.input_span()) check_net(in, "gate input");
    }
    for (const Gate& g : gates_)
        for (NetId in : g.input_span()) {
            if (drivers_[in].kind == Driver::Kind::None)
                throw NetlistError("net '" + net_names_[in] + "' is used but never driven");
            sinks_[in].push_back(g.id);
        }
    for (NetId po : pos_) {
        check_net(po, "primary output list");
        if (drivers_[po].kind == Driver::Kind::None)
            throw NetlistError("primary output '" + net_names_[po] + "' is not driven");
    }
    for (NetId net = 0; net < n; ++net)
        if (drivers_[net].kind == Driver::Kind::None && !sinks_[net].empty())
            throw NetlistError("net '" + net_names_[net] + "' is used but never driven");

    // Kahn's algorithm; ties broken by ascending gate id so the order is
    // deterministic regardless of construction history.
    std::vector<uint32_t> indegree(gates_.size(), 0);
    for (const Gate& g : gates_)
        for (NetId in : g.input_span())
            if (drivers_[in].kind == Driver::Kind::Gate) ++indegree[g.id];
    std::priority_queue<GateId, std::vector<GateId>, std::greater<>> ready;
    for (const Gate& g : gates_)
        if (indegree[g.id] == 0) ready.push(g.id);
    topo_.clear();
    topo_.reserve(gates_.size());
    while (!ready.empty()) {
        const GateId id = ready.top();
        ready.pop();
        topo_.push_back(id);
        for (GateId sink : sinks_[gates_[id].output])
            if (--indegree[sink] == 0) ready.push(sink);
    }
    if (topo_.size() != gates_.size()) {
        std::string members;
        for (const Gate& g : gates_)
            if (indegree[g.id] > 0) {
                if (!members.empty()) members += ", ";
                members += net_names_[g.output];
                if (members.size() > 120) break;
            }
        throw NetlistError("combinational cycle through: " + members);
    }
    finalized_ = true;
}

uint32_t LevelMap::net_level(const Netlist& net, NetId n) const {
    const Driver d = net.driver(n);
    if (d.kind == Driver::Kind::PrimaryInput) return 0;
    return gate_level[d.index];
}

LevelMap compute_levels(const Netlist& net) {
    if (!net.finalized()) throw NetlistError("compute_levels on unfinalized netlist");
    LevelMap levels;
    levels.gate_level.assign(net.n_gates(), 0);
    for (GateId id : net.topo_order()) {
        const Gate& g = net.gate(id);
        uint32_t in_max = 0;
        for (NetId in : g.input_span())
            in_max = std::max(in_max, levels.net_level(net, in));
        // Splitters are level-transparent.
        levels.gate_level[id] = is_clocked(g.kind) ? in_max + 1 : in_max;
    }
    for (NetId po : net.primary_outputs())
        levels.max_po_level = std::max(levels.max_po_level, levels.net_level(net, po));
    return levels;
}

uint32_t latency(const Netlist& net) { return compute_levels(net).max_po_level; }

NetlistStats Netlist::stats() const {
    require_finalized();
    NetlistStats s;
    s.n_primary_inputs = pis_.size();
    s.n_primary_outputs = pos_.size();
    s.n_nets = net_names_.size();
    for (const Gate& g : gates_) {
        if (g.kind == GateKind::Dff) ++s.n_dffs;
        else if (g.kind == GateKind::Split) ++s.n_splitters;
        else ++s.n_logic_gates;
    }
    s.latency = latency(*this);
    return s;
}

namespace {

// One consumer slot of a net: either a gate input pin or a PO position.
struct Consumer {
    bool is_po = false;
    GateId gate = 0;
    int pin = 0;
    size_t po_index = 0;
};

NetId fresh_net(Netlist& nl, const std::string& base, size_t& counter) {
    for (;;) {
        std::string candidate = base + "_b" + std::to_string(counter++);
        if (!nl.find_net(candidate)) return nl.add_net(std::move(candidate));
    }
}

void attach(Netlist& nl, const Consumer& c, NetId net) {
    if (c.is_po) nl.set_output(c.po_index, net);
    else nl.rewire_input(c.gate, c.pin, net);
}

// Builds the splitter tree feeding `consumers` from `src` (which accepts
// exactly one more sink). `reserved` is the original net id kept for the
// PO slot so OUTPUT names survive the pass; it is claimed by the splitter
// whose output directly feeds that slot.
void fan_out(Netlist& nl, NetId src, std::span<const Consumer> consumers,
             std::optional<NetId>& reserved, const std::string& base, size_t& counter) {
    assert(consumers.size() >= 2);
    const size_t half = (consumers.size() + 1) / 2;
    const auto left = consumers.subspan(0, half);
    const auto right = consumers.subspan(half);

    bool direct_po = false;
    for (const auto& side : {left, right})
        if (side.size() == 1 && side[0].is_po) direct_po = true;

    NetId out;
    if (direct_po && reserved) {
        out = *reserved;
        reserved.reset();
    } else {
        out = fresh_net(nl, base, counter);
    }
    nl.add_gate1(GateKind::Split, src, out);

    for (const auto& side : {left, right}) {
        if (side.size() == 1) attach(nl, side[0], out);
        else fan_out(nl, out, side, reserved, base, counter);
    }
}

} // namespace

SplitterInsertion insert_splitter_trees(const Netlist& input) {
    if (!input.finalized()) throw NetlistError("insert_splitter_trees on unfinalized netlist");

    SplitterInsertion result;
    result.netlist = input;
    Netlist& nl = result.netlist;

    // Snapshot work items before mutating: the consumer lists of every
    // multi-fanout net, in net id order.
    // One consumer entry per connected pin (a gate reading the same net
    // on both pins contributes two), then the PO slots.
    std::vector<std::vector<Consumer>> consumers_of(input.n_nets());
    for (const Gate& g : input.gates())
        for (int pin = 0; pin < g.n_inputs(); ++pin)
            consumers_of[g.inputs[static_cast<size_t>(pin)]].push_back({false, g.id, pin, 0});
    for (size_t i = 0; i < input.primary_outputs().size(); ++i)
        consumers_of[input.primary_outputs()[i]].push_back({true, 0, 0, i});

    struct Item {
        NetId net;
        std::vector<Consumer> consumers;
    };
    std::vector<Item> items;
    for (NetId net = 0; net < input.n_nets(); ++net) {
        const size_t k = consumers_of[net].size();
        if (k == 0 && input.driver(net).kind != Driver::Kind::None) {
            result.dangling.push_back(net);
            continue;
        }
        if (k < 2) continue;
        // a splitter output legitimately feeds two sinks already
        const Driver drv = input.driver(net);
        if (k == 2 && drv.kind == Driver::Kind::Gate &&
            input.gate(drv.index).kind == GateKind::Split)
            continue;
        items.push_back({net, std::move(consumers_of[net])});
    }

    for (const Item& item : items) {
        const std::string base = input.net_name(item.net);
        size_t counter = 0;
        const Driver drv = input.driver(item.net);

        // If a gate-driven net is itself a PO, keep its id/name on the PO
        // leaf and move the driver to a fresh net. PIs always keep theirs.
        std::optional<NetId> reserved;
        NetId src = item.net;
        if (drv.kind == Driver::Kind::Gate && input.is_primary_output(item.net)) {
            src = fresh_net(nl, base, counter);
            nl.set_gate_output(drv.index, src);
            reserved = item.net;
        }
        fan_out(nl, src, item.consumers, reserved, base, counter);
        result.splitters_added += item.consumers.size() - 1;
    }

    nl.finalize();
    return result;
}

} // namespace sfqv
