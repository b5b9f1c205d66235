// Gate-level netlist model for single-flux-quantum circuits.
//
// SFQ gate-level rules baked into this model:
//   - every gate except the splitter is clocked (combinational function
//     followed by an output latch),
//   - a splitter has one input and one output net; its output net is the
//     only net kind allowed to feed two sinks,
//   - a net has exactly one driver (a primary input or one gate output),
//   - primary outputs count as one sink of their net.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sfqv {

using NetId  = uint32_t;
using GateId = uint32_t;
inline constexpr NetId kNoNet = static_cast<NetId>(-1);

enum class GateKind : uint8_t { Dff, Split, Inv, And2, Or2, Xor2, Buf, Nand2, Nor2 };

constexpr int arity(GateKind kind) {
    switch (kind) {
    case GateKind::Dff:
    case GateKind::Split:
    case GateKind::Inv:
    case GateKind::Buf: return 1;
    default: return 2;
    }
}

// The splitter is the only unclocked SFQ gate.
constexpr bool is_clocked(GateKind kind) { return kind != GateKind::Split; }

// INV/AND/OR/XOR/BUF (plus NAND/NOR in pre-mapped logical netlists).
// DFFs and splitters are structural, not logic.
constexpr bool is_logic(GateKind kind) {
    return kind != GateKind::Dff && kind != GateKind::Split;
}

std::string_view kind_name(GateKind kind);
std::optional<GateKind> kind_from_name(std::string_view name);

struct Gate {
    GateId id = 0;
    GateKind kind = GateKind::Buf;
    std::array<NetId, 2> inputs{kNoNet, kNoNet};
    NetId output = kNoNet;

    int n_inputs() const { return arity(kind); }
    std::span<const NetId> input_span() const {
        return {inputs.data(), static_cast<size_t>(n_inputs())};
    }
};

// A simulation-time stuck value on a net or on a single gate input pin.
// Used for stuck-at fault injection; it does not alter the structure, so
// an injected netlist still passes the structural checkers.
struct ForcedSite {
    enum class Kind : uint8_t { Net, Pin } kind = Kind::Net;
    NetId net = kNoNet;   // for Kind::Net
    GateId gate = 0;      // for Kind::Pin
    int pin = 0;          // for Kind::Pin
    uint8_t value = 0;
};

struct Driver {
    enum class Kind : uint8_t { None, PrimaryInput, Gate } kind = Kind::None;
    uint32_t index = 0; // PI position or gate id
};

struct NetlistStats {
    size_t n_primary_inputs = 0;
    size_t n_primary_outputs = 0;
    size_t n_dffs = 0;
    size_t n_splitters = 0;
    size_t n_logic_gates = 0; // INV/AND/OR/XOR/BUF (+NAND/NOR pre-mapping)
    size_t n_nets = 0;
    uint32_t latency = 0; // max logic level over PO drivers

    bool operator==(const NetlistStats&) const = default;
};

// Physical pulse parameters. Purely descriptive metadata carried into
// trace headers; logical simulation results do not depend on them.
struct SimConfig {
    double pulse_width_ps = 1.5;    // nominal SFQ pulse duration
    double pulse_amplitude_mv = 3.0;
    // Single flux quantum, h / 2e, in millivolt-picoseconds.
    static constexpr double kFluxQuantumMvPs = 2.07;

    bool in_nominal_range() const {
        return pulse_width_ps >= 1.0 && pulse_width_ps <= 2.0 &&
               pulse_amplitude_mv >= 2.0 && pulse_amplitude_mv <= 4.0;
    }
};

class NetlistError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Netlist {
public:
    Netlist() = default;

    // --- construction -------------------------------------------------
    // Build with add_net/add_gate/mark_input/mark_output, then call
    // finalize(). Mutating methods invalidate derived state (adjacency,
    // topological order) until finalize() is called again.

    NetId add_net(std::string name = {});
    GateId add_gate(GateKind kind, std::span<const NetId> inputs, NetId output);
    GateId add_gate1(GateKind kind, NetId input, NetId output);
    GateId add_gate2(GateKind kind, NetId a, NetId b, NetId output);
    void mark_input(NetId net);
    void mark_output(NetId net);
    void set_output(size_t po_index, NetId net);
    void rewire_input(GateId gate, int pin, NetId net);
    void set_gate_kind(GateId gate, GateKind kind);
    void set_gate_output(GateId gate, NetId net);

    // Validates invariants (arity, single driver, driven POs, acyclicity),
    // builds wire adjacency and the topological order. Throws NetlistError.
    void finalize();
    bool finalized() const { return finalized_; }

    // --- structure ----------------------------------------------------
    size_t n_nets() const { return net_names_.size(); }
    size_t n_gates() const { return gates_.size(); }
    const std::vector<Gate>& gates() const { return gates_; }
    const Gate& gate(GateId id) const { return gates_[id]; }
    const std::vector<NetId>& primary_inputs() const { return pis_; }
    const std::vector<NetId>& primary_outputs() const { return pos_; }
    const std::string& net_name(NetId net) const { return net_names_[net]; }
    std::optional<NetId> find_net(std::string_view name) const;
    bool is_primary_input(NetId net) const;
    bool is_primary_output(NetId net) const { return po_count_of(net) > 0; }

    // Sink gate ids of a net, in pin-connection order (one entry per
    // connected pin). Primary outputs are not gate sinks; fanout() adds
    // them separately.
    const std::vector<GateId>& sinks(NetId net) const { return sinks_[net]; }
    Driver driver(NetId net) const { return drivers_[net]; }
    size_t po_count_of(NetId net) const;
    // Total consumer count: connected gate pins plus PO occurrences.
    size_t fanout(NetId net) const { return sinks_[net].size() + po_count_of(net); }

    // Gate ids in topological order (inputs before outputs).
    const std::vector<GateId>& topo_order() const { return topo_; }

    // --- fault overlay ------------------------------------------------
    const std::vector<ForcedSite>& forced_sites() const { return forced_; }
    void add_forced_site(const ForcedSite& site) { forced_.push_back(site); }
    void clear_forced_sites() { forced_.clear(); }

    NetlistStats stats() const;

private:
    void require_finalized() const;

    std::vector<Gate> gates_;
    std::vector<NetId> pis_, pos_;
    std::vector<std::string> net_names_;
    std::unordered_map<std::string, NetId> name_to_net_;
    std::vector<ForcedSite> forced_;

    // derived by finalize()
    bool finalized_ = false;
    std::vector<std::vector<GateId>> sinks_;
    std::vector<Driver> drivers_;
    std::vector<GateId> topo_;
};

// Logic levels. Level of a clocked gate = 1 + max level over its input
// nets; splitters inherit their driver's level; PI nets are level 0.
struct LevelMap {
    std::vector<uint32_t> gate_level; // by gate id
    uint32_t max_po_level = 0;        // circuit latency in cycles

    uint32_t net_level(const Netlist& net, NetId n) const;
};

LevelMap compute_levels(const Netlist& net);

// Circuit latency in clock cycles (= max logic level over PO drivers).
uint32_t latency(const Netlist& net);

// Splitter-tree insertion: after the pass every PI net and every
// non-splitter gate output net feeds exactly one sink, and every
// splitter output net feeds one or two. A former fanout-k net (k >= 2)
// gains exactly k-1 splitters arranged as a balanced binary tree built
// left-to-right over the sink list in connection order (gate pins first,
// then the PO slot).
struct SplitterInsertion {
    Netlist netlist;
    size_t splitters_added = 0;
    std::vector<NetId> dangling; // fanout-0 nets, reported not repaired
};

SplitterInsertion insert_splitter_trees(const Netlist& net);

} // namespace sfqv
