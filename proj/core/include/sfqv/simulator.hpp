// Cycle-accurate logical simulation of SFQ pulse semantics.
//
// Every clocked gate is a combinational function followed by an output
// latch; splitters copy their input transparently within the cycle. A
// pulse present in a clock window is logic-1, absence is logic-0, and the
// all-zero initial state is the SFQ ground state (no stored flux).
//
// Cycle convention: advance(v_c) resolves all net values during cycle c
// (PIs carry v_c, clocked gate outputs show the latch stored at the end
// of cycle c-1) and then clocks every latch. The response to the vector
// applied at cycle c therefore appears on the POs during cycle c + l,
// where l is the circuit latency.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "sfqv/checkers.hpp"
#include "sfqv/netlist.hpp"

namespace sfqv {

struct PulseTrace {
    size_t n_cycles = 0;
    std::vector<std::vector<uint8_t>> bits; // [net id][cycle]
};

class Simulator {
public:
    struct Options {
        // Verification engines simulate deliberately broken DUVs, so the
        // structural checks can be waived explicitly.
        bool skip_checks = false;
    };

    explicit Simulator(const Netlist& net);
    Simulator(const Netlist& net, Options opt);
    // holds a reference; a temporary netlist would dangle
    explicit Simulator(Netlist&&) = delete;
    Simulator(Netlist&&, Options) = delete;

    uint32_t latency() const { return latency_; }
    uint64_t cycle() const { return cycle_; }
    const Netlist& netlist() const { return net_; }

    // Resolves net values for the current cycle, then clocks the latches.
    // The returned reference is valid until the next call.
    const std::vector<uint8_t>& advance(std::span<const uint8_t> pi_vector);

    // advance() plus PO readout under the new latch state, i.e. the PO
    // values during the next cycle. A pulse applied to a single clocked
    // gate at cycle c shows up in the value returned by the c-th step.
    std::vector<uint8_t> step(std::span<const uint8_t> pi_vector);

    PulseTrace run(const std::vector<std::vector<uint8_t>>& vectors, bool flush);

    void reset();

private:
    uint8_t resolve_latched(NetId net, std::span<const uint8_t> pi_vector) const;

    const Netlist& net_;
    uint32_t latency_ = 0;
    uint64_t cycle_ = 0;
    std::vector<uint8_t> latches_;    // by gate id, clocked gates only
    std::vector<uint8_t> net_values_; // scratch, by net id
    std::vector<int8_t> net_force_;   // -1 none, else stuck value
    std::vector<std::array<int8_t, 2>> pin_force_;
};

// Evaluates a single gate function; DFF and BUF are identity.
uint8_t eval_gate(GateKind kind, uint8_t a, uint8_t b);

// Combinational view of a checked netlist: DFFs and splitters collapse to
// wires, leaving only logic gates between PIs and POs. For a netlist that
// passes both checkers, the pipelined simulator's PO response at cycle
// c + latency equals this evaluation of the vector applied at cycle c.
// Also serves as the ATPG skeleton.
class CombEval {
public:
    struct Source {
        enum class Kind : uint8_t { Pi, Node } kind = Kind::Pi;
        uint32_t index = 0;
    };
    struct Node {
        GateKind kind;
        int n_inputs;
        Source src[2];
        GateId gate; // originating gate in the netlist
    };

    explicit CombEval(const Netlist& net);
    // holds a reference; a temporary netlist would dangle
    explicit CombEval(Netlist&&) = delete;

    size_t n_pis() const { return n_pis_; }
    size_t n_pos() const { return po_sources_.size(); }
    const std::vector<Node>& nodes() const { return nodes_; } // topo order
    const std::vector<Source>& po_sources() const { return po_sources_; }
    int node_of_gate(GateId id) const { return node_of_gate_[id]; }
    Source source_of_net(NetId net) const { return source_of_net_[net]; }
    const Netlist& netlist() const { return net_; }

    // Golden evaluation (any forces embedded in the netlist are honored).
    std::vector<uint8_t> eval(std::span<const uint8_t> pi) const;

    // Evaluation with one extra stuck site overlaid; the site must be a
    // PI net, a logic gate output net, or a logic gate input pin.
    std::vector<uint8_t> eval_with(std::span<const uint8_t> pi, const ForcedSite& extra) const;

private:
    struct Overlay {
        std::vector<int8_t> pi_force;
        std::vector<int8_t> node_force;
        std::vector<std::array<int8_t, 2>> pin_force;
        std::vector<int8_t> po_force;
    };

    void apply_site(Overlay& ov, const ForcedSite& site) const;
    std::vector<uint8_t> eval_overlay(std::span<const uint8_t> pi, const Overlay& ov) const;

    const Netlist& net_;
    size_t n_pis_ = 0;
    std::vector<Node> nodes_;
    std::vector<Source> po_sources_;
    std::vector<int> node_of_gate_;
    std::vector<Source> source_of_net_;
    Overlay base_;
};

std::string trace_to_csv(const Netlist& net, const PulseTrace& trace);
std::string trace_to_vcd(const Netlist& net, const PulseTrace& trace,
                         const SimConfig& config = {});

} // namespace sfqv
