#include "sfqv/simulator.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace sfqv {

uint8_t eval_gate(GateKind kind, uint8_t a, uint8_t b) {
    switch (kind) {
    case GateKind::And2: return a & b;
    case GateKind::Or2: return a | b;
    case GateKind::Xor2: return a ^ b;
    case GateKind::Nand2: return !(a & b);
    case GateKind::Nor2: return !(a | b);
    case GateKind::Inv: return !a;
    case GateKind::Buf:
    case GateKind::Dff:
    case GateKind::Split: return a;
    }
    return 0;
}

Simulator::Simulator(const Netlist& net) : Simulator(net, Options{}) {}

Simulator::Simulator(const Netlist& net, Options opt) : net_(net) {
    if (!net.finalized()) throw NetlistError("simulator requires a finalized netlist");
    if (!opt.skip_checks) {
        const CheckResult check = check_all(net);
        if (!check.passed())
            throw std::invalid_argument(
                "netlist failed structural checks (" +
                std::string(verdict_name(check.verdict)) +
                "); run the checkers before simulating");
    }
    latency_ = sfqv::latency(net);
    latches_.assign(net.n_gates(), 0);
    net_values_.assign(net.n_nets(), 0);
    net_force_.assign(net.n_nets(), -1);
    pin_force_.assign(net.n_gates(), {-1, -1});
    for (const ForcedSite& site : net.forced_sites()) {
        if (site.kind == ForcedSite::Kind::Net) {
            net_force_[site.net] = static_cast<int8_t>(site.value);
        } else if (!is_logic(net.gate(site.gate).kind)) {
            // DFF/splitter pins are fault-transparent: forcing the pin is
            // the same as forcing the gate's output net.
            net_force_[net.gate(site.gate).output] = static_cast<int8_t>(site.value);
        } else {
            pin_force_[site.gate][static_cast<size_t>(site.pin)] =
                static_cast<int8_t>(site.value);
        }
    }
}

void Simulator::reset() {
    std::fill(latches_.begin(), latches_.end(), 0);
    cycle_ = 0;
}

const std::vector<uint8_t>& Simulator::advance(std::span<const uint8_t> pi_vector) {
    const auto& pis = net_.primary_inputs();
    if (pi_vector.size() != pis.size())
        throw std::invalid_argument("PI vector length mismatch");

    for (size_t i = 0; i < pis.size(); ++i) {
        const int8_t forced = net_force_[pis[i]];
        net_values_[pis[i]] = forced >= 0 ? static_cast<uint8_t>(forced) : pi_vector[i];
    }
    for (GateId id : net_.topo_order()) {
        const Gate& g = net_.gate(id);
        // Clocked outputs show the previously latched value; splitters
        // copy their input within the same cycle.
        uint8_t value = is_clocked(g.kind) ? latches_[id] : net_values_[g.inputs[0]];
        const int8_t forced = net_force_[g.output];
        if (forced >= 0) value = static_cast<uint8_t>(forced);
        net_values_[g.output] = value;
    }
    // Clock edge: every latch captures its gate function of the values
    // resolved above. In-place update is safe because net_values_ already
    // fixed this cycle's view.
    for (const Gate& g : net_.gates()) {
        if (!is_clocked(g.kind)) continue;
        uint8_t a = net_values_[g.inputs[0]];
        if (pin_force_[g.id][0] >= 0) a = static_cast<uint8_t>(pin_force_[g.id][0]);
        uint8_t b = 0;
        if (g.n_inputs() == 2) {
            b = net_values_[g.inputs[1]];
            if (pin_force_[g.id][1] >= 0) b = static_cast<uint8_t>(pin_force_[g.id][1]);
        }
        latches_[g.id] = eval_gate(g.kind, a, b);
    }
    ++cycle_;
    return net_values_;
}

uint8_t Simulator::resolve_latched(NetId net, std::span<const uint8_t> pi_vector) const {
    const int8_t forced = net_force_[net];
    if (forced >= 0) return static_cast<uint8_t>(forced);
    const Driver d = net_.driver(net);
    if (d.kind == Driver::Kind::PrimaryInput) return pi_vector[d.index];
    const Gate& g = net_.gate(d.index);
    if (is_clocked(g.kind)) return latches_[g.id];
    return resolve_latched(g.inputs[0], pi_vector);
}

std::vector<uint8_t> Simulator::step(std::span<const uint8_t> pi_vector) {
    advance(pi_vector);
    std::vector<uint8_t> po(net_.primary_outputs().size());
    for (size_t i = 0; i < po.size(); ++i)
        po[i] = resolve_latched(net_.primary_outputs()[i], pi_vector);
    return po;
}

PulseTrace Simulator::run(const std::vector<std::vector<uint8_t>>& vectors, bool flush) {
    reset();
    const size_t rows = vectors.size() + (flush ? latency_ : 0);
    PulseTrace trace;
    trace.n_cycles = rows;
    trace.bits.assign(net_.n_nets(), std::vector<uint8_t>(rows, 0));
    const std::vector<uint8_t> zeros(net_.primary_inputs().size(), 0);
    for (size_t c = 0; c < rows; ++c) {
        const auto& vec = c < vectors.size() ? vectors[c] : zeros;
        const auto& values = advance(vec);
        for (NetId n = 0; n < net_.n_nets(); ++n) trace.bits[n][c] = values[n];
    }
    return trace;
}

// ---------------------------------------------------------------------
// CombEval

CombEval::CombEval(const Netlist& net) : net_(net) {
    if (!net.finalized()) throw NetlistError("CombEval requires a finalized netlist");
    n_pis_ = net.primary_inputs().size();
    node_of_gate_.assign(net.n_gates(), -1);
    source_of_net_.assign(net.n_nets(), {});

    for (size_t i = 0; i < net.primary_inputs().size(); ++i)
        source_of_net_[net.primary_inputs()[i]] = {Source::Kind::Pi, static_cast<uint32_t>(i)};

    for (GateId id : net.topo_order()) {
        const Gate& g = net.gate(id);
        if (is_logic(g.kind)) {
            Node node;
            node.kind = g.kind;
            node.n_inputs = g.n_inputs();
            node.gate = id;
            for (int k = 0; k < node.n_inputs; ++k)
                node.src[k] = source_of_net_[g.inputs[static_cast<size_t>(k)]];
            node_of_gate_[id] = static_cast<int>(nodes_.size());
            source_of_net_[g.output] = {Source::Kind::Node,
                                        static_cast<uint32_t>(nodes_.size())};
            nodes_.push_back(node);
        } else {
            // DFFs and splitters are wires in the combinational view.
            source_of_net_[g.output] = source_of_net_[g.inputs[0]];
        }
    }
    for (NetId po : net.primary_outputs()) po_sources_.push_back(source_of_net_[po]);

    base_.pi_force.assign(n_pis_, -1);
    base_.node_force.assign(nodes_.size(), -1);
    base_.pin_force.assign(nodes_.size(), {-1, -1});
    base_.po_force.assign(po_sources_.size(), -1);
    for (const ForcedSite& site : net.forced_sites()) apply_site(base_, site);
}

void CombEval::apply_site(Overlay& ov, const ForcedSite& site) const {
    const int8_t v = static_cast<int8_t>(site.value);
    if (site.kind == ForcedSite::Kind::Pin) {
        const Gate& g = net_.gate(site.gate);
        if (is_logic(g.kind)) {
            ov.pin_force[static_cast<size_t>(node_of_gate_[site.gate])]
                        [static_cast<size_t>(site.pin)] = v;
            return;
        }
        // transparent pin == the gate's output net
        apply_site(ov, {ForcedSite::Kind::Net, g.output, 0, 0, site.value});
        return;
    }

    const Driver d = net_.driver(site.net);
    if (d.kind == Driver::Kind::PrimaryInput) {
        ov.pi_force[d.index] = v;
        return;
    }
    if (is_logic(net_.gate(d.index).kind)) {
        ov.node_force[static_cast<size_t>(node_of_gate_[d.index])] = v;
        return;
    }
    // Interior of a DFF/splitter chain: force every logic pin and PO slot
    // downstream through transparent gates only.
    std::vector<NetId> work{site.net};
    while (!work.empty()) {
        const NetId n = work.back();
        work.pop_back();
        for (size_t slot = 0; slot < net_.primary_outputs().size(); ++slot)
            if (net_.primary_outputs()[slot] == n) ov.po_force[slot] = v;
        for (GateId sink : net_.sinks(n)) {
            const Gate& g = net_.gate(sink);
            if (is_logic(g.kind)) {
                for (int k = 0; k < g.n_inputs(); ++k)
                    if (g.inputs[static_cast<size_t>(k)] == n)
                        ov.pin_force[static_cast<size_t>(node_of_gate_[sink])]
                                    [static_cast<size_t>(k)] = v;
            } else {
                work.push_back(g.output);
            }
        }
    }
}

std::vector<uint8_t> CombEval::eval_overlay(std::span<const uint8_t> pi,
                                            const Overlay& ov) const {
    if (pi.size() != n_pis_) throw std::invalid_argument("PI vector length mismatch");

    std::vector<uint8_t> pv(pi.begin(), pi.end());
    for (size_t i = 0; i < pv.size(); ++i)
        if (ov.pi_force[i] >= 0) pv[i] = static_cast<uint8_t>(ov.pi_force[i]);

    std::vector<uint8_t> nv(nodes_.size(), 0);
    auto value_of = [&](Source s) {
        return s.kind == Source::Kind::Pi ? pv[s.index] : nv[s.index];
    };
    for (size_t i = 0; i < nodes_.size(); ++i) {
        const Node& node = nodes_[i];
        if (ov.node_force[i] >= 0) {
            nv[i] = static_cast<uint8_t>(ov.node_force[i]);
            continue;
        }
        uint8_t a = value_of(node.src[0]);
        if (ov.pin_force[i][0] >= 0) a = static_cast<uint8_t>(ov.pin_force[i][0]);
        uint8_t b = 0;
        if (node.n_inputs == 2) {
            b = value_of(node.src[1]);
            if (ov.pin_force[i][1] >= 0) b = static_cast<uint8_t>(ov.pin_force[i][1]);
        }
        nv[i] = eval_gate(node.kind, a, b);
    }

    std::vector<uint8_t> po(po_sources_.size());
    for (size_t i = 0; i < po.size(); ++i)
        po[i] = ov.po_force[i] >= 0 ? static_cast<uint8_t>(ov.po_force[i])
                                    : value_of(po_sources_[i]);
    return po;
}

std::vector<uint8_t> CombEval::eval(std::span<const uint8_t> pi) const {
    return eval_overlay(pi, base_);
}

std::vector<uint8_t> CombEval::eval_with(std::span<const uint8_t> pi,
                                         const ForcedSite& extra) const {
    Overlay ov = base_;
    apply_site(ov, extra);
    return eval_overlay(pi, ov);
}

// ---------------------------------------------------------------------
// trace export

std::string trace_to_csv(const Netlist& net, const PulseTrace& trace) {
    std::string out = "cycle,net,value\n";
    for (size_t c = 0; c < trace.n_cycles; ++c)
        for (NetId n = 0; n < net.n_nets(); ++n) {
            out += std::to_string(c);
            out += ',';
            out += net.net_name(n);
            out += ',';
            out += trace.bits[n][c] ? '1' : '0';
            out += '\n';
        }
    return out;
}

namespace {

std::string vcd_id(size_t index) {
    std::string id;
    do {
        id += static_cast<char>('!' + index % 94);
        index /= 94;
    } while (index > 0);
    return id;
}

} // namespace

std::string trace_to_vcd(const Netlist& net, const PulseTrace& trace,
                         const SimConfig& config) {
    std::string out;
    out += "$comment pulse_width_ps=" + std::to_string(config.pulse_width_ps) +
           " pulse_amplitude_mv=" + std::to_string(config.pulse_amplitude_mv) +
           " flux_quantum_mv_ps=" + std::to_string(SimConfig::kFluxQuantumMvPs) +
           " $end\n";
    out += "$timescale 1ps $end\n$scope module top $end\n";
    for (NetId n = 0; n < net.n_nets(); ++n)
        out += "$var wire 1 " + vcd_id(n) + " " + net.net_name(n) + " $end\n";
    out += "$upscope $end\n$enddefinitions $end\n";
    std::vector<int8_t> last(net.n_nets(), -1);
    for (size_t c = 0; c < trace.n_cycles; ++c) {
        out += "#" + std::to_string(c) + "\n";
        for (NetId n = 0; n < net.n_nets(); ++n) {
            const uint8_t v = trace.bits[n][c];
            if (last[n] == static_cast<int8_t>(v)) continue;
            last[n] = static_cast<int8_t>(v);
            out += v ? '1' : '0';
            out += vcd_id(n);
            out += '\n';
        }
    }
    return out;
}

} // namespace sfqv
