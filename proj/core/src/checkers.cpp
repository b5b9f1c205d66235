#include "sfqv/checkers.hpp"

#include <algorithm>

#include "json.hpp"

namespace sfqv {

std::string_view verdict_name(Verdict v) {
    switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::FanoutError: return "fanout_error";
    default: return "path_balance_error";
    }
}

int CheckResult::exit_code() const {
    switch (verdict) {
    case Verdict::Pass: return 0;
    case Verdict::FanoutError: return 2;
    default: return 3;
    }
}

std::string CheckResult::to_json() const {
    nlohmann::json j;
    j["verdict"] = std::string(verdict_name(verdict));
    j["offending"] = nlohmann::json::array();
    for (const Violation& v : offending) {
        nlohmann::json entry;
        entry["description"] = v.description;
        if (v.net) entry["net"] = *v.net;
        if (v.gate) entry["gate"] = *v.gate;
        j["offending"].push_back(entry);
    }
    j["warnings"] = warnings;
    if (!depth_report.empty()) {
        nlohmann::json outputs = nlohmann::json::array();
        for (const PoDepthReport& r : depth_report)
            outputs.push_back({{"po", r.name}, {"depths", r.depths}});
        j["depth_report"] = {{"mcd", max_circuit_depth}, {"outputs", outputs}};
    }
    j["work"] = work;
    return j.dump(2);
}

CheckResult check_fanout(const Netlist& net) {
    CheckResult result;

    for (NetId pi : net.primary_inputs()) {
        ++result.work;
        const size_t size = net.fanout(pi);
        if (size != 1)
            result.offending.push_back(
                {"primary input '" + net.net_name(pi) + "' feeds " + std::to_string(size) +
                     " sinks, expected exactly 1",
                 pi, std::nullopt});
    }
    for (const Gate& g : net.gates()) {
        ++result.work;
        const size_t size = net.fanout(g.output);
        if (g.kind == GateKind::Split) {
            if (size != 1 && size != 2)
                result.offending.push_back(
                    {"splitter output '" + net.net_name(g.output) + "' feeds " +
                         std::to_string(size) + " sinks, expected 1 or 2",
                     g.output, g.id});
            else if (size == 1)
                result.warnings.push_back("splitter output '" + net.net_name(g.output) +
                                          "' has fanout 1 (splitter is unnecessary)");
        } else if (size != 1) {
            result.offending.push_back(
                {"gate output '" + net.net_name(g.output) + "' feeds " + std::to_string(size) +
                     " sinks, expected exactly 1",
                 g.output, g.id});
        }
    }
    result.verdict = result.offending.empty() ? Verdict::Pass : Verdict::FanoutError;
    return result;
}

CheckResult check_path_balance(const Netlist& net) {
    CheckResult result;

    // po slots of each net, so PO arrival depths can be recorded per output
    std::vector<std::vector<size_t>> po_slots(net.n_nets());
    for (size_t i = 0; i < net.primary_outputs().size(); ++i)
        po_slots[net.primary_outputs()[i]].push_back(i);
    std::vector<std::vector<uint32_t>> po_depths(net.primary_outputs().size());

    // Distinct depths seen at each gate. Balanced circuits have exactly
    // one entry per gate, keeping the search linear in |PI| + |G| + |W|.
    std::vector<std::vector<uint32_t>> seen(net.n_gates());

    auto record_po = [&](NetId n, uint32_t depth) {
        for (size_t slot : po_slots[n]) {
            auto& d = po_depths[slot];
            if (std::find(d.begin(), d.end(), depth) == d.end()) d.push_back(depth);
        }
    };

    struct Arrival {
        GateId gate;
        uint32_t depth; // path depth entering the gate
    };
    std::vector<Arrival> stack;

    for (NetId pi : net.primary_inputs()) {
        ++result.work;
        record_po(pi, 0);
        for (GateId sink : net.sinks(pi)) stack.push_back({sink, 0});

        while (!stack.empty()) {
            const auto [id, pd] = stack.back();
            stack.pop_back();
            ++result.work;
            const Gate& g = net.gate(id);
            // Splitters do not increase logic level or path depth.
            const uint32_t level = is_clocked(g.kind) ? pd + 1 : pd;
            auto& depths = seen[id];
            if (std::find(depths.begin(), depths.end(), level) != depths.end())
                continue; // finished node revisited at a consistent depth
            depths.push_back(level);
            record_po(g.output, level);
            for (GateId sink : net.sinks(g.output)) stack.push_back({sink, level});
        }
    }

    uint32_t mcd = 0;
    for (const auto& depths : po_depths)
        for (uint32_t d : depths) mcd = std::max(mcd, d);
    result.max_circuit_depth = mcd;

    for (GateId id = 0; id < net.n_gates(); ++id)
        if (seen[id].size() > 1) {
            std::vector<uint32_t> sorted = seen[id];
            std::sort(sorted.begin(), sorted.end());
            std::string list;
            for (uint32_t d : sorted) list += (list.empty() ? "" : ", ") + std::to_string(d);
            result.offending.push_back({"gate '" + net.net_name(net.gate(id).output) +
                                            "' reached at unequal path depths {" + list + "}",
                                        net.gate(id).output, id});
        }

    for (size_t slot = 0; slot < po_depths.size(); ++slot) {
        auto& depths = po_depths[slot];
        std::sort(depths.begin(), depths.end());
        const NetId po = net.primary_outputs()[slot];
        if (depths.size() != 1 || depths[0] != mcd) {
            std::string list;
            for (uint32_t d : depths) list += (list.empty() ? "" : ", ") + std::to_string(d);
            result.offending.push_back(
                {"output '" + net.net_name(po) + "' path depth(s) {" + list +
                     "} do not all equal the max circuit depth " + std::to_string(mcd),
                 po, std::nullopt});
        }
        result.depth_report.push_back({po, net.net_name(po), depths});
    }

    result.verdict = result.offending.empty() ? Verdict::Pass : Verdict::PathBalanceError;
    return result;
}

CheckResult check_all(const Netlist& net) {
    CheckResult fanout = check_fanout(net);
    if (!fanout.passed()) return fanout;
    CheckResult balance = check_path_balance(net);
    balance.work += fanout.work;
    balance.warnings.insert(balance.warnings.begin(), fanout.warnings.begin(),
                            fanout.warnings.end());
    return balance;
}

BalanceInsertion insert_balancing_dffs(const Netlist& input) {
    if (!check_fanout(input).passed())
        throw std::invalid_argument("insert_balancing_dffs requires a netlist passing check_fanout");

    BalanceInsertion result;
    result.netlist = input;
    Netlist& nl = result.netlist;
    const LevelMap levels = compute_levels(input);

    size_t name_counter = 0;
    auto fresh = [&](const std::string& base) {
        for (;;) {
            std::string candidate = base + "_d" + std::to_string(name_counter++);
            if (!nl.find_net(candidate)) return nl.add_net(std::move(candidate));
        }
    };

    // Chain of `count` DFFs fed from `from`; returns the chain's last net.
    auto dff_chain = [&](NetId from, uint32_t count, const std::string& base) {
        NetId cur = from;
        for (uint32_t i = 0; i < count; ++i) {
            NetId next = fresh(base);
            nl.add_gate1(GateKind::Dff, cur, next);
            ++result.dffs_added;
            cur = next;
        }
        return cur;
    };

    // Raise every shallow gate input to the gate's own level. Padding a
    // pin never changes its gate's level, so one pass over the original
    // levels suffices.
    for (const Gate& g : input.gates()) {
        if (!is_clocked(g.kind)) continue;
        const uint32_t target = levels.gate_level[g.id] - 1;
        for (int pin = 0; pin < g.n_inputs(); ++pin) {
            const NetId in = g.inputs[static_cast<size_t>(pin)];
            const uint32_t have = levels.net_level(input, in);
            if (have < target)
                nl.rewire_input(g.id, pin, dff_chain(in, target - have, input.net_name(in)));
        }
    }

    // Pad every PO up to the circuit maximum. PO nets have fanout 1 here
    // (check_fanout passed), so a gate-driven PO net can keep its name by
    // moving the driver onto a fresh net and ending the chain on the
    // original one.
    const uint32_t mcd = levels.max_po_level;
    for (size_t slot = 0; slot < input.primary_outputs().size(); ++slot) {
        const NetId po = input.primary_outputs()[slot];
        const uint32_t have = levels.net_level(input, po);
        if (have == mcd) continue;
        const uint32_t need = mcd - have;
        const Driver drv = input.driver(po);
        if (drv.kind == Driver::Kind::Gate) {
            NetId src = fresh(input.net_name(po));
            nl.set_gate_output(drv.index, src);
            NetId last = dff_chain(src, need - 1, input.net_name(po));
            nl.add_gate1(GateKind::Dff, last, po);
            ++result.dffs_added;
        } else {
            nl.set_output(slot, dff_chain(po, need, input.net_name(po)));
        }
    }

    nl.finalize();
    return result;
}

} // namespace sfqv
