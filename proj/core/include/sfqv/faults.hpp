// Single stuck-at fault universe, structural equivalence collapsing,
// simulation-time injection, and seeded mutant generation.
//
// Fault sites live on the logical circuit: PI nets, logic-gate output
// nets, and logic-gate input pins. DFFs and splitters are
// fault-transparent — a stuck value anywhere on a DFF/splitter chain is
// carried by the driving site — except that a pin fed through a splitter
// branch is a site of its own (the branch is a distinct line). A pin
// whose transparent walk back to its stem crosses no branch is the same
// electrical line as the stem and is not enumerated separately.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sfqv/netlist.hpp"

namespace sfqv {

enum class FaultSiteKind : uint8_t { PiNet, GateOutput, GatePin };

struct FaultSite {
    FaultSiteKind kind = FaultSiteKind::PiNet;
    NetId net = kNoNet; // PiNet: the PI net; GateOutput: the output net; GatePin: the pin's net
    GateId gate = 0;    // GateOutput / GatePin
    int pin = 0;        // GatePin

    bool operator==(const FaultSite&) const = default;
};

struct Fault {
    FaultSite site;
    uint8_t stuck_value = 0;
    int32_t class_id = -1; // assigned by collapse_faults

    ForcedSite to_forced_site() const;
    std::string label(const Netlist& net) const;
};

// Both polarities at every site, ordered: PI nets in declaration order,
// then per gate in topological order its qualifying input pins followed
// by its output net. include_transparent additionally enumerates
// DFF/splitter sites (identity-collapsed) for completeness.
std::vector<Fault> enumerate_faults(const Netlist& net, bool include_transparent = false);

// Structural equivalence collapsing (AND: in-SA0 == out-SA0, OR: in-SA1
// == out-SA1, NAND: in-SA0 == out-SA1, NOR: in-SA1 == out-SA0, INV/BUF
// and transparent kinds by polarity). Assigns class_id to every fault in
// `universe` and returns one representative per class, the earliest site
// in topological order.
std::vector<Fault> collapse_faults(const Netlist& net, std::vector<Fault>& universe);

// Faulty copy whose simulation forces the site to the stuck value every
// cycle. Structure is unchanged, so the copy still passes the checkers.
Netlist inject_fault(const Netlist& net, const Fault& fault);

// Uniformly random site; stuck-at-0 with probability 0.99 (an inactive
// SFQ gate never emits a pulse), stuck-at-1 with 0.01.
Fault sample_fault(const Netlist& net, uint64_t seed);

enum class MutantKind : uint8_t { StuckAt, WrongGate, FanoutBug, UnbalanceBug };

std::string_view mutant_kind_name(MutantKind kind);
std::optional<MutantKind> mutant_kind_from_name(std::string_view name);

struct MutantSpec {
    MutantKind kind = MutantKind::StuckAt;
    uint64_t seed = 0;
    // StuckAt: explicit fault; otherwise sampled from the seed.
    std::optional<Fault> target;
    // WrongGate/FanoutBug/UnbalanceBug: explicit gate; otherwise seeded.
    std::optional<GateId> target_gate;
};

std::string mutant_spec_to_json(const Netlist& net, const MutantSpec& spec);
MutantSpec mutant_spec_from_json(const Netlist& net, const std::string& text);

struct MutantResult {
    Netlist netlist;
    std::string description;
    std::optional<Fault> fault; // StuckAt mutants carry the injected fault
};

// Derives a buggy variant of a golden netlist:
//   StuckAt      - inject_fault (sampled per seed unless spec.target set)
//   WrongGate    - swap one seeded logic gate for a different same-arity kind
//   FanoutBug    - remove one seeded splitter, rewiring its input net to
//                  both former sinks (always fails check_fanout)
//   UnbalanceBug - remove (or, failing that, add) one seeded DFF so path
//                  depths deviate (always fails check_path_balance)
// Throws std::runtime_error when no eligible target exists.
MutantResult make_mutant(const Netlist& golden, const MutantSpec& spec);

std::string faults_to_csv(const Netlist& net, const std::vector<Fault>& faults);

std::string fault_to_json(const Netlist& net, const Fault& fault);
Fault fault_from_json(const Netlist& net, const std::string& text);

} // namespace sfqv
