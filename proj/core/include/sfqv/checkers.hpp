// Structural pre-processing checkers for SFQ netlists.
//
// check_fanout: every PI net and every clocked-gate output net must feed
// exactly one sink; splitter outputs may feed one or two.
//
// check_path_balance: every PI-to-PO path must have the same clocked-gate
// depth, equal to the maximum circuit depth (mcd). Splitters propagate
// depth unchanged. Implemented as a memoized DFS that records the set of
// distinct depths reaching each node; a node reached at two different
// depths is a violation. This preserves the declared contract (all path
// depths equal mcd) without enumerating exponentially many paths, which
// the literal recursive formulation would require on reconvergent fanout.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sfqv/netlist.hpp"

namespace sfqv {

enum class Verdict : uint8_t { Pass, FanoutError, PathBalanceError };

std::string_view verdict_name(Verdict v);

struct Violation {
    std::string description;
    std::optional<NetId> net;
    std::optional<GateId> gate;
};

struct PoDepthReport {
    NetId po = kNoNet;
    std::string name;
    std::vector<uint32_t> depths; // distinct path depths observed, sorted
};

struct CheckResult {
    Verdict verdict = Verdict::Pass;
    std::vector<Violation> offending; // empty iff verdict == Pass
    std::vector<std::string> warnings;
    std::vector<PoDepthReport> depth_report; // path-balance checks only
    uint32_t max_circuit_depth = 0;          // mcd
    uint64_t work = 0; // instrumented node/edge visit count

    bool passed() const { return verdict == Verdict::Pass; }
    // 0 pass, 2 fanout error, 3 path balance error.
    int exit_code() const;
    std::string to_json() const;
};

CheckResult check_fanout(const Netlist& net);
CheckResult check_path_balance(const Netlist& net);

// Runs fanout then path balance; returns the first failure.
CheckResult check_all(const Netlist& net);

// Pads shallow paths with DFFs until every clocked gate sees equal input
// levels and every PO sits at the circuit maximum. Padding is placed
// directly at the consuming pin (or PO). Requires a netlist that passes
// check_fanout; the result passes check_path_balance and is functionally
// equivalent. Applying it to a balanced netlist adds nothing.
struct BalanceInsertion {
    Netlist netlist;
    size_t dffs_added = 0;
};

BalanceInsertion insert_balancing_dffs(const Netlist& net);

} // namespace sfqv
