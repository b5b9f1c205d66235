// Benchmark circuit generation: Kogge-Stone adders (n = 4/8/16/32), array
// multipliers (4/8/16), non-restoring integer dividers (4/8) and the
// ISCAS'85 c17, plus the SFQ mapping pass (NAND/NOR decomposition,
// splitter trees, balancing DFFs) and golden/fanout/unbalanced variant
// generation.
//
// Bit vector convention throughout: LSB-first in PI/PO declaration order.
// Adder: PIs a0..a{n-1}, b0..b{n-1}, cin; POs s0..s{n-1}, cout.
// Multiplier: PIs a0.., b0..; POs p0..p{2n-1}.
// Divider: PIs d0.. (dividend), v0.. (divisor); POs q0.., r0..; division
// by zero yields quotient all-ones and remainder = dividend.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sfqv/netlist.hpp"

namespace sfqv {

enum class Family : uint8_t { Ksa, ArrMult, IntDiv, C17 };
enum class Variant : uint8_t { Golden, Fanout, Unbalanced };

std::string_view family_name(Family f);
std::string_view variant_name(Variant v);

struct BenchmarkSpec {
    Family family = Family::Ksa;
    int width = 4; // ignored for C17
    Variant variant = Variant::Golden;
    uint64_t seed = 0; // mutant target selection

    std::string name() const; // e.g. "ksa4_golden", "c17_fanout"
};

// Pre-mapping logical netlists (2-input gates, unrestricted fanout, no
// DFFs or splitters).
Netlist gen_ksa(int n);
Netlist gen_arrmult(int n);
Netlist gen_intdiv(int n);
Netlist c17(); // canonical 6-NAND form

// NAND2 -> AND2+INV and NOR2 -> OR2+INV, then splitter trees, then
// balancing DFFs. The result passes both checkers and is functionally
// identical; an already mapped, balanced netlist comes back unchanged.
Netlist sfq_map(const Netlist& logical);

Netlist gen_logical(Family family, int width);
// Mapped golden circuit, or the requested seeded mutant of it.
Netlist build_benchmark(const BenchmarkSpec& spec);

// Reference arithmetic for the generated families, on the same bit
// conventions as the circuits. C17 evaluates the canonical truth
// function.
std::vector<uint8_t> behavioral(Family family, int width, std::span<const uint8_t> pi);

struct SuiteEntry {
    BenchmarkSpec spec;
    std::string file;
    NetlistStats stats;
};

struct SuiteManifest {
    std::vector<SuiteEntry> entries;
};

// Writes the benchmark tree: golden/fanout/unbalanced triples for KSA4,
// ArrMult4, IntDiv4 and c17, plus golden-only KSA8/16/32, ArrMult8/16 and
// IntDiv8, along with manifest.json (stats, expected checker verdicts,
// reference latencies, seeds). Regeneration is byte-identical.
SuiteManifest gen_benchmark_suite(const std::string& out_dir);

} // namespace sfqv
