// Reader/writer for the extended bench netlist format.
//
// One statement per line:
//   INPUT(<name>)
//   OUTPUT(<name>)
//   <name> = <KIND>(<arg>{, <arg>})
//   # comment
// Kinds are case-insensitive (DFF, SPLIT, INV, AND, OR, XOR, BUF, NAND,
// NOR; "AND2"-style aliases and NOT accepted). Names match [A-Za-z0-9_]+.
// Encoding is UTF-8 and newline handling is CRLF/LF agnostic.

#pragma once

#include <string>
#include <string_view>

#include "sfqv/netlist.hpp"

namespace sfqv {

class ParseError : public std::runtime_error {
public:
    ParseError(size_t line, size_t column, const std::string& message);

    size_t line() const { return line_; }
    size_t column() const { return column_; }

private:
    size_t line_;
    size_t column_;
};

Netlist parse_bench(std::string_view text);
Netlist parse_bench_file(const std::string& path);

// Deterministic text: inputs, outputs, then gates in topological order.
// parse_bench(write_bench(n)) is isomorphic to n (identical up to net id
// renumbering; names are preserved).
std::string write_bench(const Netlist& net);
void write_bench_file(const Netlist& net, const std::string& path);

} // namespace sfqv
