#include "sfqv/bench_io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace sfqv {

ParseError::ParseError(size_t line, size_t column, const std::string& message)
    : std::runtime_error(line == 0 ? message
                                   : "line " + std::to_string(line) + ":" +
                                         std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

struct LineScanner {
    std::string_view text;
    size_t line_no;
    size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= text.size();
    }
    [[noreturn]] void fail(const std::string& message) {
        throw ParseError(line_no, pos + 1, message);
    }
    std::string_view name() {
        skip_ws();
        const size_t start = pos;
        while (pos < text.size() && is_name_char(text[pos])) ++pos;
        if (pos == start) fail("expected a name ([A-Za-z0-9_]+)");
        return text.substr(start, pos - start);
    }
    void expect(char c) {
        skip_ws();
        if (pos >= text.size() || text[pos] != c)
            fail(std::string("expected '") + c + "'");
        ++pos;
    }
    bool accept(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
};

std::string upper_copy(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

struct GateStmt {
    size_t line_no;
    std::string target;
    GateKind kind;
    std::vector<std::string> args;
};

} // namespace

Netlist parse_bench(std::string_view text) {
    Netlist net;
    std::unordered_map<std::string, size_t> defined_at; // net name -> line
    std::vector<std::pair<std::string, size_t>> outputs; // name, line
    std::vector<GateStmt> gate_stmts;

    size_t line_no = 0;
    size_t start = 0;
    while (start <= text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (start > text.size() && raw.empty()) break;

        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        if (size_t hash = raw.find('#'); hash != std::string_view::npos)
            raw = raw.substr(0, hash);

        LineScanner sc{raw, line_no};
        if (sc.done()) continue;

        const std::string_view first = sc.name();
        const std::string keyword = upper_copy(first);
        if (keyword == "INPUT" || keyword == "OUTPUT") {
            sc.expect('(');
            const std::string name(sc.name());
            sc.expect(')');
            if (!sc.done()) sc.fail("trailing text after declaration");
            if (keyword == "INPUT") {
                if (auto it = defined_at.find(name); it != defined_at.end())
                    throw ParseError(line_no, 1,
                                     "duplicate definition of net '" + name +
                                         "' (first defined on line " +
                                         std::to_string(it->second) + ")");
                defined_at.emplace(name, line_no);
                net.mark_input(net.add_net(name));
            } else {
                for (const auto& [existing, at] : outputs)
                    if (existing == name)
                        throw ParseError(line_no, 1,
                                         "duplicate OUTPUT declaration for '" + name + "'");
                outputs.emplace_back(name, line_no);
            }
            continue;
        }

        // gate statement: <name> = <KIND>(args)
        GateStmt stmt;
        stmt.line_no = line_no;
        stmt.target = std::string(first);
        sc.expect('=');
        const std::string_view kind_str = sc.name();
        const auto kind = kind_from_name(kind_str);
        if (!kind)
            sc.fail("unknown gate kind '" + std::string(kind_str) + "'");
        stmt.kind = *kind;
        sc.expect('(');
        stmt.args.emplace_back(sc.name());
        while (sc.accept(',')) stmt.args.emplace_back(sc.name());
        sc.expect(')');
        if (!sc.done()) sc.fail("trailing text after gate statement");

        if (auto it = defined_at.find(stmt.target); it != defined_at.end())
            throw ParseError(line_no, 1,
                             "duplicate definition of net '" + stmt.target +
                                 "' (first defined on line " + std::to_string(it->second) +
                                 ")");
        defined_at.emplace(stmt.target, line_no);
        if (static_cast<int>(stmt.args.size()) != arity(stmt.kind))
            throw ParseError(line_no, 1,
                             "arity mismatch for gate '" + stmt.target + "': " +
                                 std::string(kind_name(stmt.kind)) + " expects " +
                                 std::to_string(arity(stmt.kind)) + " input(s), got " +
                                 std::to_string(stmt.args.size()));
        net.add_net(stmt.target);
        gate_stmts.push_back(std::move(stmt));
    }

    auto resolve = [&](const std::string& name, size_t at) -> NetId {
        if (auto id = net.find_net(name); id && defined_at.contains(name)) return *id;
        throw ParseError(at, 1, "reference to undefined net '" + name + "'");
    };

    for (const GateStmt& stmt : gate_stmts) {
        std::vector<NetId> ins;
        ins.reserve(stmt.args.size());
        for (const std::string& arg : stmt.args) ins.push_back(resolve(arg, stmt.line_no));
        net.add_gate(stmt.kind, ins, *net.find_net(stmt.target));
    }
    for (const auto& [name, at] : outputs) net.mark_output(resolve(name, at));

    try {
        net.finalize();
    } catch (const NetlistError& e) {
        throw ParseError(0, 0, e.what());
    }
    return net;
}

Netlist parse_bench_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_bench(buffer.str());
    } catch (const ParseError& e) {
        throw ParseError(e.line(), e.column(), path + ": " + e.what());
    }
}

std::string write_bench(const Netlist& net) {
    std::string out;
    for (NetId pi : net.primary_inputs()) out += "INPUT(" + net.net_name(pi) + ")\n";
    for (NetId po : net.primary_outputs()) out += "OUTPUT(" + net.net_name(po) + ")\n";
    for (GateId id : net.topo_order()) {
        const Gate& g = net.gate(id);
        out += net.net_name(g.output) + " = " + std::string(kind_name(g.kind)) + "(";
        for (int i = 0; i < g.n_inputs(); ++i) {
            if (i) out += ", ";
            out += net.net_name(g.inputs[static_cast<size_t>(i)]);
        }
        out += ")\n";
    }
    return out;
}

void write_bench_file(const Netlist& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << write_bench(net);
}

} // namespace sfqv
