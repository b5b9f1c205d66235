#include "sfqv/benchgen.hpp"

#include <filesystem>
#include <fstream>
#include <optional>

#include "json.hpp"

#include "sfqv/bench_io.hpp"
#include "sfqv/checkers.hpp"
#include "sfqv/faults.hpp"

namespace sfqv {

std::string_view family_name(Family f) {
    switch (f) {
    case Family::Ksa: return "ksa";
    case Family::ArrMult: return "arrmult";
    case Family::IntDiv: return "intdiv";
    default: return "c17";
    }
}

std::string_view variant_name(Variant v) {
    switch (v) {
    case Variant::Golden: return "golden";
    case Variant::Fanout: return "fanout";
    default: return "unbalanced";
    }
}

std::string BenchmarkSpec::name() const {
    std::string n(family_name(family));
    if (family != Family::C17) n += std::to_string(width);
    n += "_";
    n += variant_name(variant);
    return n;
}

namespace {

// Net-or-constant operand with constant folding, so generators never need
// constant-source cells (the gate set has none).
struct Bit {
    int konst = -1; // 0/1, or -1 when driven by a net
    NetId net = kNoNet;

    static Bit zero() { return {0, kNoNet}; }
    static Bit one() { return {1, kNoNet}; }
    static Bit of(NetId n) { return {-1, n}; }
    bool is_const() const { return konst >= 0; }
};

struct Gen {
    Netlist nl;
    size_t tmp = 0;

    NetId fresh(const std::string& base) {
        for (;;) {
            std::string name = base + "_t" + std::to_string(tmp++);
            if (!nl.find_net(name)) return nl.add_net(name);
        }
    }
    NetId named(const std::string& name) { return nl.add_net(name); }

    Bit gate2(GateKind kind, Bit a, Bit b, const std::string& name_hint) {
        NetId out = name_hint.empty() ? fresh("w") : named(name_hint);
        nl.add_gate2(kind, a.net, b.net, out);
        return Bit::of(out);
    }

    Bit b_not(Bit a, const std::string& name_hint = {}) {
        if (a.is_const()) return a.konst ? Bit::zero() : Bit::one();
        NetId out = name_hint.empty() ? fresh("w") : named(name_hint);
        nl.add_gate1(GateKind::Inv, a.net, out);
        return Bit::of(out);
    }
    Bit b_and(Bit a, Bit b, const std::string& name_hint = {}) {
        if (a.is_const()) return a.konst ? b : Bit::zero();
        if (b.is_const()) return b.konst ? a : Bit::zero();
        return gate2(GateKind::And2, a, b, name_hint);
    }
    Bit b_or(Bit a, Bit b, const std::string& name_hint = {}) {
        if (a.is_const()) return a.konst ? Bit::one() : b;
        if (b.is_const()) return b.konst ? Bit::one() : a;
        return gate2(GateKind::Or2, a, b, name_hint);
    }
    Bit b_xor(Bit a, Bit b, const std::string& name_hint = {}) {
        if (a.is_const()) return a.konst ? b_not(b, name_hint) : b;
        if (b.is_const()) return b.konst ? b_not(a, name_hint) : a;
        return gate2(GateKind::Xor2, a, b, name_hint);
    }

    // Full adder decomposition with the first XOR shared:
    //   s = (a ^ b) ^ c,  cout = (a & b) | (c & (a ^ b))
    std::pair<Bit, Bit> full_add(Bit a, Bit b, Bit c, const std::string& sum_name = {}) {
        Bit x = b_xor(a, b);
        Bit s = b_xor(x, c, sum_name);
        Bit carry = b_or(b_and(a, b), b_and(c, x));
        return {s, carry};
    }

    void output(Bit b) {
        if (b.is_const())
            throw NetlistError("generator produced a constant primary output");
        nl.mark_output(b.net);
    }
};

// Drops gates outside every PO cone (the divider's correction row computes
// high remainder bits nothing consumes). PIs are always kept.
Netlist prune_unused(const Netlist& src) {
    std::vector<uint8_t> live_net(src.n_nets(), 0);
    std::vector<NetId> work;
    for (NetId po : src.primary_outputs())
        if (!live_net[po]) {
            live_net[po] = 1;
            work.push_back(po);
        }
    for (NetId pi : src.primary_inputs())
        if (!live_net[pi]) {
            live_net[pi] = 1;
            work.push_back(pi);
        }
    while (!work.empty()) {
        const NetId n = work.back();
        work.pop_back();
        const Driver d = src.driver(n);
        if (d.kind != Driver::Kind::Gate) continue;
        for (NetId in : src.gate(d.index).input_span())
            if (!live_net[in]) {
                live_net[in] = 1;
                work.push_back(in);
            }
    }

    Netlist out;
    std::vector<NetId> old2new(src.n_nets(), kNoNet);
    for (NetId n = 0; n < src.n_nets(); ++n)
        if (live_net[n]) old2new[n] = out.add_net(src.net_name(n));
    for (GateId id : src.topo_order()) {
        const Gate& g = src.gate(id);
        if (!live_net[g.output]) continue;
        std::vector<NetId> ins;
        for (NetId in : g.input_span()) ins.push_back(old2new[in]);
        out.add_gate(g.kind, ins, old2new[g.output]);
    }
    for (NetId pi : src.primary_inputs()) out.mark_input(old2new[pi]);
    for (NetId po : src.primary_outputs()) out.mark_output(old2new[po]);
    out.finalize();
    return out;
}

} // namespace

Netlist gen_ksa(int n) {
    if (n < 2 || (n & (n - 1)) != 0)
        throw std::invalid_argument("Kogge-Stone width must be a power of two >= 2");
    Gen g;
    std::vector<Bit> a(static_cast<size_t>(n)), b(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) a[static_cast<size_t>(i)] = Bit::of(g.named("a" + std::to_string(i)));
    for (int i = 0; i < n; ++i) b[static_cast<size_t>(i)] = Bit::of(g.named("b" + std::to_string(i)));
    Bit cin = Bit::of(g.named("cin"));
    for (const auto& v : {a, b})
        for (const Bit& bit : v) g.nl.mark_input(bit.net);
    g.nl.mark_input(cin.net);

    std::vector<Bit> p(static_cast<size_t>(n)), gen(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        p[static_cast<size_t>(i)] =
            g.b_xor(a[static_cast<size_t>(i)], b[static_cast<size_t>(i)], "p" + std::to_string(i));
        gen[static_cast<size_t>(i)] =
            g.b_and(a[static_cast<size_t>(i)], b[static_cast<size_t>(i)], "g" + std::to_string(i));
    }

    // Parallel prefix over columns -1..n-1, column -1 being the carry-in
    // (generate = cin, no propagate). A column is complete once its group
    // reaches the carry-in; complete columns carry no propagate term.
    struct Col {
        Bit G, P;
        bool complete = false;
    };
    std::vector<Col> col(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        col[static_cast<size_t>(i)] = {gen[static_cast<size_t>(i)], p[static_cast<size_t>(i)], false};

    auto carry_name = [&](int i) {
        return i == n - 1 ? std::string("cout") : "c" + std::to_string(i + 1);
    };

    int stage = 1;
    for (int dist = 1;; dist *= 2, ++stage) {
        bool any_incomplete = false;
        std::vector<Col> next = col;
        for (int i = 0; i < n; ++i) {
            const auto idx = static_cast<size_t>(i);
            if (col[idx].complete) continue;
            const int lo = i - dist;
            if (lo < -1) continue;
            const bool lo_complete = lo == -1 || col[static_cast<size_t>(lo)].complete;
            const Bit lo_g = lo == -1 ? cin : col[static_cast<size_t>(lo)].G;
            const std::string tag = std::to_string(i) + "_s" + std::to_string(stage);
            Bit and_term = g.b_and(col[idx].P, lo_g);
            next[idx].G = g.b_or(col[idx].G, and_term, lo_complete ? carry_name(i) : "G" + tag);
            next[idx].complete = lo_complete;
            if (!lo_complete) {
                next[idx].P = g.b_and(col[idx].P, col[static_cast<size_t>(lo)].P, "P" + tag);
                any_incomplete = true;
            }
        }
        col = std::move(next);
        if (!any_incomplete) break;
    }

    // carries: c0 = cin, c_{i+1} = complete generate of column i
    std::vector<Bit> sum(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Bit carry = i == 0 ? cin : col[static_cast<size_t>(i - 1)].G;
        sum[static_cast<size_t>(i)] = g.b_xor(p[static_cast<size_t>(i)], carry, "s" + std::to_string(i));
    }
    for (const Bit& s : sum) g.output(s);
    g.output(col[static_cast<size_t>(n - 1)].G);

    g.nl.finalize();
    return prune_unused(g.nl);
}

Netlist gen_arrmult(int n) {
    if (n < 2) throw std::invalid_argument("multiplier width must be >= 2");
    Gen g;
    std::vector<Bit> a(static_cast<size_t>(n)), b(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) a[static_cast<size_t>(i)] = Bit::of(g.named("a" + std::to_string(i)));
    for (int i = 0; i < n; ++i) b[static_cast<size_t>(i)] = Bit::of(g.named("b" + std::to_string(i)));
    for (const auto& v : {a, b})
        for (const Bit& bit : v) g.nl.mark_input(bit.net);

    auto pp = [&](int i, int j, const std::string& name = {}) {
        return g.b_and(a[static_cast<size_t>(i)], b[static_cast<size_t>(j)],
                       name.empty() ? "pp" + std::to_string(i) + "_" + std::to_string(j) : name);
    };

    std::vector<Bit> prod(static_cast<size_t>(2 * n));
    // acc[k] holds weight j+1+k after processing multiplier bit j
    std::vector<std::optional<Bit>> acc(static_cast<size_t>(n));
    prod[0] = pp(0, 0, "prod0");
    for (int i = 1; i < n; ++i) acc[static_cast<size_t>(i - 1)] = pp(i, 0);
    acc[static_cast<size_t>(n - 1)] = std::nullopt;

    for (int j = 1; j < n; ++j) {
        std::vector<std::optional<Bit>> next(static_cast<size_t>(n));
        std::optional<Bit> carry;
        std::optional<Bit> low_sum;
        for (int k = 0; k < n; ++k) {
            std::vector<Bit> ops;
            if (acc[static_cast<size_t>(k)]) ops.push_back(*acc[static_cast<size_t>(k)]);
            ops.push_back(pp(k, j));
            if (carry) ops.push_back(*carry);
            const std::string sum_name = k == 0 ? "prod" + std::to_string(j) : "";
            Bit sum;
            if (ops.size() == 3) {
                auto [s, c] = g.full_add(ops[0], ops[1], ops[2], sum_name);
                sum = s;
                carry = c;
            } else if (ops.size() == 2) {
                sum = g.b_xor(ops[0], ops[1], sum_name);
                carry = g.b_and(ops[0], ops[1]);
            } else {
                sum = ops[0];
                carry.reset();
            }
            if (k == 0) low_sum = sum;
            else next[static_cast<size_t>(k - 1)] = sum;
        }
        next[static_cast<size_t>(n - 1)] = carry;
        prod[static_cast<size_t>(j)] = *low_sum;
        acc = std::move(next);
    }
    for (int k = 0; k < n; ++k) {
        if (!acc[static_cast<size_t>(k)])
            throw NetlistError("multiplier accumulator bit missing");
        prod[static_cast<size_t>(n + k)] = *acc[static_cast<size_t>(k)];
    }
    for (const Bit& bit : prod) g.output(bit);

    g.nl.finalize();
    return prune_unused(g.nl);
}

Netlist gen_intdiv(int n) {
    if (n < 2) throw std::invalid_argument("divider width must be >= 2");
    Gen g;
    std::vector<Bit> d(static_cast<size_t>(n)), v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) d[static_cast<size_t>(i)] = Bit::of(g.named("d" + std::to_string(i)));
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = Bit::of(g.named("v" + std::to_string(i)));
    for (const auto& bits : {d, v})
        for (const Bit& bit : bits) g.nl.mark_input(bit.net);

    const int w = n + 2; // signed partial remainder width
    auto vbit = [&](int i) { return i < n ? v[static_cast<size_t>(i)] : Bit::zero(); };

    std::vector<Bit> r(static_cast<size_t>(w), Bit::zero());
    std::vector<Bit> q(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        // non-restoring step: subtract the divisor while the partial
        // remainder is non-negative, add it back otherwise
        Bit t = g.b_not(r[static_cast<size_t>(w - 1)]);
        std::vector<Bit> shifted(static_cast<size_t>(w));
        shifted[0] = d[static_cast<size_t>(n - 1 - k)];
        for (int i = 1; i < w; ++i) shifted[static_cast<size_t>(i)] = r[static_cast<size_t>(i - 1)];
        Bit carry = t;
        for (int i = 0; i < w; ++i) {
            Bit y = g.b_xor(vbit(i), t);
            auto [s, c] = g.full_add(shifted[static_cast<size_t>(i)], y, carry);
            r[static_cast<size_t>(i)] = s;
            carry = c;
        }
        q[static_cast<size_t>(n - 1 - k)] =
            g.b_not(r[static_cast<size_t>(w - 1)], "q" + std::to_string(n - 1 - k));
    }

    // final restore: R = r + (V & sign)
    Bit sign = r[static_cast<size_t>(w - 1)];
    std::vector<Bit> rem(static_cast<size_t>(w));
    Bit carry = Bit::zero();
    for (int i = 0; i < w; ++i) {
        Bit y = g.b_and(vbit(i), sign);
        auto [s, c] = g.full_add(r[static_cast<size_t>(i)], y, carry,
                                 i < n ? "r" + std::to_string(i) : "");
        rem[static_cast<size_t>(i)] = s;
        carry = c;
    }

    for (const Bit& bit : q) g.output(bit);
    for (int i = 0; i < n; ++i) g.output(rem[static_cast<size_t>(i)]);

    g.nl.finalize();
    return prune_unused(g.nl);
}

Netlist c17() {
    Netlist nl;
    const NetId n1 = nl.add_net("1"), n2 = nl.add_net("2"), n3 = nl.add_net("3");
    const NetId n6 = nl.add_net("6"), n7 = nl.add_net("7");
    const NetId n10 = nl.add_net("10"), n11 = nl.add_net("11"), n16 = nl.add_net("16");
    const NetId n19 = nl.add_net("19"), n22 = nl.add_net("22"), n23 = nl.add_net("23");
    for (NetId n : {n1, n2, n3, n6, n7}) nl.mark_input(n);
    nl.mark_output(n22);
    nl.mark_output(n23);
    nl.add_gate2(GateKind::Nand2, n1, n3, n10);
    nl.add_gate2(GateKind::Nand2, n3, n6, n11);
    nl.add_gate2(GateKind::Nand2, n2, n11, n16);
    nl.add_gate2(GateKind::Nand2, n11, n7, n19);
    nl.add_gate2(GateKind::Nand2, n10, n16, n22);
    nl.add_gate2(GateKind::Nand2, n16, n19, n23);
    nl.finalize();
    return nl;
}

Netlist sfq_map(const Netlist& logical) {
    Netlist nl = logical;
    size_t counter = 0;
    auto fresh = [&](const std::string& base) {
        for (;;) {
            std::string name = base + "_a" + std::to_string(counter++);
            if (!nl.find_net(name)) return nl.add_net(std::move(name));
        }
    };
    const size_t n_gates = logical.n_gates();
    for (GateId id = 0; id < n_gates; ++id) {
        const GateKind kind = nl.gate(id).kind;
        if (kind != GateKind::Nand2 && kind != GateKind::Nor2) continue;
        const NetId out = nl.gate(id).output;
        const NetId mid = fresh(logical.net_name(out));
        nl.set_gate_kind(id, kind == GateKind::Nand2 ? GateKind::And2 : GateKind::Or2);
        nl.set_gate_output(id, mid);
        nl.add_gate1(GateKind::Inv, mid, out);
    }
    nl.finalize();
    return insert_balancing_dffs(insert_splitter_trees(nl).netlist).netlist;
}

Netlist gen_logical(Family family, int width) {
    switch (family) {
    case Family::Ksa: return gen_ksa(width);
    case Family::ArrMult: return gen_arrmult(width);
    case Family::IntDiv: return gen_intdiv(width);
    default: return c17();
    }
}

Netlist build_benchmark(const BenchmarkSpec& spec) {
    Netlist golden = sfq_map(gen_logical(spec.family, spec.width));
    if (spec.variant == Variant::Golden) return golden;
    MutantSpec mutant;
    mutant.kind = spec.variant == Variant::Fanout ? MutantKind::FanoutBug
                                                  : MutantKind::UnbalanceBug;
    mutant.seed = spec.seed;
    return make_mutant(golden, mutant).netlist;
}

namespace {

uint64_t bits_to_u64(std::span<const uint8_t> bits, size_t offset, size_t count) {
    uint64_t value = 0;
    for (size_t i = 0; i < count; ++i)
        value |= static_cast<uint64_t>(bits[offset + i] & 1) << i;
    return value;
}

void u64_to_bits(uint64_t value, std::vector<uint8_t>& out, size_t count) {
    for (size_t i = 0; i < count; ++i) out.push_back(static_cast<uint8_t>((value >> i) & 1));
}

} // namespace

std::vector<uint8_t> behavioral(Family family, int width, std::span<const uint8_t> pi) {
    const auto n = static_cast<size_t>(width);
    std::vector<uint8_t> out;
    switch (family) {
    case Family::Ksa: {
        if (pi.size() != 2 * n + 1) throw std::invalid_argument("adder PI width mismatch");
        const uint64_t sum = bits_to_u64(pi, 0, n) + bits_to_u64(pi, n, n) + pi[2 * n];
        u64_to_bits(sum, out, n + 1);
        return out;
    }
    case Family::ArrMult: {
        if (pi.size() != 2 * n) throw std::invalid_argument("multiplier PI width mismatch");
        const uint64_t prod = bits_to_u64(pi, 0, n) * bits_to_u64(pi, n, n);
        u64_to_bits(prod, out, 2 * n);
        return out;
    }
    case Family::IntDiv: {
        if (pi.size() != 2 * n) throw std::invalid_argument("divider PI width mismatch");
        const uint64_t dividend = bits_to_u64(pi, 0, n);
        const uint64_t divisor = bits_to_u64(pi, n, n);
        // division by zero: quotient all-ones, remainder = dividend
        const uint64_t q = divisor == 0 ? (1ull << n) - 1 : dividend / divisor;
        const uint64_t r = divisor == 0 ? dividend : dividend % divisor;
        u64_to_bits(q, out, n);
        u64_to_bits(r, out, n);
        return out;
    }
    case Family::C17: {
        if (pi.size() != 5) throw std::invalid_argument("c17 PI width mismatch");
        const uint8_t i1 = pi[0], i2 = pi[1], i3 = pi[2], i6 = pi[3], i7 = pi[4];
        const uint8_t g10 = !(i1 & i3), g11 = !(i3 & i6);
        const uint8_t g16 = !(i2 & g11), g19 = !(g11 & i7);
        out.push_back(static_cast<uint8_t>(!(g10 & g16)));
        out.push_back(static_cast<uint8_t>(!(g16 & g19)));
        return out;
    }
    }
    throw std::logic_error("unknown family");
}

namespace {

uint64_t fnv1a(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (char c : s) {
        h ^= static_cast<uint8_t>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

// published target latencies for the suite circuits (informational except
// for the KSA family, whose latency law 2*log2(n)+2 is enforced in tests)
std::optional<uint32_t> reference_latency(Family family, int width) {
    switch (family) {
    case Family::Ksa:
        if (width == 4) return 6;
        if (width == 8) return 8;
        if (width == 16) return 10;
        if (width == 32) return 12;
        return std::nullopt;
    case Family::ArrMult:
        if (width == 4) return 16;
        if (width == 8) return 40;
        if (width == 16) return 88;
        return std::nullopt;
    case Family::IntDiv:
        if (width == 4) return 27;
        if (width == 8) return 93;
        return std::nullopt;
    default: return 4;
    }
}

} // namespace

SuiteManifest gen_benchmark_suite(const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    std::vector<BenchmarkSpec> specs;
    for (const Family family : {Family::Ksa, Family::ArrMult, Family::IntDiv, Family::C17})
        for (const Variant variant : {Variant::Golden, Variant::Fanout, Variant::Unbalanced})
            specs.push_back({family, family == Family::C17 ? 0 : 4, variant, 0});
    for (const int n : {8, 16, 32}) specs.push_back({Family::Ksa, n, Variant::Golden, 0});
    for (const int n : {8, 16}) specs.push_back({Family::ArrMult, n, Variant::Golden, 0});
    specs.push_back({Family::IntDiv, 8, Variant::Golden, 0});

    SuiteManifest manifest;
    nlohmann::json jcircuits = nlohmann::json::array();
    for (BenchmarkSpec spec : specs) {
        spec.seed = fnv1a(spec.name());
        const Netlist net = build_benchmark(spec);
        const std::string file = spec.name() + ".bench";
        write_bench_file(net, (fs::path(out_dir) / file).string());

        SuiteEntry entry{spec, file, net.stats()};
        manifest.entries.push_back(entry);

        nlohmann::json j;
        j["name"] = spec.name();
        j["file"] = file;
        j["family"] = std::string(family_name(spec.family));
        if (spec.family != Family::C17) j["width"] = spec.width;
        j["variant"] = std::string(variant_name(spec.variant));
        j["seed"] = spec.seed;
        j["stats"] = {{"primary_inputs", entry.stats.n_primary_inputs},
                      {"primary_outputs", entry.stats.n_primary_outputs},
                      {"dffs", entry.stats.n_dffs},
                      {"splitters", entry.stats.n_splitters},
                      {"logic_gates", entry.stats.n_logic_gates},
                      {"nets", entry.stats.n_nets},
                      {"latency", entry.stats.latency}};
        if (spec.variant == Variant::Golden) {
            if (const auto ref = reference_latency(spec.family, spec.width))
                j["reference_latency"] = *ref;
        }
        j["expected"] = {
            {"fanout", spec.variant == Variant::Fanout ? "fanout_error" : "pass"},
            {"path_balance",
             spec.variant == Variant::Unbalanced ? "path_balance_error" : "pass"}};
        jcircuits.push_back(j);
    }

    nlohmann::json jmanifest;
    jmanifest["version"] = "0.1.0";
    jmanifest["divide_by_zero"] = "quotient all-ones, remainder = dividend";
    jmanifest["circuits"] = jcircuits;
    std::ofstream out(fs::path(out_dir) / "manifest.json", std::ios::binary);
    out << jmanifest.dump(2) << "\n";
    return manifest;
}

} // namespace sfqv
