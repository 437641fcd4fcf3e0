#include "smemsynth/sim.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <queue>
#include <random>
#include <sstream>
#include <unordered_set>

#include "smemsynth/common.hpp"
#include "smemsynth/explorer.hpp"
#include "smemsynth/floorplan.hpp"
#include "smemsynth/report.hpp"

namespace smemsynth {

// ---------------------------------------------------------------------------
// Trace I/O

void SimTrace::validate() const {
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        if (cycles[i].cycle < 0)
            throw SimError("negative cycle stamp");
        if (i > 0 && cycles[i].cycle <= cycles[i - 1].cycle)
            throw SimError("cycle stamps must be strictly increasing (cycle " + std::to_string(cycles[i].cycle) + ")");
    }
}

namespace {

std::uint64_t parse_u64(const std::string& s, int base, const std::string& where) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        if (s.empty() || s[0] == '-' || s[0] == '+')
            throw std::invalid_argument(s);
        v = std::stoull(s, &pos, base);
    } catch (const std::exception&) {
        throw ParseError(where, "bad number '" + s + "'");
    }
    if (pos != s.size())
        throw ParseError(where, "bad number '" + s + "'");
    return v;
}

std::string hex(std::uint64_t v, int width_bits) {
    static const char* digits = "0123456789abcdef";
    int n = std::max(1, (width_bits + 3) / 4);
    std::string s(static_cast<std::size_t>(n), '0');
    for (int i = n - 1; i >= 0; --i, v >>= 4)
        s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return s;
}

std::string hex_min(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << v;
    return os.str();
}

} // namespace

SimTrace parse_trace(const std::string& text, const std::string& origin) {
    SimTrace t;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    std::int64_t next = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string where = origin + ":" + std::to_string(lineno);
        if (auto h = line.find('#'); h != std::string::npos)
            line.erase(h);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string s; ls >> s;)
            tok.push_back(s);
        if (tok.empty())
            continue;
        TraceCycle c;
        c.cycle = next;
        std::size_t i = 0;
        if (tok[0][0] == '@') {
            auto stamp = static_cast<std::int64_t>(parse_u64(tok[0].substr(1), 10, where));
            if (stamp < next)
                throw ParseError(where, "cycle stamp " + std::to_string(stamp) + " is not increasing");
            c.cycle = stamp;
            i = 1;
        }
        bool idle = false;
        while (i < tok.size()) {
            const auto& op = tok[i];
            auto arg = [&](std::size_t k) -> const std::string& {
                if (i + k >= tok.size() || tok[i + k] == ";")
                    throw ParseError(where, "'" + op + "' is missing an operand");
                return tok[i + k];
            };
            std::size_t used = 0;
            if (op == "W") {
                if (c.write)
                    throw ParseError(where, "two writes in one cycle");
                c.write = WriteOp{parse_u64(arg(1), 10, where), parse_u64(arg(2), 16, where)};
                used = 3;
            } else if (op == "R") {
                if (c.read)
                    throw ParseError(where, "two reads in one cycle");
                c.read = ReadOp{parse_u64(arg(1), 10, where)};
                used = 2;
            } else if (op == "WIN") {
                if (c.window)
                    throw ParseError(where, "two window reads in one cycle");
                c.window = WindowOp{parse_u64(arg(1), 10, where), parse_u64(arg(2), 10, where)};
                used = 3;
            } else if (op == "IDLE") {
                idle = true;
                used = 1;
            } else {
                throw ParseError(where, "unknown op '" + op + "'");
            }
            i += used;
            if (i < tok.size()) {
                if (tok[i] != ";")
                    throw ParseError(where, "expected ';' between ops");
                ++i;
            }
        }
        if (idle && (c.write || c.read || c.window))
            throw ParseError(where, "IDLE cannot share a cycle with other ops");
        if (c.write || c.read || c.window)
            t.cycles.push_back(c);
        next = c.cycle + 1;
    }
    return t;
}

std::string trace_to_text(const SimTrace& trace) {
    trace.validate();
    std::ostringstream os;
    std::int64_t next = 0;
    for (const auto& c : trace.cycles) {
        if (c.cycle != next)
            os << "@" << c.cycle << " ";
        std::vector<std::string> ops;
        if (c.write)
            ops.push_back("W " + std::to_string(c.write->addr) + " " + hex_min(c.write->data));
        if (c.read)
            ops.push_back("R " + std::to_string(c.read->addr));
        if (c.window)
            ops.push_back("WIN " + std::to_string(c.window->x) + " " + std::to_string(c.window->y));
        if (ops.empty())
            ops.push_back("IDLE");
        for (std::size_t i = 0; i < ops.size(); ++i)
            os << (i ? " ; " : "") << ops[i];
        os << "\n";
        next = c.cycle + 1;
    }
    return os.str();
}

SimTrace load_trace(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_trace(ss.str(), path);
}

SimTrace random_trace(const NetlistIR& ir, std::size_t ops, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    SimTrace t;
    const auto* raddr = ir.find_port("raddr");
    const auto* px = ir.find_port("x");
    const auto* py = ir.find_port("y");
    const auto* wd = ir.find_port("wdata");
    if (!wd || (!raddr && !(px && py)))
        throw SimError("netlist has neither a 1R-1W nor a parallel-access port set");
    const std::uint64_t dmask = width_mask(wd->width);
    for (std::size_t i = 0; i < ops; ++i) {
        TraceCycle c;
        c.cycle = static_cast<std::int64_t>(i);
        const auto kind = rng() % 4;
        if (raddr) {
            const std::uint64_t amask = width_mask(raddr->width);
            if (kind != 1)
                c.write = WriteOp{rng() & amask, rng() & dmask};
            if (kind != 0)
                c.read = ReadOp{rng() & amask};
        } else if (kind < 2) {
            c.write = WriteOp{rng() & width_mask(px->width + py->width), rng() & dmask};
        } else {
            c.window = WindowOp{rng() & width_mask(px->width), rng() & width_mask(py->width)};
        }
        t.cycles.push_back(c);
    }
    return t;
}

// ---------------------------------------------------------------------------
// Simulator core

namespace {

struct Rt {
    CellKind kind;
    std::size_t cell;
    std::vector<int> ins;  // kind-specific order, -1 when a pin is absent
    std::vector<int> outs; // kind-specific order
    std::vector<std::int64_t> p;
};

struct ArrayState {
    std::size_t rt;
    int B, W;
    std::vector<std::uint64_t> mem;
    std::uint64_t q;
    bool oe = false;
    std::uint64_t reads = 0, writes = 0;
    int group = 0; // bank group for conflict accounting
    bool fired = false;
};

class Machine {
  public:
    explicit Machine(const NetlistIR& ir) : ir_(ir) {
        for (std::size_t i = 0; i < ir.nets.size(); ++i) {
            if (ir.nets[i].width > 64)
                throw SimError("net " + ir.nets[i].name + " is wider than 64 bits");
            net_[ir.nets[i].name] = static_cast<int>(i);
        }
        val_.assign(ir.nets.size(), 0);
        tri_.assign(ir.nets.size(), 0);
        driven_.assign(ir.nets.size(), 0);

        std::map<std::pair<std::string, std::string>, int> conn;
        for (std::size_t i = 0; i < ir.nets.size(); ++i) {
            for (const auto& r : ir.nets[i].drivers)
                conn[{r.cell, r.pin}] = static_cast<int>(i);
            for (const auto& r : ir.nets[i].sinks)
                conn[{r.cell, r.pin}] = static_cast<int>(i);
        }
        std::map<std::string, int> groups;
        for (std::size_t ci = 0; ci < ir.cells.size(); ++ci) {
            const auto& c = ir.cells[ci];
            const auto id = c.id();
            auto pin = [&](const std::string& name) {
                auto it = conn.find({id, name});
                return it == conn.end() ? -1 : it->second;
            };
            Rt rt{c.kind, ci, {}, {}, {}};
            auto P = [&](const char* k) { return c.param(k); };
            switch (c.kind) {
            case CellKind::BAPlus: {
                rt.ins = {pin("rwl"), pin("wwl"), pin("wd"), pin("wm")};
                rt.outs = {pin("q"), pin("oe")};
                ArrayState a{rts_.size(), static_cast<int>(P("B")), static_cast<int>(P("W")), {}, 0};
                a.mem.assign(static_cast<std::size_t>(a.B), width_mask(a.W));
                a.q = width_mask(a.W);
                auto root = c.scope.substr(0, c.scope.find('/'));
                a.group = groups.emplace(root, static_cast<int>(groups.size())).first->second;
                arrays_.push_back(std::move(a));
                break;
            }
            case CellKind::Decoder: {
                rt.ins = {pin("a")};
                rt.p = {P("lo"), P("n"), c.param_or("split", 0)};
                if (rt.p[2])
                    for (int i = 0; i < (1 << rt.p[1]); ++i)
                        rt.outs.push_back(pin("y" + std::to_string(i)));
                else
                    rt.outs = {pin("y")};
                break;
            }
            case CellKind::WordlineGate:
                rt.ins = {pin("lines"), pin("en")};
                for (std::int64_t i = 0; i < P("sels"); ++i)
                    rt.ins.push_back(pin("s" + std::to_string(i)));
                rt.outs = {pin("wl")};
                break;
            case CellKind::TristateDriver:
                rt.ins = {pin("d"), pin("en")};
                rt.outs = {pin("y")};
                break;
            case CellKind::ColumnMux: {
                rt.p = {P("dir"), P("ways"), P("inputs"), P("in_w"), P("out_w"), P("sel_lo")};
                const auto inputs = rt.p[2];
                if (rt.p[0] == 0) {
                    for (std::int64_t i = 0; i < inputs; ++i)
                        rt.ins.push_back(pin("d" + std::to_string(i)));
                    rt.ins.push_back(pin("sel"));
                    rt.outs = {pin("y")};
                } else {
                    rt.ins = {pin("d"), pin("sel")};
                    for (std::int64_t i = 0; i < inputs; ++i)
                        rt.outs.push_back(pin("wd" + std::to_string(i)));
                    for (std::int64_t i = 0; i < inputs; ++i)
                        rt.outs.push_back(pin("wm" + std::to_string(i)));
                }
                if (rt.p[4] > 64 || rt.p[3] > 64)
                    throw SimError("cell " + id + " is wider than 64 bits");
                break;
            }
            case CellKind::OutputReg:
                rt.ins = {pin("d"), pin("en")};
                rt.outs = {pin("q")};
                rt.p = {P("lo"), P("width"), c.param_or("en", 0), 0};
                regs_.push_back(rts_.size());
                break;
            case CellKind::PaIncrement: {
                rt.p = {P("mode"), P("m"), P("n"), P("a"), P("b"), P("p"), P("q"), c.param_or("xgroup", 1)};
                if (rt.p[0] == 0) {
                    rt.ins = {pin("xl"), pin("yl"), pin("x"), pin("y")};
                    const auto X = std::int64_t{1} << (rt.p[1] - rt.p[3]), Y = std::int64_t{1} << (rt.p[2] - rt.p[4]);
                    for (std::int64_t k = 0; k < X / rt.p[7]; ++k)
                        rt.outs.push_back(pin("xo" + std::to_string(k)));
                    for (std::int64_t j = 0; j < Y; ++j)
                        rt.outs.push_back(pin("yo" + std::to_string(j)));
                } else {
                    rt.ins = {pin("x"), pin("y")};
                    rt.outs = {pin("addr")};
                }
                rt.outs.push_back(pin("hit"));
                break;
            }
            case CellKind::PaAlign: {
                rt.p = {P("m"), P("n"), P("a"), P("b"), c.param_or("clamp", 0)};
                for (int p = 0; p < (1 << rt.p[2]); ++p)
                    for (int q = 0; q < (1 << rt.p[3]); ++q)
                        rt.ins.push_back(pin("d" + std::to_string(p) + "_" + std::to_string(q)));
                rt.ins.push_back(pin("x"));
                rt.ins.push_back(pin("y"));
                for (int i = 0; i < (1 << rt.p[2]); ++i)
                    for (int j = 0; j < (1 << rt.p[3]); ++j)
                        rt.outs.push_back(pin("pix" + std::to_string(i) + "_" + std::to_string(j)));
                break;
            }
            case CellKind::And:
            case CellKind::Or:
                for (std::int64_t i = 0; i < P("n"); ++i)
                    rt.ins.push_back(pin("i" + std::to_string(i)));
                rt.outs = {pin("y")};
                break;
            case CellKind::Inv:
                rt.ins = {pin("a")};
                rt.outs = {pin("y")};
                break;
            }
            if (c.kind == CellKind::TristateDriver)
                for (int o : rt.outs)
                    if (o >= 0)
                        tri_[static_cast<std::size_t>(o)] = 1;
            rts_.push_back(std::move(rt));
        }
        groups_ = static_cast<int>(groups.size());
        order();
    }

    int net(const std::string& name) const {
        auto it = net_.find(name);
        if (it == net_.end())
            throw SimError("netlist has no net " + name);
        return it->second;
    }
    void set(int n, std::uint64_t v) { val_[static_cast<std::size_t>(n)] = v & width_mask(width(n)); }
    std::uint64_t get(int n) const { return n < 0 ? 0 : val_[static_cast<std::size_t>(n)]; }
    int width(int n) const { return ir_.nets[static_cast<std::size_t>(n)].width; }

    // Combinational settle for the current inputs and register state.
    void evaluate() {
        for (const auto& a : arrays_) {
            const auto& rt = rts_[a.rt];
            put(rt.outs[0], a.q);
            put(rt.outs[1], a.oe ? 1 : 0);
        }
        for (auto r : regs_)
            put(rts_[r].outs[0], static_cast<std::uint64_t>(rts_[r].p[3]));
        for (std::size_t i = 0; i < val_.size(); ++i)
            if (tri_[i]) {
                val_[i] = 0;
                driven_[i] = 0;
            }
        for (auto r : comb_)
            eval(rts_[r]);
    }

    // Rising clock edge. Returns the number of bank groups that did not fire
    // exactly one array on the read side.
    int edge() {
        std::vector<int> per_group(static_cast<std::size_t>(groups_), 0);
        for (auto& a : arrays_) {
            const auto& rt = rts_[a.rt];
            const std::uint64_t rwl = get(rt.ins[0]), wwl = get(rt.ins[1]);
            if (std::popcount(rwl) > 1 || std::popcount(wwl) > 1)
                throw SimError("cell " + ir_.cells[rt.cell].id() + " has more than one active wordline");
            a.fired = rwl != 0;
            if (rwl) {
                a.q = a.mem[static_cast<std::size_t>(std::countr_zero(rwl))];
                a.oe = true;
                ++a.reads;
                ++per_group[static_cast<std::size_t>(a.group)];
            } else {
                a.oe = false;
            }
            if (wwl) {
                auto& row = a.mem[static_cast<std::size_t>(std::countr_zero(wwl))];
                const std::uint64_t wd = get(rt.ins[2]);
                const std::uint64_t wm = rt.ins[3] < 0 ? width_mask(a.W) : get(rt.ins[3]);
                row = (row & ~wm) | (wd & wm);
                ++a.writes;
            }
        }
        for (auto r : regs_) {
            auto& rt = rts_[r];
            if (rt.p[2] == 0 || get(rt.ins[1]))
                rt.p[3] = static_cast<std::int64_t>((get(rt.ins[0]) >> rt.p[0]) & width_mask(static_cast<int>(rt.p[1])));
        }
        return static_cast<int>(std::count_if(per_group.begin(), per_group.end(), [](int n) { return n != 1; }));
    }

    std::map<std::string, CellActivity> activity() const {
        std::map<std::string, CellActivity> out;
        for (const auto& a : arrays_)
            out[ir_.cells[rts_[a.rt].cell].id()] = {a.B, a.W, a.reads, a.writes};
        return out;
    }

  private:
    void put(int n, std::uint64_t v) {
        if (n < 0)
            return;
        auto i = static_cast<std::size_t>(n);
        if (tri_[i]) {
            if (driven_[i])
                throw SimError("bus contention on net " + ir_.nets[i].name);
            driven_[i] = 1;
        }
        val_[i] = v & width_mask(ir_.nets[i].width);
    }

    void eval(const Rt& rt) {
        switch (rt.kind) {
        case CellKind::Decoder: {
            const std::uint64_t v = (get(rt.ins[0]) >> rt.p[0]) & width_mask(static_cast<int>(rt.p[1]));
            if (rt.p[2])
                for (std::size_t i = 0; i < rt.outs.size(); ++i)
                    put(rt.outs[i], v == i ? 1 : 0);
            else
                put(rt.outs[0], std::uint64_t{1} << v);
            break;
        }
        case CellKind::WordlineGate: {
            bool on = get(rt.ins[1]) != 0;
            for (std::size_t i = 2; i < rt.ins.size() && on; ++i)
                on = get(rt.ins[i]) != 0;
            put(rt.outs[0], on ? get(rt.ins[0]) : 0);
            break;
        }
        case CellKind::TristateDriver:
            if (get(rt.ins[1]))
                put(rt.outs[0], get(rt.ins[0]));
            break;
        case CellKind::ColumnMux:
            eval_mux(rt);
            break;
        case CellKind::PaIncrement:
            eval_inc(rt);
            break;
        case CellKind::PaAlign: {
            const auto m = rt.p[0], n = rt.p[1], a = rt.p[2], b = rt.p[3];
            const std::size_t nb = std::size_t{1} << (a + b);
            const auto x = static_cast<std::int64_t>(get(rt.ins[nb])), y = static_cast<std::int64_t>(get(rt.ins[nb + 1]));
            const std::int64_t xmax = (std::int64_t{1} << m) - 1, ymax = (std::int64_t{1} << n) - 1;
            std::size_t o = 0;
            for (std::int64_t i = 0; i < (std::int64_t{1} << a); ++i)
                for (std::int64_t j = 0; j < (std::int64_t{1} << b); ++j) {
                    std::int64_t ii = i, jj = j;
                    if (rt.p[4]) {
                        ii = std::min(ii, xmax - x);
                        jj = std::min(jj, ymax - y);
                    }
                    const std::int64_t bp = (x + ii) & ((std::int64_t{1} << a) - 1);
                    const std::int64_t bq = (y + jj) & ((std::int64_t{1} << b) - 1);
                    put(rt.outs[o++], get(rt.ins[static_cast<std::size_t>((bp << b) + bq)]));
                }
            break;
        }
        case CellKind::And: {
            bool v = true;
            for (int i : rt.ins)
                v = v && get(i);
            put(rt.outs[0], v);
            break;
        }
        case CellKind::Or: {
            bool v = false;
            for (int i : rt.ins)
                v = v || get(i);
            put(rt.outs[0], v);
            break;
        }
        case CellKind::Inv:
            put(rt.outs[0], get(rt.ins[0]) ? 0 : 1);
            break;
        case CellKind::BAPlus:
        case CellKind::OutputReg:
            break;
        }
    }

    void eval_mux(const Rt& rt) {
        const auto ways = rt.p[1], inputs = rt.p[2], in_w = rt.p[3], out_w = rt.p[4];
        const int mb = ilog2(static_cast<std::uint64_t>(ways));
        const int sel_pin = rt.p[0] == 0 ? static_cast<int>(inputs) : 1;
        const std::int64_t sel =
            ways > 1 ? static_cast<std::int64_t>((get(rt.ins[static_cast<std::size_t>(sel_pin)]) >> rt.p[5]) & width_mask(mb)) : 0;
        const std::int64_t start = sel * out_w;
        if (rt.p[0] == 0) {
            // y = (d_{inputs-1} ... d_0)[start +: out_w]
            std::uint64_t y = 0;
            for (std::int64_t i = 0; i < inputs; ++i) {
                const std::int64_t lo = i * in_w, hi = lo + in_w;
                const std::int64_t a = std::max(lo, start), b = std::min(hi, start + out_w);
                if (a >= b)
                    continue;
                const std::uint64_t part = (get(rt.ins[static_cast<std::size_t>(i)]) >> (a - lo)) & width_mask(static_cast<int>(b - a));
                y |= part << (a - start);
            }
            put(rt.outs[0], y);
        } else {
            const std::uint64_t d = get(rt.ins[0]);
            for (std::int64_t i = 0; i < inputs; ++i) {
                const std::int64_t lo = i * in_w;
                // wd_i = {ways{d}}[lo +: in_w]
                std::uint64_t wd = 0;
                for (std::int64_t k = 0; k < in_w; ++k)
                    wd |= ((d >> ((lo + k) % out_w)) & 1) << k;
                const std::int64_t a = std::max(lo, start), b = std::min(lo + in_w, start + out_w);
                const std::uint64_t wm = a < b ? width_mask(static_cast<int>(b - a)) << (a - lo) : 0;
                put(rt.outs[static_cast<std::size_t>(i)], wd);
                put(rt.outs[static_cast<std::size_t>(inputs + i)], wm);
            }
        }
    }

    void eval_inc(const Rt& rt) {
        const auto m = rt.p[1], n = rt.p[2], a = rt.p[3], b = rt.p[4], p = rt.p[5], q = rt.p[6];
        const bool mode0 = rt.p[0] == 0;
        const std::size_t xi = mode0 ? 2 : 0;
        const std::uint64_t x = get(rt.ins[xi]), y = get(rt.ins[xi + 1]);
        const auto xlow = static_cast<std::int64_t>(x & width_mask(static_cast<int>(a)));
        const auto ylow = static_cast<std::int64_t>(y & width_mask(static_cast<int>(b)));
        const bool cx = xlow > p, cy = ylow > q;
        const int xb = static_cast<int>(m - a), yb = static_cast<int>(n - b);
        if (mode0) {
            auto rotl = [](std::uint64_t v, int bits) {
                const int L = 1 << bits;
                return L == 1 ? v : (((v << 1) | (v >> (L - 1))) & width_mask(L));
            };
            const std::uint64_t xr = cx ? rotl(get(rt.ins[0]), xb) : get(rt.ins[0]);
            const std::uint64_t yr = cy ? rotl(get(rt.ins[1]), yb) : get(rt.ins[1]);
            const auto g = rt.p[7];
            const std::size_t groups = static_cast<std::size_t>((std::int64_t{1} << xb) / g);
            for (std::size_t k = 0; k < groups; ++k)
                put(rt.outs[k], (xr >> (static_cast<std::int64_t>(k) * g)) & width_mask(static_cast<int>(g)));
            for (std::size_t j = 0; j < (std::size_t{1} << yb); ++j)
                put(rt.outs[groups + j], (yr >> j) & 1);
        } else {
            const std::uint64_t xa = ((x >> a) + (cx ? 1 : 0)) & width_mask(xb);
            const std::uint64_t ya = ((y >> b) + (cy ? 1 : 0)) & width_mask(yb);
            put(rt.outs[0], (xa << yb) | ya);
        }
        put(rt.outs.back(), xlow == p && ylow == q ? 1 : 0);
    }

    // Topological order of the combinational cells.
    void order() {
        std::vector<std::vector<std::size_t>> succ(rts_.size());
        std::vector<int> indeg(rts_.size(), 0);
        std::vector<int> comb(rts_.size(), 0);
        for (std::size_t i = 0; i < rts_.size(); ++i)
            comb[i] = rts_[i].kind != CellKind::BAPlus && rts_[i].kind != CellKind::OutputReg;
        std::map<std::string, std::size_t> by_id;
        for (std::size_t i = 0; i < rts_.size(); ++i)
            by_id[ir_.cells[rts_[i].cell].id()] = i;
        for (const auto& n : ir_.nets)
            for (const auto& d : n.drivers) {
                auto di = by_id.find(d.cell);
                if (di == by_id.end() || !comb[di->second])
                    continue;
                for (const auto& s : n.sinks) {
                    auto si = by_id.find(s.cell);
                    if (si == by_id.end() || !comb[si->second])
                        continue;
                    succ[di->second].push_back(si->second);
                    ++indeg[si->second];
                }
            }
        std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
        std::size_t total = 0;
        for (std::size_t i = 0; i < rts_.size(); ++i)
            if (comb[i]) {
                ++total;
                if (indeg[i] == 0)
                    ready.push(i);
            }
        while (!ready.empty()) {
            auto i = ready.top();
            ready.pop();
            comb_.push_back(i);
            for (auto s : succ[i])
                if (--indeg[s] == 0)
                    ready.push(s);
        }
        if (comb_.size() != total)
            throw SimError("combinational loop in netlist");
    }

    const NetlistIR& ir_;
    std::map<std::string, int> net_;
    std::vector<std::uint64_t> val_;
    std::vector<char> tri_, driven_;
    std::vector<Rt> rts_;
    std::vector<ArrayState> arrays_;
    std::vector<std::size_t> regs_; // output_reg runtimes; p[3] holds the state
    std::vector<std::size_t> comb_;
    int groups_ = 0;
};

void warn(SimResult& r, const std::string& msg) {
    if (r.warnings.size() < 20)
        r.warnings.push_back(msg);
}

} // namespace

SimResult simulate(const NetlistIR& ir, const SimTrace& trace) {
    trace.validate();
    Machine mc(ir);
    SimResult r;
    r.attrs = ir.attrs;

    const bool sram = ir.find_port("raddr") != nullptr;
    const bool pa = !sram && ir.find_port("x") && ir.find_port("y");
    if (!sram && !pa)
        throw SimError("netlist has neither a 1R-1W nor a parallel-access port set");

    std::vector<int> outs;
    int data_w = 0;
    for (const auto& p : ir.ports)
        if (p.dir == PinDir::Out) {
            outs.push_back(mc.net(p.name));
            data_w = p.width;
        }
    r.data_width = data_w;

    int m = 0, n = 0, a = 0, b = 0;
    bool clamp = false;
    std::uint64_t words = 0;
    if (sram) {
        words = std::uint64_t{1} << ir.find_port("raddr")->width;
    } else {
        m = ir.find_port("x")->width;
        n = ir.find_port("y")->width;
        for (const auto& c : ir.cells)
            if (c.kind == CellKind::PaAlign) {
                a = static_cast<int>(c.param("a"));
                b = static_cast<int>(c.param("b"));
                clamp = c.param_or("clamp", 0) != 0;
            }
        words = std::uint64_t{1} << (m + n);
    }
    const int wd_w = ir.find_port("wdata") ? ir.find_port("wdata")->width : 0;
    auto in = [&](const char* name) { return ir.find_port(name) ? mc.net(name) : -1; };
    const int p_re = in("re"), p_we = in("we"), p_raddr = in("raddr"), p_waddr = in("waddr"), p_wdata = in("wdata"),
              p_x = in("x"), p_y = in("y");
    auto drive = [&](int net, std::uint64_t v) {
        if (net >= 0)
            mc.set(net, v);
    };

    std::unordered_set<std::uint64_t> written;
    const std::int64_t last = trace.cycles.empty() ? -1 : trace.cycles.back().cycle;
    std::size_t next = 0;
    bool pending = false;
    for (std::int64_t t = 0;; ++t) {
        if (t > last && !pending)
            break;
        const TraceCycle* op = nullptr;
        if (next < trace.cycles.size() && trace.cycles[next].cycle == t)
            op = &trace.cycles[next++];
        const std::string at = "cycle " + std::to_string(t) + ": ";

        bool re = false, we = false;
        std::uint64_t raddr = 0, waddr = 0, wdata = 0, x = 0, y = 0;
        if (op) {
            if (op->write) {
                if (op->write->addr >= words)
                    throw SimError(at + "write address " + std::to_string(op->write->addr) + " out of range");
                if (op->write->data & ~width_mask(wd_w))
                    throw SimError(at + "write data wider than " + std::to_string(wd_w) + " bits");
                we = true;
                waddr = op->write->addr;
                wdata = op->write->data;
            }
            if (sram) {
                if (op->window)
                    throw SimError(at + "window read on a 1R-1W design");
                if (op->read) {
                    if (op->read->addr >= words)
                        throw SimError(at + "read address " + std::to_string(op->read->addr) + " out of range");
                    re = true;
                    raddr = op->read->addr;
                    if (!written.count(raddr)) {
                        ++r.uninitialized_reads;
                        warn(r, at + "read of uninitialized address " + std::to_string(raddr));
                    }
                }
            } else {
                if (op->read)
                    throw SimError(at + "scalar read on a parallel-access design; use WIN");
                if (op->window && op->write)
                    throw SimError(at + "write and window read share the coordinate port");
                if (op->window) {
                    x = op->window->x;
                    y = op->window->y;
                    if (x >= (std::uint64_t{1} << m) || y >= (std::uint64_t{1} << n))
                        throw SimError(at + "window origin out of range");
                    re = true;
                    bool uninit = false;
                    for (std::uint64_t i = 0; i < (std::uint64_t{1} << a); ++i)
                        for (std::uint64_t j = 0; j < (std::uint64_t{1} << b); ++j) {
                            std::uint64_t xi = x + i, yj = y + j;
                            if (clamp) {
                                xi = std::min(xi, (std::uint64_t{1} << m) - 1);
                                yj = std::min(yj, (std::uint64_t{1} << n) - 1);
                            }
                            xi &= width_mask(m);
                            yj &= width_mask(n);
                            uninit = uninit || !written.count((xi << n) | yj);
                        }
                    if (uninit) {
                        ++r.uninitialized_reads;
                        warn(r, at + "window at (" + std::to_string(x) + ", " + std::to_string(y) +
                                    ") reads uninitialized pixels");
                    }
                } else if (op->write) {
                    x = waddr >> n;
                    y = waddr & width_mask(n);
                }
            }
        }
        if (we)
            written.insert(waddr);
        drive(p_re, re);
        drive(p_we, we);
        drive(p_raddr, raddr);
        drive(p_waddr, waddr);
        drive(p_wdata, wdata);
        drive(p_x, x);
        drive(p_y, y);

        mc.evaluate();
        if (pending) {
            SimOutput o{t, {}};
            for (int net : outs)
                o.data.push_back(mc.get(net));
            r.outputs.push_back(std::move(o));
        }
        const int bad_groups = mc.edge();
        if (pa && re)
            r.conflicts += bad_groups != 0 ? 1 : 0;
        pending = re;
        r.port_reads += re;
        r.port_writes += we;
        r.cycles = t + 1;
    }
    r.activity = mc.activity();
    return r;
}

std::string result_to_text(const SimResult& r) {
    std::ostringstream os;
    for (const auto& o : r.outputs) {
        os << "OUT " << o.cycle;
        for (auto v : o.data)
            os << " " << hex(v, r.data_width);
        os << "\n";
    }
    os << "# cycles " << r.cycles << "\n";
    os << "# reads " << r.port_reads << "\n";
    os << "# writes " << r.port_writes << "\n";
    os << "# uninitialized_reads " << r.uninitialized_reads << "\n";
    if (r.attrs.count("design") && r.attrs.at("design") == "pa")
        os << "# conflicts " << r.conflicts << "\n";
    os << "# e_total_fj " << format_number(r.e_total_fj) << "\n";
    for (const auto& w : r.warnings)
        os << "# warning: " << w << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Energy

namespace {

int attr_int(const SimResult& r, const std::string& k) {
    auto it = r.attrs.find(k);
    if (it == r.attrs.end())
        throw LookupError("simulation result lacks design attribute " + k);
    return std::stoi(it->second);
}

} // namespace

double energy_report(const SimResult& r, const Library& lib, const TechParams& tech) {
    double e = 0.0;
    for (const auto& [id, a] : r.activity) {
        const auto name = variant_name(a.B, a.W);
        const BAPlusMacro* mac = lib.find(name);
        BAPlusMacro generated;
        if (!mac) {
            generated = generate_variant(a.B, a.W, tech, VariantBounds{1, 64, 1, 64});
            mac = &generated;
        }
        e += static_cast<double>(a.reads) * mac->e_read + static_cast<double>(a.writes) * mac->e_write;
    }
    const auto design = r.attrs.count("design") ? r.attrs.at("design") : std::string();
    const double ops = static_cast<double>(r.port_reads + r.port_writes);
    double p_leak = 0.0, t_cycle = 0.0;
    if (design == "sram") {
        const MemoryConfig cfg{r.attrs.at("variant"), attr_int(r, "R"), attr_int(r, "C"), attr_int(r, "K"),
                               attr_int(r, "M")};
        const auto& mac = lib.at(cfg.variant);
        const double overhead = decode_energy(tech, clog2(static_cast<std::uint64_t>(cfg.words(mac)))) +
                                tech.e_wire_per_um *
                                    estimate_dimensions(cfg, mac, tech, logic_area(cfg, lib, tech)).semiperimeter_um();
        e += ops * overhead;
        const auto ppa = evaluate_ppa(cfg, lib, tech);
        p_leak = ppa.p_leak_nw;
        t_cycle = ppa.t_cycle_ps;
    } else if (design == "pa") {
        const PAWindowSpec s{attr_int(r, "m"), attr_int(r, "n"), attr_int(r, "a"), attr_int(r, "b"),
                             attr_int(r, "pixel_bits")};
        const PAArch arch = r.attrs.at("arch") == "sm" ? PAArch::SM : PAArch::TM;
        e += ops * pa_op_overhead_fj(s, arch, lib, tech);
        const auto ppa = pa_ppa(s, arch, lib, tech);
        p_leak = ppa.p_leak_nw;
        t_cycle = ppa.t_cycle_ps;
    }
    // nW * ps = 1e-21 J = 1e-6 fJ
    e += p_leak * t_cycle * static_cast<double>(r.cycles) * 1e-6;
    return e;
}

// ---------------------------------------------------------------------------
// Parallel-access verification

PAVerifyReport verify_pa(const PAWindowSpec& spec, const NetlistIR& ir, std::uint64_t seed) {
    spec.validate();
    const auto* px = ir.find_port("x");
    const auto* py = ir.find_port("y");
    const auto* pw = ir.find_port("wdata");
    if (!px || !py || !pw || px->width != spec.m || py->width != spec.n || pw->width != spec.pixel_bits)
        throw ConstraintError("netlist ports do not match PA spec " + to_string(spec));
    const Boundary mode = ir.attr("boundary") == "clamp" ? Boundary::Clamp : Boundary::Wrap;

    std::mt19937_64 rng(seed);
    const std::int64_t X = std::int64_t{1} << spec.m, Y = std::int64_t{1} << spec.n;
    std::vector<std::uint64_t> image(static_cast<std::size_t>(X * Y));
    for (auto& v : image)
        v = rng() & width_mask(spec.pixel_bits);

    SimTrace t;
    std::int64_t cyc = 0;
    for (std::int64_t x = 0; x < X; ++x)
        for (std::int64_t y = 0; y < Y; ++y)
            t.cycles.push_back({cyc++, WriteOp{static_cast<std::uint64_t>(pixel_address(spec, x, y)),
                                               image[static_cast<std::size_t>(x * Y + y)]},
                                std::nullopt, std::nullopt});
    for (std::int64_t x = 0; x < X; ++x)
        for (std::int64_t y = 0; y < Y; ++y)
            t.cycles.push_back({cyc++, std::nullopt, std::nullopt,
                                WindowOp{static_cast<std::uint64_t>(x), static_cast<std::uint64_t>(y)}});
    auto res = simulate(ir, t);

    PAVerifyReport rep;
    rep.windows = static_cast<std::uint64_t>(X * Y);
    rep.conflicts = res.conflicts;
    if (res.outputs.size() != rep.windows) {
        rep.mismatches = rep.windows;
        rep.details.push_back("expected " + std::to_string(rep.windows) + " outputs, got " +
                              std::to_string(res.outputs.size()));
        return rep;
    }
    std::size_t k = 0;
    for (std::int64_t x = 0; x < X; ++x)
        for (std::int64_t y = 0; y < Y; ++y, ++k) {
            const auto& out = res.outputs[k];
            bool bad = out.data.size() != static_cast<std::size_t>(spec.banks());
            for (int i = 0; i < (1 << spec.a) && !bad; ++i)
                for (int j = 0; j < (1 << spec.b) && !bad; ++j) {
                    auto [xi, yj] = window_pixel(spec, x, y, i, j, mode);
                    bad = out.data[static_cast<std::size_t>((i << spec.b) + j)] !=
                          image[static_cast<std::size_t>(xi * Y + yj)];
                }
            if (bad) {
                ++rep.mismatches;
                if (rep.details.size() < 10)
                    rep.details.push_back("window (" + std::to_string(x) + ", " + std::to_string(y) + ") mismatch");
            }
        }
    rep.outputs = std::move(res.outputs);
    return rep;
}

std::string verify_report_text(const PAVerifyReport& r) {
    std::ostringstream os;
    os << "mismatches=" << r.mismatches << " conflicts=" << r.conflicts << "\n";
    os << "windows=" << r.windows << "\n";
    for (const auto& d : r.details)
        os << d << "\n";
    return os.str();
}

} // namespace smemsynth
