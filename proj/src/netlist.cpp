#include "smemsynth/netlist.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "smemsynth/common.hpp"

namespace smemsynth {

namespace {

const std::vector<std::pair<CellKind, const char*>> kKindNames = {
    {CellKind::BAPlus, "baplus_instance"}, {CellKind::Decoder, "decoder"},
    {CellKind::WordlineGate, "wordline_gate"}, {CellKind::TristateDriver, "tristate_driver"},
    {CellKind::ColumnMux, "column_mux"},   {CellKind::OutputReg, "output_reg"},
    {CellKind::PaIncrement, "pa_increment"}, {CellKind::PaAlign, "pa_align"},
    {CellKind::And, "and"},                {CellKind::Or, "or"},
    {CellKind::Inv, "inv"},
};

std::string idx(const std::string& base, std::int64_t i) { return base + std::to_string(i); }

int as_width(std::int64_t v, const std::string& what) {
    if (v < 0 || v > 4096)
        throw ConstraintError("width " + what + " out of range: " + std::to_string(v));
    return static_cast<int>(v);
}

} // namespace

std::string to_string(CellKind k) {
    for (const auto& [kind, name] : kKindNames)
        if (kind == k)
            return name;
    return "?";
}

std::optional<CellKind> cell_kind_from_string(const std::string& s) {
    for (const auto& [kind, name] : kKindNames)
        if (s == name)
            return kind;
    return std::nullopt;
}

std::int64_t Cell::param(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end())
        throw LookupError("cell " + id() + " has no param " + key);
    return it->second;
}

std::int64_t Cell::param_or(const std::string& key, std::int64_t fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

std::vector<PinSpec> cell_pins(const Cell& c) {
    std::vector<PinSpec> pins;
    auto in = [&](std::string name, std::int64_t w) {
        if (w > 0)
            pins.push_back({std::move(name), PinDir::In, as_width(w, c.id())});
    };
    auto out = [&](std::string name, std::int64_t w) {
        if (w > 0)
            pins.push_back({std::move(name), PinDir::Out, as_width(w, c.id())});
    };
    auto pos = [&](const char* key) {
        auto v = c.param(key);
        if (v < 1)
            throw ConstraintError("cell " + c.id() + " param " + key + " must be >= 1");
        return v;
    };
    auto nonneg = [&](const char* key) {
        auto v = c.param(key);
        if (v < 0 || v > 62)
            throw ConstraintError("cell " + c.id() + " param " + key + " out of range");
        return v;
    };
    switch (c.kind) {
    case CellKind::BAPlus: {
        auto B = pos("B"), W = pos("W");
        in("clk", 1);
        in("rwl", B);
        in("wwl", B);
        in("wd", W);
        if (c.param_or("masked", 0))
            in("wm", W);
        out("q", W);
        out("oe", 1);
        break;
    }
    case CellKind::Decoder: {
        auto in_w = nonneg("in_w"), lo = nonneg("lo"), n = nonneg("n");
        if (lo + n > in_w || n > 16)
            throw ConstraintError("cell " + c.id() + " decodes bits outside its input");
        in("a", in_w);
        if (c.param_or("split", 0))
            for (std::int64_t i = 0; i < (std::int64_t{1} << n); ++i)
                out(idx("y", i), 1);
        else
            out("y", std::int64_t{1} << n);
        break;
    }
    case CellKind::WordlineGate: {
        auto B = pos("B"), sels = nonneg("sels");
        in("lines", B);
        in("en", 1);
        for (std::int64_t i = 0; i < sels; ++i)
            in(idx("s", i), 1);
        out("wl", B);
        break;
    }
    case CellKind::TristateDriver: {
        auto w = pos("width");
        in("d", w);
        in("en", 1);
        out("y", w);
        break;
    }
    case CellKind::ColumnMux: {
        auto ways = pos("ways"), inputs = pos("inputs"), in_w = pos("in_w"), out_w = pos("out_w");
        auto sel_w = nonneg("sel_w"), sel_lo = nonneg("sel_lo");
        if (!is_pow2(static_cast<std::uint64_t>(ways)) || inputs * in_w != ways * out_w ||
            sel_lo + ilog2(static_cast<std::uint64_t>(ways)) > sel_w)
            throw ConstraintError("cell " + c.id() + " has inconsistent mux geometry");
        bool write = c.param("dir") != 0;
        if (!write) {
            for (std::int64_t i = 0; i < inputs; ++i)
                in(idx("d", i), in_w);
            if (ways > 1)
                in("sel", sel_w);
            out("y", out_w);
        } else {
            in("d", out_w);
            if (ways > 1)
                in("sel", sel_w);
            for (std::int64_t i = 0; i < inputs; ++i)
                out(idx("wd", i), in_w);
            for (std::int64_t i = 0; i < inputs; ++i)
                out(idx("wm", i), in_w);
        }
        break;
    }
    case CellKind::OutputReg: {
        auto in_w = pos("in_w"), lo = nonneg("lo"), w = pos("width");
        if (lo + w > in_w || w > 64)
            throw ConstraintError("cell " + c.id() + " registers bits outside its input");
        in("clk", 1);
        in("d", in_w);
        if (c.param_or("en", 0))
            in("en", 1);
        out("q", w);
        break;
    }
    case CellKind::PaIncrement: {
        auto m = nonneg("m"), n = nonneg("n"), a = nonneg("a"), b = nonneg("b");
        auto p = nonneg("p"), q = nonneg("q");
        if (a > m || b > n || p >= (std::int64_t{1} << a) || q >= (std::int64_t{1} << b) || m > 16 || n > 16)
            throw ConstraintError("cell " + c.id() + " has inconsistent window geometry");
        if (c.param("mode") == 0) {
            auto X = std::int64_t{1} << (m - a), Y = std::int64_t{1} << (n - b);
            auto g = pos("xgroup");
            if (X % g != 0)
                throw ConstraintError("cell " + c.id() + " xgroup must divide the X lines");
            in("xl", X);
            in("yl", Y);
            in("x", m);
            in("y", n);
            for (std::int64_t k = 0; k < X / g; ++k)
                out(idx("xo", k), g);
            for (std::int64_t j = 0; j < Y; ++j)
                out(idx("yo", j), 1);
        } else {
            in("x", m);
            in("y", n);
            out("addr", (m - a) + (n - b));
        }
        out("hit", 1);
        break;
    }
    case CellKind::PaAlign: {
        auto m = nonneg("m"), n = nonneg("n"), a = nonneg("a"), b = nonneg("b"), pb = pos("pb");
        if (a > m || b > n || a > 4 || b > 4)
            throw ConstraintError("cell " + c.id() + " has inconsistent window geometry");
        for (std::int64_t p = 0; p < (std::int64_t{1} << a); ++p)
            for (std::int64_t q = 0; q < (std::int64_t{1} << b); ++q)
                in("d" + std::to_string(p) + "_" + std::to_string(q), pb);
        in("x", m);
        in("y", n);
        for (std::int64_t i = 0; i < (std::int64_t{1} << a); ++i)
            for (std::int64_t j = 0; j < (std::int64_t{1} << b); ++j)
                out("pix" + std::to_string(i) + "_" + std::to_string(j), pb);
        break;
    }
    case CellKind::And:
    case CellKind::Or: {
        auto n = pos("n");
        for (std::int64_t i = 0; i < n; ++i)
            in(idx("i", i), 1);
        out("y", 1);
        break;
    }
    case CellKind::Inv:
        in("a", 1);
        out("y", 1);
        break;
    }
    return pins;
}

// ---------------------------------------------------------------------------
// IR accessors and builder

const Cell* NetlistIR::find_cell(const std::string& id) const {
    for (const auto& c : cells)
        if (c.id() == id)
            return &c;
    return nullptr;
}

const Net* NetlistIR::find_net(const std::string& name) const {
    for (const auto& n : nets)
        if (n.name == name)
            return &n;
    return nullptr;
}

const Port* NetlistIR::find_port(const std::string& name) const {
    for (const auto& p : ports)
        if (p.name == name)
            return &p;
    return nullptr;
}

std::size_t NetlistIR::count(CellKind k) const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [&](const Cell& c) { return c.kind == k; }));
}

std::string NetlistIR::attr(const std::string& key) const {
    auto it = attrs.find(key);
    return it == attrs.end() ? std::string() : it->second;
}

void NetlistBuilder::scope(const std::string& name, const std::string& parent) {
    ir_.scopes.push_back({name, parent});
}

void NetlistBuilder::port(const std::string& name, PinDir dir, int width) {
    ir_.ports.push_back({name, dir, width});
    net(name, width);
}

const std::string& NetlistBuilder::net(const std::string& name, int width) {
    auto it = net_index_.find(name);
    if (it != net_index_.end()) {
        if (ir_.nets[it->second].width != width)
            throw Error("net " + name + " redeclared with a different width");
        return ir_.nets[it->second].name;
    }
    net_index_[name] = ir_.nets.size();
    ir_.nets.push_back({name, width, {}, {}});
    return ir_.nets.back().name;
}

std::string NetlistBuilder::cell(const std::string& scope, const std::string& name, CellKind kind,
                                 std::map<std::string, std::int64_t> params,
                                 const std::vector<std::pair<std::string, std::string>>& conns) {
    Cell c{name, scope, kind, std::move(params)};
    auto pins = cell_pins(c);
    auto id = c.id();
    for (const auto& [pin, net] : conns) {
        auto p = std::find_if(pins.begin(), pins.end(), [&](const PinSpec& s) { return s.name == pin; });
        if (p == pins.end())
            throw Error("cell " + id + " has no pin " + pin);
        auto it = net_index_.find(net);
        if (it == net_index_.end())
            throw Error("cell " + id + " connects undeclared net " + net);
        auto& n = ir_.nets[it->second];
        (p->dir == PinDir::Out ? n.drivers : n.sinks).push_back({id, pin});
    }
    ir_.cells.push_back(std::move(c));
    return id;
}

namespace {

void canonicalize(NetlistIR& ir) {
    std::sort(ir.cells.begin(), ir.cells.end(), [](const Cell& a, const Cell& b) { return a.id() < b.id(); });
    std::sort(ir.nets.begin(), ir.nets.end(), [](const Net& a, const Net& b) { return a.name < b.name; });
    std::sort(ir.scopes.begin(), ir.scopes.end(), [](const Scope& a, const Scope& b) { return a.name < b.name; });
}

} // namespace

NetlistIR NetlistBuilder::take() {
    NetlistIR ir = std::move(ir_);
    ir_ = {};
    net_index_.clear();
    canonicalize(ir);
    return ir;
}

// ---------------------------------------------------------------------------
// Well-formedness

std::vector<std::string> check_wellformed(const NetlistIR& ir) {
    std::vector<std::string> v;

    std::map<std::string, std::string> parent;
    for (const auto& s : ir.scopes)
        if (!parent.emplace(s.name, s.parent).second)
            v.push_back("duplicate scope " + s.name);
    for (const auto& [name, par] : parent) {
        if (!par.empty() && !parent.count(par))
            v.push_back("scope " + name + " has unknown parent " + par);
        // Walk up; a path longer than the scope count means a cycle.
        std::string cur = name;
        std::size_t steps = 0;
        while (!cur.empty() && parent.count(cur) && steps <= parent.size()) {
            cur = parent[cur];
            ++steps;
        }
        if (steps > parent.size())
            v.push_back("scope " + name + " is part of a hierarchy cycle");
    }

    std::map<std::string, const Cell*> cells;
    std::map<std::string, std::map<std::string, PinSpec>> pinmap;
    for (const auto& c : ir.cells) {
        auto id = c.id();
        if (!cells.emplace(id, &c).second) {
            v.push_back("duplicate cell " + id);
            continue;
        }
        if (!c.scope.empty() && !parent.count(c.scope))
            v.push_back("cell " + id + " is in unknown scope " + c.scope);
        try {
            for (auto& p : cell_pins(c))
                pinmap[id][p.name] = p;
        } catch (const Error& e) {
            v.push_back("cell " + id + " has invalid params: " + e.what());
            pinmap[id];
        }
    }

    std::map<std::string, const Port*> ports;
    for (const auto& p : ir.ports)
        if (!ports.emplace(p.name, &p).second)
            v.push_back("duplicate port " + p.name);

    std::set<std::string> net_names;
    std::map<std::pair<std::string, std::string>, int> pin_uses;
    for (const auto& n : ir.nets) {
        if (!net_names.insert(n.name).second)
            v.push_back("duplicate net " + n.name);
        if (n.width < 1)
            v.push_back("net " + n.name + " has width " + std::to_string(n.width));
        auto check_ref = [&](const PinRef& r, PinDir expect) {
            auto cit = pinmap.find(r.cell);
            if (cit == pinmap.end()) {
                v.push_back("net " + n.name + " references unknown cell " + r.cell);
                return;
            }
            ++pin_uses[{r.cell, r.pin}];
            auto pit = cit->second.find(r.pin);
            if (pit == cit->second.end()) {
                if (!cit->second.empty())
                    v.push_back("net " + n.name + " references unknown pin " + r.cell + "." + r.pin);
                return;
            }
            if (pit->second.dir != expect)
                v.push_back("net " + n.name + " connects " + r.cell + "." + r.pin + " with the wrong direction");
            if (pit->second.width != n.width)
                v.push_back("net " + n.name + " (width " + std::to_string(n.width) + ") connects " + r.cell + "." +
                            r.pin + " (width " + std::to_string(pit->second.width) + ")");
        };
        for (const auto& r : n.drivers)
            check_ref(r, PinDir::Out);
        for (const auto& r : n.sinks)
            check_ref(r, PinDir::In);

        auto pit = ports.find(n.name);
        const Port* port = pit == ports.end() ? nullptr : pit->second;
        if (port && port->dir == PinDir::In) {
            if (!n.drivers.empty())
                v.push_back("input port net " + n.name + " is driven by a cell");
        } else if (port) {
            if (n.drivers.empty())
                v.push_back("output port net " + n.name + " has no driver");
        } else {
            if (n.drivers.empty())
                v.push_back("net " + n.name + " has no driver");
            if (n.sinks.empty())
                v.push_back("net " + n.name + " has no sink");
        }
        if (n.drivers.size() > 1) {
            bool all_tri = std::all_of(n.drivers.begin(), n.drivers.end(), [&](const PinRef& r) {
                auto c = cells.find(r.cell);
                return c != cells.end() && c->second->kind == CellKind::TristateDriver;
            });
            if (!all_tri)
                v.push_back("net " + n.name + " has multiple drivers that are not all tristate_driver");
        }
    }
    for (const auto& p : ir.ports) {
        const Net* n = nullptr;
        for (const auto& x : ir.nets)
            if (x.name == p.name)
                n = &x;
        if (!n)
            v.push_back("port " + p.name + " has no net");
        else if (n->width != p.width)
            v.push_back("port " + p.name + " width differs from its net");
    }
    for (const auto& [id, pins] : pinmap)
        for (const auto& [name, spec] : pins) {
            auto it = pin_uses.find({id, name});
            int uses = it == pin_uses.end() ? 0 : it->second;
            if (uses != 1)
                v.push_back("pin " + id + "." + name + " connected " + std::to_string(uses) + " times");
        }
    return v;
}

// ---------------------------------------------------------------------------
// 1R-1W generator

void append_sram(NetlistBuilder& b, const MemoryConfig& cfg, const BAPlusMacro& macro, const std::string& scope,
                 const std::map<std::string, std::string>& port_nets) {
    validate_config(cfg, macro);
    const auto lay = address_layout(cfg, macro);
    const int A = lay.total();
    const auto bits = static_cast<int>(cfg.bits(macro));
    const int W = macro.W, B = macro.B;
    if (A < 1)
        throw ConstraintError("memory needs at least two words");
    if (!is_pow2(static_cast<std::uint64_t>(B)))
        throw ConstraintError("array depth must be a power of two");

    auto port = [&](const char* name) {
        auto it = port_nets.find(name);
        if (it == port_nets.end())
            throw Error(std::string("sram port ") + name + " is not mapped");
        return it->second;
    };
    const std::string clk = port("clk"), re = port("re"), we = port("we"), raddr = port("raddr"),
                      waddr = port("waddr"), wdata = port("wdata"), rdata = port("rdata");
    const std::string pre = scope.empty() ? "" : scope + "/";
    auto N = [&](const std::string& s, int w) { return b.net(pre + s, w); };
    using P = std::map<std::string, std::int64_t>;

    const bool mux = cfg.C > 1 || cfg.M > 1;
    const int row_lo = lay.mux_bits, ba_lo = row_lo + lay.row_bits, bank_lo = ba_lo + lay.ba_bits;

    // Global decode, shared by every bank.
    for (const char* side : {"r", "w"}) {
        const std::string s = side;
        const std::string& addr = s == "r" ? raddr : waddr;
        N(s + "row", B);
        b.cell(scope, "dec_" + s + "row", CellKind::Decoder, P{{"in_w", A}, {"lo", row_lo}, {"n", lay.row_bits}, {"split", 0}},
               {{"a", addr}, {"y", pre + s + "row"}});
        if (cfg.K > 1) {
            std::vector<std::pair<std::string, std::string>> c{{"a", addr}};
            for (int k = 0; k < cfg.K; ++k)
                c.push_back({idx("y", k), N(s + "ba" + std::to_string(k), 1)});
            b.cell(scope, "dec_" + s + "ba", CellKind::Decoder, P{{"in_w", A}, {"lo", ba_lo}, {"n", lay.ba_bits}, {"split", 1}}, c);
        }
        if (cfg.R > 1) {
            std::vector<std::pair<std::string, std::string>> c{{"a", addr}};
            for (int r = 0; r < cfg.R; ++r)
                c.push_back({idx("y", r), N(s + "bank" + std::to_string(r), 1)});
            b.cell(scope, "dec_" + s + "bank", CellKind::Decoder,
                   P{{"in_w", A}, {"lo", bank_lo}, {"n", lay.bank_row_bits}, {"split", 1}}, c);
        }
    }

    // Write column mux and read-select register.
    if (mux) {
        std::vector<std::pair<std::string, std::string>> c{{"d", wdata}};
        if (cfg.M > 1)
            c.push_back({"sel", waddr});
        for (int col = 0; col < cfg.C; ++col)
            c.push_back({idx("wd", col), N("wd_c" + std::to_string(col), W)});
        for (int col = 0; col < cfg.C; ++col)
            c.push_back({idx("wm", col), N("wm_c" + std::to_string(col), W)});
        b.cell(scope, "wmux", CellKind::ColumnMux,
               P{{"dir", 1}, {"ways", cfg.M}, {"inputs", cfg.C}, {"in_w", W}, {"out_w", bits}, {"sel_w", A}, {"sel_lo", 0}}, c);
        std::vector<std::pair<std::string, std::string>> r;
        for (int col = 0; col < cfg.C; ++col)
            r.push_back({idx("d", col), N("col_c" + std::to_string(col), W)});
        if (cfg.M > 1) {
            N("rsel", lay.mux_bits);
            b.cell(scope, "rsel_reg", CellKind::OutputReg, P{{"in_w", A}, {"lo", 0}, {"width", lay.mux_bits}, {"en", 1}},
                   {{"clk", clk}, {"d", raddr}, {"en", re}, {"q", pre + "rsel"}});
            r.push_back({"sel", pre + "rsel"});
        }
        r.push_back({"y", rdata});
        b.cell(scope, "rmux", CellKind::ColumnMux,
               P{{"dir", 0}, {"ways", cfg.M}, {"inputs", cfg.C}, {"in_w", W}, {"out_w", bits}, {"sel_w", lay.mux_bits}, {"sel_lo", 0}},
               r);
    }

    for (int r = 0; r < cfg.R; ++r)
        for (int col = 0; col < cfg.C; ++col) {
            const std::string bank = "bank_r" + std::to_string(r) + "_c" + std::to_string(col);
            const std::string bscope = pre + bank;
            b.scope(bscope, scope);
            const std::string colnet = mux ? pre + "col_c" + std::to_string(col) : rdata;
            const std::string banknet = cfg.R > 1 ? N(bank + "/bl", W) : colnet;
            std::vector<std::string> oes;
            for (int k = 0; k < cfg.K; ++k) {
                const std::string ks = std::to_string(k);
                for (const char* side : {"r", "w"}) {
                    const std::string s = side;
                    std::vector<std::pair<std::string, std::string>> c{{"lines", pre + s + "row"},
                                                                       {"en", s == "r" ? re : we}};
                    int sels = 0;
                    if (cfg.R > 1)
                        c.push_back({idx("s", sels++), pre + s + "bank" + std::to_string(r)});
                    if (cfg.K > 1)
                        c.push_back({idx("s", sels++), pre + s + "ba" + ks});
                    c.push_back({"wl", N(bank + "/" + s + "wl" + ks, B)});
                    b.cell(bscope, s + "wl" + ks, CellKind::WordlineGate, P{{"B", B}, {"sels", sels}}, c);
                }
                std::vector<std::pair<std::string, std::string>> c{
                    {"clk", clk}, {"rwl", bscope + "/rwl" + ks}, {"wwl", bscope + "/wwl" + ks}};
                if (mux) {
                    c.push_back({"wd", pre + "wd_c" + std::to_string(col)});
                    c.push_back({"wm", pre + "wm_c" + std::to_string(col)});
                } else {
                    c.push_back({"wd", wdata});
                }
                c.push_back({"q", N(bank + "/q" + ks, W)});
                c.push_back({"oe", N(bank + "/oe" + ks, 1)});
                oes.push_back(bscope + "/oe" + ks);
                b.cell(bscope, "ba" + ks, CellKind::BAPlus, P{{"B", B}, {"W", W}, {"masked", mux ? 1 : 0}}, c);
                b.cell(bscope, "tri" + ks, CellKind::TristateDriver, P{{"width", W}},
                       {{"d", bscope + "/q" + ks}, {"en", bscope + "/oe" + ks}, {"y", banknet}});
            }
            if (cfg.R > 1) {
                std::string en = oes.front();
                if (cfg.K > 1) {
                    std::vector<std::pair<std::string, std::string>> c;
                    for (int k = 0; k < cfg.K; ++k)
                        c.push_back({idx("i", k), oes[static_cast<std::size_t>(k)]});
                    en = N(bank + "/boe", 1);
                    c.push_back({"y", en});
                    b.cell(bscope, "oe_or", CellKind::Or, P{{"n", cfg.K}}, c);
                }
                b.cell(bscope, "tri", CellKind::TristateDriver, P{{"width", W}}, {{"d", banknet}, {"en", en}, {"y", colnet}});
            }
        }
}

NetlistIR generate_sram(const MemoryConfig& cfg, const Library& lib) {
    const auto& macro = lib.at(cfg.variant);
    validate_config(cfg, macro);
    const auto lay = address_layout(cfg, macro);
    const int A = lay.total();
    const auto bits = static_cast<int>(cfg.bits(macro));
    if (A < 1)
        throw ConstraintError("memory needs at least two words");
    NetlistBuilder b;
    b.attr("design", "sram");
    b.attr("top", "sram_" + cfg.variant + "_R" + std::to_string(cfg.R) + "_C" + std::to_string(cfg.C) + "_K" +
                      std::to_string(cfg.K) + "_M" + std::to_string(cfg.M));
    b.attr("variant", cfg.variant);
    b.attr("R", std::to_string(cfg.R));
    b.attr("C", std::to_string(cfg.C));
    b.attr("K", std::to_string(cfg.K));
    b.attr("M", std::to_string(cfg.M));
    b.attr("words", std::to_string(cfg.words(macro)));
    b.attr("bits", std::to_string(bits));
    b.port("clk", PinDir::In, 1);
    b.port("re", PinDir::In, 1);
    b.port("raddr", PinDir::In, A);
    b.port("we", PinDir::In, 1);
    b.port("waddr", PinDir::In, A);
    b.port("wdata", PinDir::In, bits);
    b.port("rdata", PinDir::Out, bits);
    append_sram(b, cfg, macro, "",
                {{"clk", "clk"}, {"re", "re"}, {"raddr", "raddr"}, {"we", "we"}, {"waddr", "waddr"},
                 {"wdata", "wdata"}, {"rdata", "rdata"}});
    return b.take();
}

// ---------------------------------------------------------------------------
// Native text format

std::string netlist_to_text(const NetlistIR& ir) {
    NetlistIR s = ir;
    canonicalize(s);
    std::ostringstream os;
    os << "# smemsynth netlist\n";
    for (const auto& [k, v] : s.attrs)
        os << "attr " << k << " " << v << "\n";
    for (const auto& sc : s.scopes)
        os << "scope " << sc.name << " " << (sc.parent.empty() ? "-" : sc.parent) << "\n";
    for (const auto& p : s.ports)
        os << "port " << p.name << " " << (p.dir == PinDir::In ? "in" : "out") << " " << p.width << "\n";
    for (const auto& c : s.cells) {
        os << "cell " << c.name << " " << to_string(c.kind);
        if (!c.scope.empty())
            os << " scope=" << c.scope;
        for (const auto& [k, v] : c.params)
            os << " " << k << "=" << v;
        os << "\n";
    }
    for (const auto& n : s.nets)
        os << "net " << n.name << " " << n.width << "\n";
    for (const auto& n : s.nets) {
        for (const auto& r : n.drivers)
            os << "conn " << n.name << " " << r.cell << "." << r.pin << " drive\n";
        for (const auto& r : n.sinks)
            os << "conn " << n.name << " " << r.cell << "." << r.pin << " sink\n";
    }
    return os.str();
}

namespace {

std::int64_t parse_int(const std::string& s, const std::string& where) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos, 10);
    } catch (const std::exception&) {
        throw ParseError(where, "expected an integer, got '" + s + "'");
    }
    if (pos != s.size())
        throw ParseError(where, "expected an integer, got '" + s + "'");
    return v;
}

} // namespace

NetlistIR netlist_from_text(const std::string& text, const std::string& origin) {
    NetlistIR ir;
    std::map<std::string, std::size_t> net_index;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string where = origin + ":" + std::to_string(lineno);
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;)
            tok.push_back(t);
        if (tok.empty())
            continue;
        const auto& kw = tok[0];
        auto need = [&](std::size_t n) {
            if (tok.size() != n)
                throw ParseError(where, "'" + kw + "' expects " + std::to_string(n - 1) + " fields");
        };
        if (kw == "attr") {
            if (tok.size() < 2)
                throw ParseError(where, "'attr' expects a key");
            std::string val;
            for (std::size_t i = 2; i < tok.size(); ++i)
                val += (i > 2 ? " " : "") + tok[i];
            ir.attrs[tok[1]] = val;
        } else if (kw == "scope") {
            need(3);
            ir.scopes.push_back({tok[1], tok[2] == "-" ? "" : tok[2]});
        } else if (kw == "port") {
            need(4);
            if (tok[2] != "in" && tok[2] != "out")
                throw ParseError(where, "port direction must be 'in' or 'out'");
            ir.ports.push_back({tok[1], tok[2] == "in" ? PinDir::In : PinDir::Out,
                                static_cast<int>(parse_int(tok[3], where))});
        } else if (kw == "cell") {
            if (tok.size() < 3)
                throw ParseError(where, "'cell' expects a name and a kind");
            auto kind = cell_kind_from_string(tok[2]);
            if (!kind)
                throw ParseError(where, "unknown cell kind '" + tok[2] + "'");
            Cell c{tok[1], "", *kind, {}};
            for (std::size_t i = 3; i < tok.size(); ++i) {
                auto eq = tok[i].find('=');
                if (eq == std::string::npos || eq == 0)
                    throw ParseError(where, "expected key=value, got '" + tok[i] + "'");
                auto key = tok[i].substr(0, eq), val = tok[i].substr(eq + 1);
                if (key == "scope")
                    c.scope = val;
                else if (!c.params.emplace(key, parse_int(val, where)).second)
                    throw ParseError(where, "duplicate param '" + key + "'");
            }
            ir.cells.push_back(std::move(c));
        } else if (kw == "net") {
            need(3);
            if (net_index.count(tok[1]))
                throw ParseError(where, "duplicate net '" + tok[1] + "'");
            net_index[tok[1]] = ir.nets.size();
            ir.nets.push_back({tok[1], static_cast<int>(parse_int(tok[2], where)), {}, {}});
        } else if (kw == "conn") {
            need(4);
            auto it = net_index.find(tok[1]);
            if (it == net_index.end())
                throw ParseError(where, "conn references undeclared net '" + tok[1] + "'");
            auto dot = tok[2].rfind('.');
            if (dot == std::string::npos || dot == 0 || dot + 1 == tok[2].size())
                throw ParseError(where, "expected <cell>.<pin>, got '" + tok[2] + "'");
            PinRef ref{tok[2].substr(0, dot), tok[2].substr(dot + 1)};
            auto& net = ir.nets[it->second];
            if (tok[3] == "drive")
                net.drivers.push_back(ref);
            else if (tok[3] == "sink")
                net.sinks.push_back(ref);
            else
                throw ParseError(where, "conn role must be 'drive' or 'sink'");
        } else {
            throw ParseError(where, "unknown record '" + kw + "'");
        }
    }
    canonicalize(ir);
    return ir;
}

void save_netlist(const NetlistIR& ir, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot write " + path);
    f << netlist_to_text(ir);
    if (!f)
        throw Error("write failed: " + path);
}

NetlistIR load_netlist(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return netlist_from_text(ss.str(), path);
}

// ---------------------------------------------------------------------------
// Verilog emission

std::string verilog_ident(const std::string& name) {
    std::string out;
    for (char ch : name) {
        if (ch == '/')
            out += "__";
        else if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_')
            out += ch;
        else
            out += '_';
    }
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0])))
        out = "n_" + out;
    return out;
}

namespace {

std::string range(int w) { return w == 1 ? "" : "[" + std::to_string(w - 1) + ":0] "; }

std::string bits_of(const std::string& sig, int lo, int n) {
    if (n == 1)
        return sig + "[" + std::to_string(lo) + "]";
    return sig + "[" + std::to_string(lo + n - 1) + ":" + std::to_string(lo) + "]";
}

std::string module_name(const Cell& c) {
    if (c.kind == CellKind::BAPlus)
        return variant_name(static_cast<int>(c.param("B")), static_cast<int>(c.param("W")));
    std::string s = to_string(c.kind);
    for (const auto& [k, v] : c.params)
        if (!(c.kind == CellKind::BAPlus && k == "masked"))
            s += "_" + k + std::to_string(v);
    return s;
}

std::string module_header(const std::string& name, const std::vector<PinSpec>& pins,
                          const std::set<std::string>& reg_outputs = {}) {
    std::ostringstream os;
    os << "module " << name << "(";
    for (std::size_t i = 0; i < pins.size(); ++i)
        os << (i ? ", " : "") << pins[i].name;
    os << ");\n";
    for (const auto& p : pins) {
        os << "  " << (p.dir == PinDir::In ? "input " : "output ");
        if (p.dir == PinDir::Out && reg_outputs.count(p.name))
            os << "reg ";
        os << range(p.width) << p.name << ";\n";
    }
    return os.str();
}

std::string emit_module(const Cell& c) {
    const auto name = module_name(c);
    auto pins = cell_pins(c);
    auto P = [&](const char* k) { return static_cast<int>(c.param(k)); };
    std::ostringstream os;
    switch (c.kind) {
    case CellKind::BAPlus: {
        const int B = P("B"), W = P("W");
        if (!c.param_or("masked", 0)) {
            // Every array module carries a write mask; unmasked instances tie it high.
            Cell m = c;
            m.params["masked"] = 1;
            pins = cell_pins(m);
        }
        os << module_header(name, pins, {"q", "oe"});
        os << "  reg " << range(W) << "mem [0:" << B - 1 << "];\n  integer i;\n";
        os << "  initial begin\n    for (i = 0; i < " << B << "; i = i + 1) mem[i] = {" << W << "{1'b1}};\n"
           << "    q = {" << W << "{1'b1}};\n    oe = 1'b0;\n  end\n";
        os << "  always @(posedge clk) begin\n    oe <= |rwl;\n";
        os << "    for (i = 0; i < " << B << "; i = i + 1) if (rwl[i]) q <= mem[i];\n";
        os << "    for (i = 0; i < " << B << "; i = i + 1) if (wwl[i]) mem[i] <= (mem[i] & ~wm) | (wd & wm);\n";
        os << "  end\nendmodule\n";
        break;
    }
    case CellKind::Decoder: {
        os << module_header(name, pins);
        const int lo = P("lo"), n = P("n");
        if (c.param_or("split", 0)) {
            for (int i = 0; i < (1 << n); ++i) {
                if (n == 0)
                    os << "  assign y0 = 1'b1;\n";
                else
                    os << "  assign y" << i << " = (" << bits_of("a", lo, n) << " == " << n << "'d" << i << ");\n";
            }
        } else if (n == 0) {
            os << "  assign y = 1'b1;\n";
        } else {
            os << "  assign y = {{" << (1 << n) - 1 << "{1'b0}}, 1'b1} << " << bits_of("a", lo, n) << ";\n";
        }
        os << "endmodule\n";
        break;
    }
    case CellKind::WordlineGate: {
        os << module_header(name, pins);
        os << "  assign wl = (en";
        for (int i = 0; i < P("sels"); ++i)
            os << " & s" << i;
        os << ") ? lines : {" << P("B") << "{1'b0}};\nendmodule\n";
        break;
    }
    case CellKind::TristateDriver:
        os << module_header(name, pins);
        os << "  assign y = en ? d : {" << P("width") << "{1'bz}};\nendmodule\n";
        break;
    case CellKind::ColumnMux: {
        os << module_header(name, pins);
        const int ways = P("ways"), inputs = P("inputs"), in_w = P("in_w"), out_w = P("out_w");
        const int mb = ilog2(static_cast<std::uint64_t>(ways)), total = inputs * in_w;
        if (ways > 1)
            os << "  wire " << range(mb) << "s = " << bits_of("sel", P("sel_lo"), mb) << ";\n";
        if (P("dir") == 0) {
            os << "  wire " << range(total) << "f = {";
            for (int i = inputs - 1; i >= 0; --i)
                os << "d" << i << (i ? ", " : "");
            os << "};\n";
            if (ways > 1)
                os << "  assign y = f[s * " << out_w << " +: " << out_w << "];\n";
            else
                os << "  assign y = f;\n";
        } else {
            os << "  wire " << range(total) << "fd = {" << ways << "{d}};\n";
            if (ways > 1)
                os << "  wire " << range(total) << "fm = {{" << total - out_w << "{1'b0}}, {" << out_w
                   << "{1'b1}}} << (s * " << out_w << ");\n";
            else
                os << "  wire " << range(total) << "fm = {" << total << "{1'b1}};\n";
            for (int i = 0; i < inputs; ++i) {
                os << "  assign wd" << i << " = " << bits_of("fd", i * in_w, in_w) << ";\n";
                os << "  assign wm" << i << " = " << bits_of("fm", i * in_w, in_w) << ";\n";
            }
        }
        os << "endmodule\n";
        break;
    }
    case CellKind::OutputReg:
        os << module_header(name, pins, {"q"});
        os << "  initial q = 0;\n  always @(posedge clk) " << (c.param_or("en", 0) ? "if (en) " : "") << "q <= "
           << bits_of("d", P("lo"), P("width")) << ";\nendmodule\n";
        break;
    case CellKind::PaIncrement: {
        os << module_header(name, pins);
        const int m = P("m"), n = P("n"), a = P("a"), b = P("b"), p = P("p"), q = P("q");
        os << "  wire cx = " << (a > 0 ? "(" + bits_of("x", 0, a) + " > " + std::to_string(p) + ")" : "1'b0") << ";\n";
        os << "  wire cy = " << (b > 0 ? "(" + bits_of("y", 0, b) + " > " + std::to_string(q) + ")" : "1'b0") << ";\n";
        os << "  assign hit = " << (a > 0 ? "(" + bits_of("x", 0, a) + " == " + std::to_string(p) + ")" : "1'b1")
           << " & " << (b > 0 ? "(" + bits_of("y", 0, b) + " == " + std::to_string(q) + ")" : "1'b1") << ";\n";
        if (P("mode") == 0) {
            const int X = 1 << (m - a), Y = 1 << (n - b), g = P("xgroup");
            auto rot = [&](const char* s, int L) {
                if (L == 1)
                    return std::string(s);
                return "{" + bits_of(s, 0, L - 1) + ", " + bits_of(s, L - 1, 1) + "}";
            };
            os << "  wire " << range(X) << "xr = cx ? " << rot("xl", X) << " : xl;\n";
            os << "  wire " << range(Y) << "yr = cy ? " << rot("yl", Y) << " : yl;\n";
            for (int k = 0; k < X / g; ++k)
                os << "  assign xo" << k << " = " << (X == 1 ? "xr" : bits_of("xr", k * g, g)) << ";\n";
            for (int j = 0; j < Y; ++j)
                os << "  assign yo" << j << " = " << (Y == 1 ? "yr" : bits_of("yr", j, 1)) << ";\n";
        } else {
            std::vector<std::string> parts;
            if (m - a > 0) {
                os << "  wire " << range(m - a) << "xa = " << bits_of("x", a, m - a) << " + cx;\n";
                parts.push_back("xa");
            }
            if (n - b > 0) {
                os << "  wire " << range(n - b) << "ya = " << bits_of("y", b, n - b) << " + cy;\n";
                parts.push_back("ya");
            }
            os << "  assign addr = {";
            for (std::size_t i = 0; i < parts.size(); ++i)
                os << (i ? ", " : "") << parts[i];
            os << "};\n";
        }
        os << "endmodule\n";
        break;
    }
    case CellKind::PaAlign: {
        std::set<std::string> regs;
        for (const auto& pin : pins)
            if (pin.dir == PinDir::Out)
                regs.insert(pin.name);
        os << module_header(name, pins, regs);
        const int m = P("m"), n = P("n"), a = P("a"), b = P("b"), pb = P("pb");
        const bool clamp = c.param_or("clamp", 0) != 0;
        const int XA = 1 << a, YB = 1 << b;
        os << "  integer ii, jj, bp, bq;\n  always @* begin\n";
        for (int i = 0; i < XA; ++i)
            for (int j = 0; j < YB; ++j) {
                os << "    ii = " << i << "; jj = " << j << ";\n";
                if (clamp) {
                    os << "    if (x + " << i << " > " << (1 << m) - 1 << ") ii = " << (1 << m) - 1 << " - x;\n";
                    os << "    if (y + " << j << " > " << (1 << n) - 1 << ") jj = " << (1 << n) - 1 << " - y;\n";
                }
                os << "    bp = (x + ii) % " << XA << "; bq = (y + jj) % " << YB << ";\n";
                os << "    case (bp * " << YB << " + bq)\n";
                for (int p = 0; p < XA; ++p)
                    for (int q = 0; q < YB; ++q)
                        os << "      " << p * YB + q << ": pix" << i << "_" << j << " = d" << p << "_" << q << ";\n";
                os << "      default: pix" << i << "_" << j << " = {" << pb << "{1'b0}};\n    endcase\n";
            }
        os << "  end\nendmodule\n";
        break;
    }
    case CellKind::And:
    case CellKind::Or: {
        os << module_header(name, pins);
        os << "  assign y = ";
        for (int i = 0; i < P("n"); ++i)
            os << (i ? (c.kind == CellKind::And ? " & " : " | ") : "") << "i" << i;
        os << ";\nendmodule\n";
        break;
    }
    case CellKind::Inv:
        os << module_header(name, pins);
        os << "  assign y = ~a;\nendmodule\n";
        break;
    }
    return os.str();
}

} // namespace

std::string emit_verilog(const NetlistIR& input) {
    NetlistIR ir = input;
    canonicalize(ir);
    std::map<std::string, std::string> modules;
    for (const auto& c : ir.cells) {
        auto name = module_name(c);
        if (!modules.count(name))
            modules[name] = emit_module(c);
    }
    // Pin -> net lookup for instance connections.
    std::map<std::pair<std::string, std::string>, std::string> conn;
    for (const auto& n : ir.nets) {
        for (const auto& r : n.drivers)
            conn[{r.cell, r.pin}] = n.name;
        for (const auto& r : n.sinks)
            conn[{r.cell, r.pin}] = n.name;
    }
    std::ostringstream os;
    os << "// Generated by smemsynth. Verilog-2001.\n";
    for (const auto& [k, v] : ir.attrs)
        os << "// " << k << " = " << v << "\n";
    os << "\n";
    for (const auto& [name, text] : modules)
        os << text << "\n";

    std::string top = ir.attr("top");
    if (top.empty())
        top = "top";
    os << "module " << verilog_ident(top) << "(";
    for (std::size_t i = 0; i < ir.ports.size(); ++i)
        os << (i ? ", " : "") << ir.ports[i].name;
    os << ");\n";
    std::set<std::string> port_names;
    for (const auto& p : ir.ports) {
        os << "  " << (p.dir == PinDir::In ? "input " : "output ") << range(p.width) << p.name << ";\n";
        port_names.insert(p.name);
    }
    for (const auto& n : ir.nets)
        if (!port_names.count(n.name))
            os << "  wire " << range(n.width) << verilog_ident(n.name) << ";\n";
    for (const auto& c : ir.cells) {
        const auto id = c.id();
        os << "  " << module_name(c) << " " << verilog_ident(id) << "(";
        auto pins = cell_pins(c);
        bool first = true;
        for (const auto& p : pins) {
            auto it = conn.find({id, p.name});
            os << (first ? "" : ", ") << "." << p.name << "(" << (it == conn.end() ? "" : verilog_ident(it->second))
               << ")";
            first = false;
        }
        if (c.kind == CellKind::BAPlus && !c.param_or("masked", 0))
            os << ", .wm({" << c.param("W") << "{1'b1}})";
        os << ");\n";
    }
    os << "endmodule\n";
    return os.str();
}

void emit_hdl(const NetlistIR& ir, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot write " + path);
    f << emit_verilog(ir);
    if (!f)
        throw Error("write failed: " + path);
}

} // namespace smemsynth
