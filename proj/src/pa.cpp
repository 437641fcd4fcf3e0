#include "smemsynth/pa.hpp"

#include <algorithm>
#include <sstream>

#include "smemsynth/common.hpp"
#include "smemsynth/floorplan.hpp"
#include "smemsynth/report.hpp"

namespace smemsynth {

void PAWindowSpec::validate() const {
    if (m < 1 || n < 1 || m > 16 || n > 16)
        throw ConstraintError("image log-dimensions m, n must be in 1..16");
    if (a < 0 || b < 0 || a > m || b > n || a > 4 || b > 4)
        throw ConstraintError("window log-dimensions need 0 <= a <= min(m, 4) and 0 <= b <= min(n, 4)");
    if ((m - a) + (n - b) < 1)
        throw ConstraintError("each bank must hold at least two pixels");
    if (pixel_bits < 1 || pixel_bits > 64 || !is_pow2(static_cast<std::uint64_t>(pixel_bits)))
        throw ConstraintError("pixel_bits must be a power of two in 1..64");
}

std::string to_string(const PAWindowSpec& s) {
    return std::to_string(s.m) + "," + std::to_string(s.n) + "," + std::to_string(s.a) + "," + std::to_string(s.b) +
           "," + std::to_string(s.pixel_bits);
}

PAWindowSpec parse_pa_spec(const std::string& text) {
    std::vector<int> v;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) {
        std::size_t pos = 0;
        int x = 0;
        try {
            x = std::stoi(part, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != part.size())
            throw ParseError("pa spec", "expected an integer, got '" + part + "'");
        v.push_back(x);
    }
    if (v.size() != 4 && v.size() != 5)
        throw ParseError("pa spec", "expected m,n,a,b[,pixel_bits]");
    PAWindowSpec s{v[0], v[1], v[2], v[3], v.size() == 5 ? v[4] : 8};
    s.validate();
    return s;
}

PAWindowSpec pa_spec_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object())
        throw ParseError(where, "expected an object");
    PAWindowSpec s;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& k = it.key();
        if (!it->is_number_integer())
            throw ParseError(where + "." + k, "expected an integer");
        int v = it->get<int>();
        if (k == "m")
            s.m = v;
        else if (k == "n")
            s.n = v;
        else if (k == "a")
            s.a = v;
        else if (k == "b")
            s.b = v;
        else if (k == "pixel_bits")
            s.pixel_bits = v;
        else
            throw ParseError(where + "." + k, "unknown key");
    }
    for (const char* k : {"m", "n", "a", "b"})
        if (!j.contains(k))
            throw ParseError(where + "." + k, "missing field");
    s.validate();
    return s;
}

std::string to_string(Boundary b) { return b == Boundary::Wrap ? "wrap" : "clamp"; }

Boundary parse_boundary(const std::string& s) {
    if (s == "wrap")
        return Boundary::Wrap;
    if (s == "clamp")
        return Boundary::Clamp;
    throw ParseError("boundary", "expected 'wrap' or 'clamp', got '" + s + "'");
}

std::string to_string(PAArch a) { return a == PAArch::SM ? "SM" : "TM"; }

namespace {

void check_coord(const PAWindowSpec& s, std::int64_t x, std::int64_t y) {
    if (x < 0 || x >= (std::int64_t{1} << s.m))
        throw BoundsError("x = " + std::to_string(x) + " outside [0, " + std::to_string(std::int64_t{1} << s.m) + ")");
    if (y < 0 || y >= (std::int64_t{1} << s.n))
        throw BoundsError("y = " + std::to_string(y) + " outside [0, " + std::to_string(std::int64_t{1} << s.n) + ")");
}

} // namespace

PixelLocation map_pixel(const PAWindowSpec& s, std::int64_t x, std::int64_t y) {
    check_coord(s, x, y);
    return {static_cast<int>(x & ((1 << s.a) - 1)), static_cast<int>(y & ((1 << s.b) - 1)), x >> s.a, y >> s.b};
}

WindowPlan window_access_plan(const PAWindowSpec& s, std::int64_t x, std::int64_t y) {
    check_coord(s, x, y);
    WindowPlan plan;
    plan.rx = static_cast<int>(x & ((1 << s.a) - 1));
    plan.ry = static_cast<int>(y & ((1 << s.b) - 1));
    const std::int64_t rows = std::int64_t{1} << (s.m - s.a), cols = std::int64_t{1} << (s.n - s.b);
    for (int p = 0; p < (1 << s.a); ++p)
        for (int q = 0; q < (1 << s.b); ++q)
            plan.banks.push_back({p, q, ((x >> s.a) + (p < plan.rx ? 1 : 0)) % rows,
                                  ((y >> s.b) + (q < plan.ry ? 1 : 0)) % cols});
    return plan;
}

std::pair<std::int64_t, std::int64_t> window_pixel(const PAWindowSpec& s, std::int64_t x, std::int64_t y, int i, int j,
                                                   Boundary mode) {
    check_coord(s, x, y);
    const std::int64_t X = std::int64_t{1} << s.m, Y = std::int64_t{1} << s.n;
    if (mode == Boundary::Wrap)
        return {(x + i) % X, (y + j) % Y};
    return {std::min(x + i, X - 1), std::min(y + j, Y - 1)};
}

BAPlusMacro pa_variant(const PAWindowSpec& s, const Library& lib) {
    s.validate();
    const std::int64_t rows = std::int64_t{1} << (s.m - s.a);
    const BAPlusMacro* best = nullptr;
    for (const auto& mac : lib.macros())
        if (mac.W == s.pixel_bits && is_pow2(static_cast<std::uint64_t>(mac.B)) && mac.B <= rows &&
            (!best || mac.B > best->B))
            best = &mac;
    if (best)
        return *best;
    const int B = static_cast<int>(std::min<std::int64_t>(rows, 64));
    return generate_variant(B, s.pixel_bits, lib.tech(), VariantBounds{1, 64, 1, 64});
}

namespace {

using P = std::map<std::string, std::int64_t>;
using Conns = std::vector<std::pair<std::string, std::string>>;

std::string bank_scope(int p, int q) { return "bank_p" + std::to_string(p) + "_q" + std::to_string(q); }
std::string bank_net(int p, int q) { return "d" + std::to_string(p) + "_" + std::to_string(q); }

// Ports, origin registers and the alignment network common to both designs.
void pa_frame(NetlistBuilder& b, const PAWindowSpec& s, const BAPlusMacro& mac, Boundary mode, PAArch arch) {
    const std::string tag = arch == PAArch::SM ? "sm" : "tm";
    b.attr("design", "pa");
    b.attr("arch", tag);
    b.attr("top", "pa_" + tag + "_m" + std::to_string(s.m) + "_n" + std::to_string(s.n) + "_a" + std::to_string(s.a) +
                      "_b" + std::to_string(s.b));
    b.attr("m", std::to_string(s.m));
    b.attr("n", std::to_string(s.n));
    b.attr("a", std::to_string(s.a));
    b.attr("b", std::to_string(s.b));
    b.attr("pixel_bits", std::to_string(s.pixel_bits));
    b.attr("boundary", to_string(mode));
    b.attr("variant", mac.name);
    b.attr("B", std::to_string(mac.B));
    b.attr("W", std::to_string(mac.W));

    b.port("clk", PinDir::In, 1);
    b.port("re", PinDir::In, 1);
    b.port("we", PinDir::In, 1);
    b.port("x", PinDir::In, s.m);
    b.port("y", PinDir::In, s.n);
    b.port("wdata", PinDir::In, s.pixel_bits);
    for (int i = 0; i < (1 << s.a); ++i)
        for (int j = 0; j < (1 << s.b); ++j)
            b.port("pix" + std::to_string(i) + "_" + std::to_string(j), PinDir::Out, s.pixel_bits);

    b.net("xr", s.m);
    b.net("yr", s.n);
    b.cell("", "xreg", CellKind::OutputReg, P{{"in_w", s.m}, {"lo", 0}, {"width", s.m}, {"en", 1}},
           {{"clk", "clk"}, {"d", "x"}, {"en", "re"}, {"q", "xr"}});
    b.cell("", "yreg", CellKind::OutputReg, P{{"in_w", s.n}, {"lo", 0}, {"width", s.n}, {"en", 1}},
           {{"clk", "clk"}, {"d", "y"}, {"en", "re"}, {"q", "yr"}});
    Conns c;
    for (int p = 0; p < (1 << s.a); ++p)
        for (int q = 0; q < (1 << s.b); ++q)
            c.push_back({"d" + std::to_string(p) + "_" + std::to_string(q), b.net(bank_net(p, q), s.pixel_bits)});
    c.push_back({"x", "xr"});
    c.push_back({"y", "yr"});
    for (int i = 0; i < (1 << s.a); ++i)
        for (int j = 0; j < (1 << s.b); ++j) {
            auto name = "pix" + std::to_string(i) + "_" + std::to_string(j);
            c.push_back({name, name});
        }
    b.cell("", "align", CellKind::PaAlign,
           P{{"m", s.m}, {"n", s.n}, {"a", s.a}, {"b", s.b}, {"pb", s.pixel_bits}, {"clamp", mode == Boundary::Clamp}}, c);
}

// Per-bank write enable: we & hit.
std::string bank_write_enable(NetlistBuilder& b, const std::string& scope, const std::string& hit) {
    auto we = b.net(scope + "/we", 1);
    b.cell(scope, "we_and", CellKind::And, P{{"n", 2}}, {{"i0", "we"}, {"i1", hit}, {"y", we}});
    return we;
}

} // namespace

NetlistIR generate_pa_sm(const PAWindowSpec& s, const Library& lib, Boundary mode) {
    s.validate();
    const auto mac = pa_variant(s, lib);
    const int xb = s.m - s.a, yb = s.n - s.b;
    const int X = 1 << xb, Y = 1 << yb;
    const int K = X / mac.B; // tile rows per bank
    NetlistBuilder b;
    pa_frame(b, s, mac, mode, PAArch::SM);

    b.net("xl", X);
    b.net("yl", Y);
    b.cell("", "dec_x", CellKind::Decoder, P{{"in_w", s.m}, {"lo", s.a}, {"n", xb}, {"split", 0}}, {{"a", "x"}, {"y", "xl"}});
    b.cell("", "dec_y", CellKind::Decoder, P{{"in_w", s.n}, {"lo", s.b}, {"n", yb}, {"split", 0}}, {{"a", "y"}, {"y", "yl"}});

    for (int p = 0; p < (1 << s.a); ++p)
        for (int q = 0; q < (1 << s.b); ++q) {
            const auto sc = bank_scope(p, q);
            b.scope(sc, "");
            Conns c{{"xl", "xl"}, {"yl", "yl"}, {"x", "x"}, {"y", "y"}};
            for (int k = 0; k < K; ++k)
                c.push_back({"xo" + std::to_string(k), b.net(sc + "/xo" + std::to_string(k), mac.B)});
            for (int j = 0; j < Y; ++j)
                c.push_back({"yo" + std::to_string(j), b.net(sc + "/yo" + std::to_string(j), 1)});
            c.push_back({"hit", b.net(sc + "/hit", 1)});
            b.cell(sc, "inc", CellKind::PaIncrement,
                   P{{"mode", 0}, {"m", s.m}, {"n", s.n}, {"a", s.a}, {"b", s.b}, {"p", p}, {"q", q}, {"xgroup", mac.B}}, c);
            const auto we = bank_write_enable(b, sc, sc + "/hit");
            const auto out = bank_net(p, q);
            for (int k = 0; k < K; ++k)
                for (int j = 0; j < Y; ++j) {
                    const auto t = "k" + std::to_string(k) + "_c" + std::to_string(j);
                    const auto xo = sc + "/xo" + std::to_string(k), yo = sc + "/yo" + std::to_string(j);
                    b.cell(sc, "rwl_" + t, CellKind::WordlineGate, P{{"B", mac.B}, {"sels", 1}},
                           {{"lines", xo}, {"en", "re"}, {"s0", yo}, {"wl", b.net(sc + "/rwl_" + t, mac.B)}});
                    b.cell(sc, "wwl_" + t, CellKind::WordlineGate, P{{"B", mac.B}, {"sels", 1}},
                           {{"lines", xo}, {"en", we}, {"s0", yo}, {"wl", b.net(sc + "/wwl_" + t, mac.B)}});
                    b.cell(sc, "ba_" + t, CellKind::BAPlus, P{{"B", mac.B}, {"W", mac.W}, {"masked", 0}},
                           {{"clk", "clk"},
                            {"rwl", sc + "/rwl_" + t},
                            {"wwl", sc + "/wwl_" + t},
                            {"wd", "wdata"},
                            {"q", b.net(sc + "/q_" + t, mac.W)},
                            {"oe", b.net(sc + "/oe_" + t, 1)}});
                    b.cell(sc, "tri_" + t, CellKind::TristateDriver, P{{"width", mac.W}},
                           {{"d", sc + "/q_" + t}, {"en", sc + "/oe_" + t}, {"y", out}});
                }
        }
    return b.take();
}

NetlistIR generate_pa_tm(const PAWindowSpec& s, const Library& lib, Boundary mode) {
    s.validate();
    const auto mac = pa_variant(s, lib);
    const int xb = s.m - s.a, yb = s.n - s.b;
    const int tiles = static_cast<int>(s.words_per_bank() / mac.B);
    const MemoryConfig sub{mac.name, 1, 1, tiles, 1};
    NetlistBuilder b;
    pa_frame(b, s, mac, mode, PAArch::TM);
    b.attr("sub_config", to_string(sub));

    for (int p = 0; p < (1 << s.a); ++p)
        for (int q = 0; q < (1 << s.b); ++q) {
            const auto sc = bank_scope(p, q);
            b.scope(sc, "");
            const auto addr = b.net(sc + "/addr", xb + yb);
            b.cell(sc, "trans", CellKind::PaIncrement,
                   P{{"mode", 1}, {"m", s.m}, {"n", s.n}, {"a", s.a}, {"b", s.b}, {"p", p}, {"q", q}},
                   {{"x", "x"}, {"y", "y"}, {"addr", addr}, {"hit", b.net(sc + "/hit", 1)}});
            const auto we = bank_write_enable(b, sc, sc + "/hit");
            b.scope(sc + "/sram", sc);
            append_sram(b, sub, mac, sc + "/sram",
                        {{"clk", "clk"}, {"re", "re"}, {"raddr", addr}, {"we", we}, {"waddr", addr},
                         {"wdata", "wdata"}, {"rdata", bank_net(p, q)}});
        }
    return b.take();
}

// ---------------------------------------------------------------------------
// PPA

namespace {

struct PAShape {
    BAPlusMacro mac;
    int xb, yb, banks, tiles, tile_rows;
};

PAShape shape(const PAWindowSpec& s, const Library& lib) {
    s.validate();
    PAShape g{pa_variant(s, lib), s.m - s.a, s.n - s.b, s.banks(), 0, 0};
    g.tiles = static_cast<int>(s.words_per_bank() / g.mac.B);
    g.tile_rows = (1 << g.xb) / g.mac.B;
    return g;
}

// Both designs place the same banks in a 2^a x 2^b grid.
double wire_energy(const PAWindowSpec& s, const PAShape& g, const TechParams& tech) {
    const MemoryConfig grid{g.mac.name, 1 << s.a, (1 << s.b) * (1 << g.yb), g.tile_rows, 1};
    return tech.e_wire_per_um * estimate_dimensions(grid, g.mac, tech).semiperimeter_um();
}

double align_levels(const PAWindowSpec& s) { return s.a + s.b; }

double align_energy(const PAWindowSpec& s, const PAShape& g, const TechParams& tech) {
    return tech.e_align_per_bit * s.pixel_bits * g.banks * align_levels(s);
}

double align_area(const PAWindowSpec& s, const PAShape& g, const TechParams& tech) {
    return tech.area_align_per_bit * s.pixel_bits * g.banks * align_levels(s);
}

double align_delay(const PAWindowSpec& s, const TechParams& tech) {
    return align_levels(s) > 0 ? tech.t_align0 + tech.t_align_per_level * align_levels(s) : 0.0;
}

PPAEstimate sub_sram_ppa(const PAShape& g, const TechParams& tech) {
    const Library one(tech, {g.mac});
    return evaluate_ppa(MemoryConfig{g.mac.name, 1, 1, g.tiles, 1}, one, tech);
}

} // namespace

double pa_op_overhead_fj(const PAWindowSpec& s, PAArch arch, const Library& lib, const TechParams& tech) {
    const auto g = shape(s, lib);
    const double shared = align_energy(s, g, tech) + wire_energy(s, g, tech);
    if (arch == PAArch::SM)
        return decode_energy(tech, g.xb) + decode_energy(tech, g.yb) + tech.e_ctrl + g.banks * tech.e_inc + shared;
    return g.banks * (decode_energy(tech, g.xb + g.yb) + tech.e_ctrl + tech.e_trans_per_bit * (g.xb + g.yb)) + shared;
}

PPAEstimate pa_ppa(const PAWindowSpec& s, PAArch arch, const Library& lib, const TechParams& tech) {
    const auto g = shape(s, lib);
    PPAEstimate p;
    p.e_op_fj = pa_op_overhead_fj(s, arch, lib, tech) + g.banks * g.mac.e_read;
    if (arch == PAArch::SM) {
        const double storage = double(g.banks) * g.tiles * g.mac.area_um2(tech) * (1.0 + tech.periph_fraction);
        p.area_um2 = storage + decoder_area(tech, g.xb) + decoder_area(tech, g.yb) +
                     g.banks * tech.area_inc_per_line * double((1 << g.xb) + (1 << g.yb)) + align_area(s, g, tech);
        p.t_cycle_ps = decode_delay(tech, std::max(g.xb, g.yb)) + tech.t_inc + g.mac.t_access +
                       bitline_delay(tech, g.tiles) + align_delay(s, tech);
        p.p_leak_nw = double(g.banks) * g.tiles * g.mac.p_leak + tech.p_leak_periph;
    } else {
        const auto sub = sub_sram_ppa(g, tech);
        p.area_um2 = g.banks * (sub.area_um2 + tech.area_ctrl + tech.area_trans_per_bit * (g.xb + g.yb)) +
                     align_area(s, g, tech);
        p.t_cycle_ps = tech.t_trans_per_bit * (g.xb + g.yb) + sub.t_cycle_ps + align_delay(s, tech);
        p.p_leak_nw = g.banks * sub.p_leak_nw;
    }
    p.gops_per_watt = gops_per_watt(p.e_op_fj, p.p_leak_nw, p.t_cycle_ps);
    return p;
}

PAComparison compare_pa_ppa(const PAWindowSpec& s, const Library& lib, const TechParams& tech) {
    return {pa_ppa(s, PAArch::SM, lib, tech), pa_ppa(s, PAArch::TM, lib, tech)};
}

std::string pa_csv(const PAComparison& c) {
    std::string out = csv_row({"design", "area_um2", "t_cycle_ps", "e_op_fj", "gops_per_watt"});
    for (const auto& [name, p] : {std::pair{"SM", c.sm}, std::pair{"TM", c.tm}})
        out += csv_row({name, format_number(p.area_um2), format_number(p.t_cycle_ps), format_number(p.e_op_fj),
                        format_number(p.gops_per_watt)});
    return out;
}

} // namespace smemsynth
