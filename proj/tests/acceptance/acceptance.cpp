// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "smemsynth/explorer.hpp"
#include "smemsynth/floorplan.hpp"
#include "smemsynth/leafcell.hpp"
#include "smemsynth/netlist.hpp"
#include "smemsynth/pa.hpp"
#include "smemsynth/parallel.hpp"
#include "smemsynth/sim.hpp"

namespace fs = std::filesystem;
using namespace smemsynth;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::vector<PAWindowSpec> pa_sweep() {
    std::vector<PAWindowSpec> v;
    for (int m = 3; m <= 6; ++m)
        for (int n = 3; n <= 6; ++n)
            for (int a = 0; a <= 2; ++a)
                for (int b = 0; b <= 2; ++b)
                    v.push_back({m, n, a, b, 8});
    return v;
}

// 1. Exhaustive origin sweep against the toroidal reference.
Outcome pa_correctness() {
    const auto lib = default_library();
    const auto specs = pa_sweep();
    std::vector<std::uint64_t> mism(specs.size()), confl(specs.size()), miscount(specs.size());
    parallel_for(specs.size(), [&](std::size_t k) {
        const auto& s = specs[k];
        const auto ir = generate_pa_sm(s, lib);
        const std::int64_t X = std::int64_t{1} << s.m, Y = std::int64_t{1} << s.n;
        std::mt19937_64 rng(1000 + k);
        std::vector<std::uint64_t> img(static_cast<std::size_t>(X * Y));
        for (auto& p : img)
            p = rng() & 0xff;
        SimTrace t;
        std::int64_t cyc = 0;
        for (std::int64_t x = 0; x < X; ++x)
            for (std::int64_t y = 0; y < Y; ++y)
                t.cycles.push_back({cyc++, WriteOp{static_cast<std::uint64_t>(x * Y + y), img[x * Y + y]}, {}, {}});
        for (std::int64_t x = 0; x < X; ++x)
            for (std::int64_t y = 0; y < Y; ++y)
                t.cycles.push_back({cyc++, {}, {}, WindowOp{static_cast<std::uint64_t>(x), static_cast<std::uint64_t>(y)}});
        const auto r = simulate(ir, t);
        confl[k] = r.conflicts;
        std::size_t o = 0;
        for (std::int64_t x = 0; x < X; ++x)
            for (std::int64_t y = 0; y < Y; ++y, ++o) {
                bool bad = o >= r.outputs.size();
                for (int i = 0; i < (1 << s.a) && !bad; ++i)
                    for (int j = 0; j < (1 << s.b) && !bad; ++j)
                        bad = r.outputs[o].data[static_cast<std::size_t>((i << s.b) + j)] !=
                              oracle::torus_pixel(img, s.m, s.n, x, y, i, j);
                mism[k] += bad;
            }
        // Every window must have fired each bank's array exactly once.
        std::uint64_t reads = 0;
        for (const auto& [id, a] : r.activity)
            reads += a.reads;
        miscount[k] = reads != static_cast<std::uint64_t>(X * Y * s.banks());
    });
    std::uint64_t M = 0, C = 0, A = 0;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        M += mism[k];
        C += confl[k];
        A += miscount[k];
    }
    return {M == 0 && C == 0 && A == 0, std::to_string(specs.size()) + " specs, mismatches=" + std::to_string(M) +
                                            " conflicts=" + std::to_string(C) +
                                            " activation_count_errors=" + std::to_string(A)};
}

// 2. SM and TM produce identical outputs on random traces.
Outcome pa_equivalence() {
    const auto lib = default_library();
    const auto specs = pa_sweep();
    std::vector<int> diff(specs.size());
    parallel_for(specs.size(), [&](std::size_t k) {
        const auto& s = specs[k];
        const auto sm = generate_pa_sm(s, lib);
        const auto tm = generate_pa_tm(s, lib);
        std::mt19937_64 rng(77 + k);
        SimTrace t;
        for (std::int64_t c = 0; c < 10000; ++c) {
            TraceCycle tc{c, {}, {}, {}};
            if (rng() % 2)
                tc.write = WriteOp{rng() & ((1ull << (s.m + s.n)) - 1), rng() & 0xff};
            else
                tc.window = WindowOp{rng() & ((1ull << s.m) - 1), rng() & ((1ull << s.n) - 1)};
            t.cycles.push_back(tc);
        }
        const auto a = simulate(sm, t);
        const auto b = simulate(tm, t);
        diff[k] = a.outputs != b.outputs || a.outputs.empty();
    });
    int bad = 0;
    for (int d : diff)
        bad += d;
    return {bad == 0, std::to_string(specs.size()) + " specs x 10000 ops, differing specs=" + std::to_string(bad)};
}

// 3. Enumeration equals brute force; the 256x8/{32x8} case has 10 configs.
Outcome enumeration() {
    const TechParams tech;
    const auto full = default_library(tech);
    std::mt19937_64 rng(3);
    int bad = 0;
    for (int i = 0; i < 50; ++i) {
        std::vector<BAPlusMacro> pick;
        for (const auto& m : full.macros())
            if (rng() % 3 == 0)
                pick.push_back(m);
        if (pick.empty())
            pick.push_back(full.macros()[rng() % full.macros().size()]);
        const Library lib(tech, pick);
        UserSpec s;
        s.words = std::int64_t{1} << (rng() % 13);
        s.bits = std::int64_t{1} << (rng() % 8);
        if (i % 3 == 0) {
            s.aspect_ratio_target = 0.25 + static_cast<double>(rng() % 300) / 100.0;
            s.aspect_ratio_tol = static_cast<double>(rng() % 90) / 100.0;
        }
        bad += enumerate_configs(s, lib) != oracle::brute_enumerate(s, lib);
    }
    UserSpec s;
    s.words = 256;
    s.bits = 8;
    const Library lib32(tech, {generate_variant(32, 8, tech)});
    const auto n = enumerate_configs(s, lib32).size();
    return {bad == 0 && n == 10,
            "50 random specs, disagreements=" + std::to_string(bad) + "; 256x8/{32x8} -> " + std::to_string(n)};
}

// 4. Pareto front equals the quadratic dominance filter.
Outcome pareto() {
    std::mt19937_64 rng(4);
    int bad = 0;
    for (int c = 0; c < 100; ++c) {
        std::vector<Candidate> pts;
        for (int i = 0; i < 200; ++i) {
            PPAEstimate p;
            // Coarse values so ties and duplicates occur.
            p.area_um2 = static_cast<double>(rng() % 40);
            p.t_cycle_ps = static_cast<double>(rng() % 40);
            p.e_op_fj = static_cast<double>(rng() % 40);
            pts.push_back({MemoryConfig{"v", 1 << (i % 8), 1 << (i / 8 % 5), 1 << (i / 40), 1}, p});
        }
        std::set<MemoryConfig> got;
        for (const auto& f : pareto_front(pts))
            got.insert(f.cfg);
        bad += got != oracle::quadratic_front(pts);
    }
    return {bad == 0, "100 clouds x 200 points, disagreements=" + std::to_string(bad)};
}

std::vector<MemoryConfig> random_configs(std::mt19937_64& rng, const Library& lib, std::size_t count, int max_bits) {
    std::vector<MemoryConfig> out;
    while (out.size() < count) {
        const auto& m = lib.macros()[rng() % lib.macros().size()];
        MemoryConfig c{m.name, 1 << (rng() % 3), 1 << (rng() % 4), 1 << (rng() % 3), 1 << (rng() % 4)};
        if ((c.C * m.W) % c.M != 0 || c.C * m.W / c.M > max_bits || c.C * m.W < c.M)
            continue;
        out.push_back(c);
    }
    return out;
}

// 5. 1R-1W simulation against the flat memory model.
Outcome simulator() {
    const auto lib = default_library();
    std::mt19937_64 rng(5);
    const auto cfgs = random_configs(rng, lib, 20, 64);
    std::vector<int> bad(cfgs.size());
    parallel_for(cfgs.size(), [&](std::size_t k) {
        const auto& cfg = cfgs[k];
        const auto& m = lib.at(cfg.variant);
        const auto ir = generate_sram(cfg, lib);
        const auto words = static_cast<std::uint64_t>(cfg.words(m));
        const int width = static_cast<int>(cfg.bits(m));
        std::mt19937_64 r(500 + k);
        SimTrace t;
        for (std::int64_t c = 0; c < 10000; ++c) {
            TraceCycle tc{c, {}, {}, {}};
            const auto kind = r() % 3;
            if (kind != 1)
                tc.write = WriteOp{r() % words, r() & (width >= 64 ? ~0ull : (1ull << width) - 1)};
            if (kind != 0)
                tc.read = ReadOp{kind == 2 && tc.write ? tc.write->addr : r() % words};
            t.cycles.push_back(tc);
        }
        bad[k] = simulate(ir, t).outputs != oracle::flat_memory(t, words, width);
    });
    // Read-during-write to one address returns the old word.
    const MemoryConfig c1{"ba_32x8", 1, 1, 1, 1};
    const auto ir = generate_sram(c1, lib);
    SimTrace t;
    t.cycles.push_back({0, WriteOp{7, 0x12}, {}, {}});
    t.cycles.push_back({1, WriteOp{7, 0x34}, ReadOp{7}, {}});
    t.cycles.push_back({2, {}, ReadOp{7}, {}});
    const auto r = simulate(ir, t);
    const bool rdw = r.outputs.size() == 2 && r.outputs[0].data[0] == 0x12 && r.outputs[1].data[0] == 0x34;
    int nbad = 0;
    for (int b : bad)
        nbad += b;
    return {nbad == 0 && rdw, "20 configs x 10000 ops, differing configs=" + std::to_string(nbad) +
                                   "; read-during-write old data: " + (rdw ? "yes" : "no")};
}

// 6. Floorplan geometry.
Outcome floorplans() {
    const TechParams tech;
    const auto lib = default_library(tech);
    std::mt19937_64 rng(6);
    const auto cfgs = random_configs(rng, lib, 50, 1 << 20);
    int bad = 0;
    for (const auto& cfg : cfgs) {
        const auto& m = lib.at(cfg.variant);
        const double logic = logic_area(cfg, lib, tech);
        const auto fp = realize(cfg, m, tech, logic);
        const auto est = estimate_dimensions(cfg, m, tech, logic);
        std::map<std::string, int> seen;
        for (const auto& p : fp.placements)
            if (p.kind == RectKind::Macro)
                ++seen[p.instance];
        bool ok = oracle::geometry_problems(fp).empty() && seen.size() == static_cast<std::size_t>(cfg.macro_count());
        for (const auto& [name, count] : seen)
            ok = ok && count == 1;
        const auto bb = fp.bounding_box();
        ok = ok && bb.first == est.w && bb.second == est.h && fp.die_w == est.w && fp.die_h == est.h;
        const auto fp0 = realize(cfg, m, tech);
        const auto est0 = estimate_dimensions(cfg, m, tech);
        ok = ok && fp0.bounding_box() == std::make_pair(est0.w, est0.h);
        bad += !ok;
    }
    return {bad == 0, "50 configs, failing=" + std::to_string(bad)};
}

// 7. Calibration brackets under the shipped library and tech.
Outcome calibration() {
    const TechParams tech;
    const auto lib = default_library(tech);
    std::ostringstream d;
    const auto& a = lib.at("ba_32x16");
    const auto& b = lib.at("ba_64x8");
    const bool ok_a = a.t_access < b.t_access && a.area_um2(tech) < b.area_um2(tech) && b.e_read < a.e_read;
    d << "(a) " << (ok_a ? "ok" : "FAIL");

    const auto cmp = compare_pa_ppa({5, 5, 1, 1, 8}, lib, tech);
    const double ratio = cmp.sm.area_um2 / cmp.tm.area_um2;
    const bool ok_b = ratio >= 0.60 && ratio <= 0.85 && cmp.sm.gops_per_watt > cmp.tm.gops_per_watt;
    d << "; (b) area_SM/area_TM=" << ratio << " gops SM/TM=" << cmp.sm.gops_per_watt << "/" << cmp.tm.gops_per_watt;

    UserSpec s;
    s.words = 256;
    s.bits = 16;
    const auto all = evaluate_all(enumerate_configs(s, lib), lib, tech);
    const auto sel = select_best(pareto_front(all), s);
    const auto trad = traditional_ppa(256, 16, tech);
    const double gain = sel.choice.ppa.gops_per_watt / trad.gops_per_watt;
    const bool ok_c = gain >= 1.05;
    d << "; (c) " << to_string(sel.choice.cfg) << " gops/W gain=" << gain;
    return {ok_a && ok_b && ok_c, d.str()};
}

// 8. Leaf-cell fixtures.
Outcome leafcells(const fs::path& data) {
    const auto dir = data / "fixtures" / "leafcell";
    auto load = [&](const char* f) { return load_layout((dir / f).string()); };
    std::ostringstream d;
    bool ok = true;
    auto expect = [&](const std::string& what, const std::string& got, const std::string& want) {
        if (got != want) {
            ok = false;
            d << what << "=" << got << " (want " << want << ") ";
        }
    };
    const auto nu = load("nand2_unidir.cell"), nb = load("nand2_bidir.cell");
    const auto du = load("dffq_unidir.cell"), db = load("dffq_bidir.cell");
    expect("NAND2 UniDir", transistor_efficiency(nu).str(), "2/4");
    expect("NAND2 BiDir", transistor_efficiency(nb).str(), "2/4");
    expect("DFFQ UniDir", transistor_efficiency(du).str(), "13/25");
    expect("DFFQ BiDir", transistor_efficiency(db).str(), "13/23");
    for (const auto* g : {&nu, &nb, &du, &db}) {
        expect(g->name + " rails", power_rail_efficiency(*g).str(), "2/10");
        if (std::abs(fin_efficiency(*g).value() - 0.6667) > 1e-4) {
            ok = false;
            d << g->name << " fin efficiency " << fin_efficiency(*g).value() << " ";
        }
    }
    int checked = 0, disagree = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() != ".cell")
            continue;
        const auto g = load_layout(e.path().string());
        std::vector<std::string> layers;
        for (const auto& l : g.layers)
            layers.push_back(l.name);
        for (const auto& tgt : layers)
            for (int w : {1, 2, 3, 5, 7}) {
                const auto got = count_constructs(g, tgt, w, layers);
                const auto want = oracle::naive_constructs(g, tgt, w, layers);
                ++checked;
                disagree += got.interior != want.first || got.boundary != want.second;
            }
    }
    ok = ok && disagree == 0 && checked > 0;
    d << "metrics vs 2/4 13/25 13/23 2/10 fin 0.6667; construct counts checked=" << checked << " disagreements=" << disagree;
    return {ok, d.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// 9. Every CLI command twice with the same seed: identical bytes.
Outcome determinism(const fs::path& cli, const fs::path& data, const fs::path& scratch) {
    const auto fx = data / "fixtures";
    fs::remove_all(scratch);
    fs::create_directories(scratch);
    const auto net = scratch / "net";
    const std::string q = "\"";
    auto path = [&](const fs::path& p) { return q + p.string() + q; };
    // The synth netlist feeds the sim commands.
    const std::string prep = path(cli) + " synth --spec " + path(fx / "specs" / "spec_256x16.json") + " --out " +
                             path(net) + " > " + path(scratch / "prep.log");
    if (std::system(prep.c_str()) != 0)
        return {false, "synth for the sim netlist failed"};
    fs::path netfile;
    for (const auto& e : fs::directory_iterator(net))
        if (e.path().extension() == ".net")
            netfile = e.path();

    std::vector<std::string> cmds = {
        "genlib --seed 1",
        "genlib --b 8,16 --w 8,32",
        "explore --spec " + path(fx / "specs" / "spec_256x8.json") + " --lib " + path(fx / "libs" / "lib_32x8.json"),
        "explore --spec " + path(fx / "specs" / "spec_1024x32_ar.json") + " --ar-tol 0.4 --bounds 0,8,0,0",
        "synth --spec " + path(fx / "specs" / "spec_256x16.json"),
        "synth --spec " + path(fx / "specs" / "spec_1024x32_ar.json"),
        "pa --spec " + path(fx / "specs" / "pa_5511.json") + " --seed 7",
        "pa --pa 4,4,2,1 --boundary clamp --seed 7",
        "sim --netlist " + path(netfile) + " --random 2000 --seed 11",
        "sim --netlist " + path(netfile) + " --trace " + path(fx / "traces" / "store_load.trace"),
        "sim --netlist " + path(netfile) + " --trace " + path(fx / "traces" / "empty.trace"),
        "leafcell " + path(fx / "leafcell" / "nand2_unidir.cell") + " " + path(fx / "leafcell" / "nand2_bidir.cell") +
            " " + path(fx / "leafcell" / "dffq_unidir.cell") + " " + path(fx / "leafcell" / "dffq_bidir.cell") +
            " " + path(fx / "leafcell" / "track_plan_unidir.cell"),
    };
    int bad = 0;
    std::string first_bad;
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        const auto out = scratch / ("cmd" + std::to_string(i));
        std::map<std::string, std::string> runs[2];
        for (int r = 0; r < 2; ++r) {
            fs::remove_all(out);
            const std::string line =
                path(cli) + " " + cmds[i] + " --out " + path(out) + " > " + path(scratch / "stdout.txt");
            const int rc = std::system(line.c_str());
            runs[r]["<exit>"] = std::to_string(rc);
            runs[r]["<stdout>"] = slurp(scratch / "stdout.txt");
            for (const auto& e : fs::directory_iterator(out))
                runs[r][e.path().filename().string()] = slurp(e.path());
        }
        if (runs[0] != runs[1] || runs[0]["<exit>"] != "0" || runs[0].size() < 3) {
            ++bad;
            if (first_bad.empty())
                first_bad = cmds[i].substr(0, cmds[i].find(' '));
        }
    }
    return {bad == 0, std::to_string(cmds.size()) + " command lines, nondeterministic or failing=" +
                          std::to_string(bad) + (first_bad.empty() ? "" : " (first: " + first_bad + ")")};
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 4) {
        std::cerr << "usage: acceptance <smemsynth-binary> <data-dir> <scratch-dir>\n";
        return 2;
    }
    const fs::path cli = argv[1], data = argv[2], scratch = argv[3];
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all = {
        {1, "pa-conflict-free-correct", 60, pa_correctness},
        {2, "pa-sm-tm-equivalence", 30, pa_equivalence},
        {3, "enumeration-vs-brute-force", 10, enumeration},
        {4, "pareto-vs-quadratic-filter", 5, pareto},
        {5, "simulator-vs-flat-memory", 30, simulator},
        {6, "floorplan-geometry", 10, floorplans},
        {7, "model-calibration", 5, calibration},
        {8, "leafcell-fixtures", 5, [&] { return leafcells(data); }},
        {9, "cli-determinism", 60, [&] { return determinism(cli, data, scratch); }},
    };
    int failed = 0;
    for (const auto& c : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = o.pass && in_time;
        failed += !pass;
        char timing[64];
        std::snprintf(timing, sizeof timing, "%.2f s / %.0f s", secs, c.budget_s);
        std::cout << (pass ? "PASS " : "FAIL ") << c.id << " " << c.name << ": " << o.detail << " [" << timing
                  << (in_time ? "" : ", over budget") << "]" << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
