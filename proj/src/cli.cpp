#include "smemsynth/cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "smemsynth/baplus.hpp"
#include "smemsynth/common.hpp"
#include "smemsynth/explorer.hpp"
#include "smemsynth/floorplan.hpp"
#include "smemsynth/leafcell.hpp"
#include "smemsynth/netlist.hpp"
#include "smemsynth/pa.hpp"
#include "smemsynth/report.hpp"
#include "smemsynth/sim.hpp"
#include "smemsynth/tech.hpp"

namespace fs = std::filesystem;

namespace smemsynth {

namespace {

// Bad or missing inputs; maps to the usage exit code.
class UsageError : public Error {
  public:
    using Error::Error;
};

struct RunConfig {
    std::string lib_path, tech_path, spec_path, out_dir = "out";
    std::uint64_t seed = 0;
    std::optional<double> ar_tol;
    std::string boundary = "wrap";
    std::string bounds;

    // genlib
    std::vector<int> b_values{8, 16, 32, 64}, w_values{8, 16, 32, 64};
    // synth
    std::string config_path;
    // pa
    std::string pa_spec;
    // sim
    std::string netlist_path, trace_path;
    std::size_t random_ops = 0;
    // leafcell
    std::vector<std::string> fixtures;
    std::string target_layer = "v0";
    std::vector<std::string> relevant_layers;
    int window = 5;
};

void require_file(const std::string& path, const char* flag) {
    if (path.empty())
        throw UsageError(std::string("missing required option ") + flag);
    if (!fs::is_regular_file(path))
        throw UsageError(std::string(flag) + ": no such file: " + path);
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f)
        throw Error("write failed: " + path.string());
}

fs::path out_dir(const RunConfig& rc) {
    fs::path d(rc.out_dir);
    std::error_code ec;
    fs::create_directories(d, ec);
    if (ec)
        throw UsageError("--out: cannot create " + rc.out_dir + ": " + ec.message());
    return d;
}

TechParams tech_of(const RunConfig& rc) {
    if (rc.tech_path.empty())
        return {};
    require_file(rc.tech_path, "--tech");
    return load_tech(rc.tech_path);
}

// --lib wins; otherwise the default library under --tech.
Library library_of(const RunConfig& rc) {
    if (!rc.lib_path.empty()) {
        require_file(rc.lib_path, "--lib");
        return load_library(rc.lib_path);
    }
    return default_library(tech_of(rc));
}

EnumBounds bounds_of(const RunConfig& rc) {
    EnumBounds b;
    if (rc.bounds.empty())
        return b;
    std::vector<int> v;
    std::stringstream ss(rc.bounds);
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            std::size_t pos = 0;
            v.push_back(std::stoi(item, &pos));
            if (pos != item.size() || v.back() < 0)
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("--bounds: expected four non-negative integers R,C,K,M");
        }
    }
    if (v.size() != 4)
        throw UsageError("--bounds: expected four non-negative integers R,C,K,M");
    return {v[0], v[1], v[2], v[3]};
}

UserSpec spec_of(const RunConfig& rc) {
    require_file(rc.spec_path, "--spec");
    auto s = load_spec(rc.spec_path);
    if (rc.ar_tol)
        s.aspect_ratio_tol = *rc.ar_tol;
    s.validate();
    return s;
}

nlohmann::ordered_json ppa_json(const PPAEstimate& p) {
    nlohmann::ordered_json j;
    j["area_um2"] = p.area_um2;
    j["t_cycle_ps"] = p.t_cycle_ps;
    j["e_op_fj"] = p.e_op_fj;
    j["p_leak_nw"] = p.p_leak_nw;
    j["gops_per_watt"] = p.gops_per_watt;
    return j;
}

struct Explored {
    std::vector<Candidate> all, front;
    Selection sel;
};

Explored explore(const UserSpec& spec, const Library& lib, const TechParams& tech, const EnumBounds& bounds) {
    Explored e;
    e.all = evaluate_all(enumerate_configs(spec, lib, bounds), lib, tech);
    if (e.all.empty())
        throw ConstraintError("no configuration of the library meets the spec");
    e.front = pareto_front(e.all);
    e.sel = select_best(e.front, spec);
    return e;
}

int cmd_genlib(const RunConfig& rc, std::ostream& out) {
    const auto tech = tech_of(rc);
    const auto lib = generate_library(rc.b_values, rc.w_values, tech, VariantBounds{1, 64, 1, 64});
    const auto dir = out_dir(rc);
    write_file(dir / "library.json", library_to_string(lib));
    std::string csv = csv_row({"variant", "B", "W", "area_um2", "t_access_ps", "e_read_fj", "e_write_fj", "p_leak_nw"});
    for (const auto& m : lib.macros())
        csv += csv_row({m.name, std::to_string(m.B), std::to_string(m.W), format_number(m.area_um2(tech)),
                        format_number(m.t_access), format_number(m.e_read), format_number(m.e_write),
                        format_number(m.p_leak)});
    write_file(dir / "library.csv", csv);
    out << "genlib: " << lib.macros().size() << " variants -> " << (dir / "library.json").string() << "\n";
    return kExitOk;
}

int cmd_explore(const RunConfig& rc, std::ostream& out) {
    const auto lib = library_of(rc);
    const auto tech = lib.tech();
    const auto spec = spec_of(rc);
    const auto e = explore(spec, lib, tech, bounds_of(rc));
    const auto dir = out_dir(rc);
    write_file(dir / "explore.csv", explore_csv(e.all, e.front));
    write_file(dir / "explore.dat", explore_plot_data(e.all, e.front));
    nlohmann::ordered_json j;
    j["config"] = config_to_json(e.sel.choice.cfg);
    j["ppa"] = ppa_json(e.sel.choice.ppa);
    j["feasible"] = e.sel.feasible;
    j["violation"] = e.sel.violation;
    write_file(dir / "choice.json", j.dump(2) + "\n");
    out << "explore: " << e.all.size() << " configs, " << e.front.size() << " on the front, chose "
        << to_string(e.sel.choice.cfg) << (e.sel.feasible ? "" : " (infeasible)") << "\n";
    return kExitOk;
}

int cmd_synth(const RunConfig& rc, std::ostream& out) {
    const auto lib = library_of(rc);
    const auto tech = lib.tech();
    MemoryConfig cfg;
    FloorplanOptions fo;
    if (!rc.config_path.empty()) {
        require_file(rc.config_path, "--config");
        std::ifstream f(rc.config_path, std::ios::binary);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(f);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(rc.config_path, e.what());
        }
        cfg = config_from_json(j.contains("config") ? j["config"] : j, rc.config_path);
        if (rc.ar_tol)
            fo.ar_tol = *rc.ar_tol;
    } else {
        const auto spec = spec_of(rc);
        cfg = explore(spec, lib, tech, bounds_of(rc)).sel.choice.cfg;
        fo.ar_target = spec.aspect_ratio_target;
        fo.ar_tol = spec.aspect_ratio_tol;
    }
    const auto& mac = lib.at(cfg.variant);
    validate_config(cfg, mac);
    const auto ir = generate_sram(cfg, lib);
    if (auto v = check_wellformed(ir); !v.empty())
        throw Error("generated netlist is malformed: " + v.front());
    const auto fp = realize(cfg, mac, tech, logic_area(cfg, lib, tech), fo);
    const auto problems = check_floorplan(fp, cfg);
    const auto ppa = evaluate_ppa(cfg, lib, tech);

    const auto dir = out_dir(rc);
    const auto top = ir.attr("top");
    write_file(dir / (top + ".net"), netlist_to_text(ir));
    write_file(dir / (top + ".v"), emit_verilog(ir));
    write_file(dir / "floorplan.txt", floorplan_to_text(fp));
    write_file(dir / "floorplan.csv", floorplan_to_csv(fp));
    nlohmann::ordered_json j;
    j["config"] = config_to_json(cfg);
    j["ppa"] = ppa_json(ppa);
    j["die_w_nm"] = fp.die_w;
    j["die_h_nm"] = fp.die_h;
    j["ar_miss"] = fp.ar_miss;
    write_file(dir / "synth.json", j.dump(2) + "\n");
    out << "synth: " << top << " (" << ir.cells.size() << " cells, " << ir.nets.size() << " nets)\n";
    for (const auto& p : problems)
        out << "floorplan: " << p << "\n";
    return problems.empty() ? kExitOk : kExitVerifyFailed;
}

PAWindowSpec pa_spec_of(const RunConfig& rc) {
    if (!rc.pa_spec.empty() && !rc.spec_path.empty())
        throw UsageError("give either --pa or --spec, not both");
    if (!rc.pa_spec.empty())
        return parse_pa_spec(rc.pa_spec);
    require_file(rc.spec_path, "--spec");
    std::ifstream f(rc.spec_path, std::ios::binary);
    try {
        auto j = nlohmann::json::parse(f);
        return pa_spec_from_json(j.contains("pa") ? j["pa"] : j, rc.spec_path);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(rc.spec_path, e.what());
    }
}

int cmd_pa(const RunConfig& rc, std::ostream& out) {
    const auto lib = library_of(rc);
    const auto tech = lib.tech();
    const auto s = pa_spec_of(rc);
    s.validate();
    const auto mode = parse_boundary(rc.boundary);
    const auto sm = generate_pa_sm(s, lib, mode);
    const auto tm = generate_pa_tm(s, lib, mode);
    const auto rsm = verify_pa(s, sm, rc.seed);
    const auto rtm = verify_pa(s, tm, rc.seed);
    const bool same = rsm.outputs == rtm.outputs;
    const auto cmp = compare_pa_ppa(s, lib, tech);

    const auto dir = out_dir(rc);
    write_file(dir / "pa_sm.net", netlist_to_text(sm));
    write_file(dir / "pa_tm.net", netlist_to_text(tm));
    write_file(dir / "pa_sm.v", emit_verilog(sm));
    write_file(dir / "pa_tm.v", emit_verilog(tm));
    write_file(dir / "pa_compare.csv", pa_csv(cmp));
    std::string rep = "# sm\n" + verify_report_text(rsm) + "# tm\n" + verify_report_text(rtm) +
                      "sm_tm_equivalent=" + (same ? "yes" : "no") + "\n";
    write_file(dir / "verify.txt", rep);
    out << "pa " << to_string(s) << " " << to_string(mode) << ": sm " << "mismatches=" << rsm.mismatches
        << " conflicts=" << rsm.conflicts << ", tm mismatches=" << rtm.mismatches << " conflicts=" << rtm.conflicts
        << ", equivalent=" << (same ? "yes" : "no") << "\n";
    out << "area sm/tm " << format_number(cmp.sm.area_um2 / cmp.tm.area_um2) << ", gops/W sm "
        << format_number(cmp.sm.gops_per_watt) << " tm " << format_number(cmp.tm.gops_per_watt) << "\n";
    return rsm.ok() && rtm.ok() && same ? kExitOk : kExitVerifyFailed;
}

int cmd_sim(const RunConfig& rc, std::ostream& out) {
    require_file(rc.netlist_path, "--netlist");
    if (!rc.trace_path.empty() && rc.random_ops)
        throw UsageError("give either --trace or --random, not both");
    const auto ir = load_netlist(rc.netlist_path);
    if (auto v = check_wellformed(ir); !v.empty())
        throw ParseError(rc.netlist_path, "malformed netlist: " + v.front());
    SimTrace trace;
    if (!rc.trace_path.empty()) {
        require_file(rc.trace_path, "--trace");
        trace = load_trace(rc.trace_path);
    } else if (rc.random_ops) {
        trace = random_trace(ir, rc.random_ops, rc.seed);
    }
    const auto lib = library_of(rc);
    auto res = simulate(ir, trace);
    res.e_total_fj = energy_report(res, lib, lib.tech());
    const auto dir = out_dir(rc);
    write_file(dir / "result.txt", result_to_text(res));
    if (rc.random_ops)
        write_file(dir / "trace.txt", trace_to_text(trace));
    out << "sim: " << res.outputs.size() << " outputs over " << res.cycles << " cycles, e_total "
        << format_number(res.e_total_fj) << " fJ\n";
    return res.conflicts == 0 ? kExitOk : kExitVerifyFailed;
}

int cmd_leafcell(const RunConfig& rc, std::ostream& out) {
    if (rc.fixtures.empty())
        throw UsageError("leafcell needs at least one fixture file");
    std::vector<GridLayout> cells;
    for (const auto& f : rc.fixtures) {
        require_file(f, "fixture");
        cells.push_back(load_layout(f));
    }
    std::string constructs =
        csv_row({"cell", "target", "window", "targets", "interior_unique", "boundary_unique", "unique"});
    std::string violations;
    for (const auto& g : cells) {
        std::vector<std::string> layers = rc.relevant_layers;
        if (layers.empty())
            for (const auto& l : g.layers)
                layers.push_back(l.name);
        const auto cc = count_constructs(g, rc.target_layer, rc.window, layers);
        constructs += csv_row({g.name, rc.target_layer, std::to_string(rc.window), std::to_string(cc.targets),
                               std::to_string(cc.interior), std::to_string(cc.boundary), std::to_string(cc.unique())});
        for (const auto& v : check_restrictions(g))
            violations += g.name + ": " + v + "\n";
    }
    const auto dir = out_dir(rc);
    const auto report = leafcell_report(cells);
    write_file(dir / "leafcell.csv", report);
    write_file(dir / "constructs.csv", constructs);
    write_file(dir / "violations.txt", violations);
    out << report;
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"smemsynth: smart-memory synthesis, exploration and analysis"};
    app.require_subcommand(1);
    RunConfig rc;

    auto common = [&](CLI::App* c) {
        c->add_option("--lib", rc.lib_path, "Library JSON (default: built-in library)");
        c->add_option("--tech", rc.tech_path, "Technology JSON (default: built-in parameters)");
        c->add_option("--out", rc.out_dir, "Output directory")->capture_default_str();
        c->add_option("--seed", rc.seed, "Seed for all randomness")->capture_default_str();
    };

    auto* genlib = app.add_subcommand("genlib", "Characterize a grid of array variants");
    common(genlib);
    genlib->add_option("--b", rc.b_values, "Word counts B")->delimiter(',')->capture_default_str();
    genlib->add_option("--w", rc.w_values, "Word widths W")->delimiter(',')->capture_default_str();

    auto* exp = app.add_subcommand("explore", "Enumerate, evaluate and select 1R-1W configurations");
    common(exp);
    exp->add_option("--spec", rc.spec_path, "Memory spec JSON")->required();
    exp->add_option("--ar-tol", rc.ar_tol, "Aspect-ratio tolerance (overrides the spec)");
    exp->add_option("--bounds", rc.bounds, "Limits R,C,K,M (0 = unbounded)");

    auto* syn = app.add_subcommand("synth", "Generate netlist, HDL and floorplan");
    common(syn);
    syn->add_option("--spec", rc.spec_path, "Memory spec JSON (explore and take the selection)");
    syn->add_option("--config", rc.config_path, "Config JSON, e.g. choice.json from explore");
    syn->add_option("--ar-tol", rc.ar_tol, "Aspect-ratio tolerance");
    syn->add_option("--bounds", rc.bounds, "Limits R,C,K,M (0 = unbounded)");

    auto* pa = app.add_subcommand("pa", "Generate and verify parallel-access designs");
    common(pa);
    pa->add_option("--pa", rc.pa_spec, "Window spec m,n,a,b[,pixel_bits]");
    pa->add_option("--spec", rc.spec_path, "Window spec JSON");
    pa->add_option("--boundary", rc.boundary, "Window boundary mode")
        ->check(CLI::IsMember({"wrap", "clamp"}))
        ->capture_default_str();

    auto* sim = app.add_subcommand("sim", "Simulate a netlist");
    common(sim);
    sim->add_option("--netlist", rc.netlist_path, "Netlist text file")->required();
    sim->add_option("--trace", rc.trace_path, "Trace file (default: empty trace)");
    sim->add_option("--random", rc.random_ops, "Simulate a seeded random trace of this many busy cycles");

    auto* leaf = app.add_subcommand("leafcell", "Leaf-cell efficiency and construct analysis");
    common(leaf);
    leaf->add_option("fixtures", rc.fixtures, "Layout fixture files")->required();
    leaf->add_option("--target", rc.target_layer, "Construct target layer")->capture_default_str();
    leaf->add_option("--layers", rc.relevant_layers, "Layers in each neighborhood (default: all)")->delimiter(',');
    leaf->add_option("--window", rc.window, "Window size in pitches")->capture_default_str()->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*genlib)
            return cmd_genlib(rc, out);
        if (*exp)
            return cmd_explore(rc, out);
        if (*syn) {
            if (rc.spec_path.empty() == rc.config_path.empty())
                throw UsageError("synth needs exactly one of --spec and --config");
            return cmd_synth(rc, out);
        }
        if (*pa)
            return cmd_pa(rc, out);
        if (*sim)
            return cmd_sim(rc, out);
        if (*leaf)
            return cmd_leafcell(rc, out);
    } catch (const UsageError& e) {
        err << "smemsynth: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SimError& e) {
        err << "smemsynth: simulation failed: " << e.what() << "\n";
        return kExitVerifyFailed;
    } catch (const Error& e) {
        err << "smemsynth: " << e.what() << "\n";
        return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        err << "smemsynth: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace smemsynth
