#include "smemsynth/explorer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>

#include "smemsynth/common.hpp"
#include "smemsynth/floorplan.hpp"
#include "smemsynth/parallel.hpp"
#include "smemsynth/report.hpp"

namespace smemsynth {

void UserSpec::validate() const {
    if (words < 1 || bits < 1)
        throw ConstraintError("spec: words and bits must be >= 1");
    if (aspect_ratio_target && !(*aspect_ratio_target > 0))
        throw ConstraintError("spec: aspect_ratio_target must be > 0");
    if (aspect_ratio_tol < 0 || aspect_ratio_tol >= 1)
        throw ConstraintError("spec: aspect_ratio_tol must be in [0, 1)");
    if (t_max && !(*t_max > 0))
        throw ConstraintError("spec: t_max must be > 0");
    if (e_max && !(*e_max > 0))
        throw ConstraintError("spec: e_max must be > 0");
}

UserSpec spec_from_json(const nlohmann::json& j, const std::string& where) {
    static const std::set<std::string> keys = {"words", "bits", "aspect_ratio_target", "aspect_ratio_tol", "t_max_ps",
                                               "e_max_fj"};
    if (!j.is_object())
        throw ParseError(where, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!keys.count(it.key()))
            throw ParseError(where + "." + it.key(), "unknown key");
    auto integer = [&](const char* k) {
        if (!j.contains(k))
            throw ParseError(where + "." + k, std::string("missing field \"") + k + "\"");
        if (!j[k].is_number_integer())
            throw ParseError(where + "." + k, "expected an integer");
        return j[k].get<std::int64_t>();
    };
    auto optional_real = [&](const char* k) -> std::optional<double> {
        if (!j.contains(k) || j[k].is_null())
            return std::nullopt;
        if (!j[k].is_number())
            throw ParseError(where + "." + k, "expected a number or null");
        return j[k].get<double>();
    };
    UserSpec s;
    s.words = integer("words");
    s.bits = integer("bits");
    s.aspect_ratio_target = optional_real("aspect_ratio_target");
    s.aspect_ratio_tol = optional_real("aspect_ratio_tol").value_or(0.0);
    s.t_max = optional_real("t_max_ps");
    s.e_max = optional_real("e_max_fj");
    try {
        s.validate();
    } catch (const ConstraintError& e) {
        throw ParseError(where, e.what());
    }
    return s;
}

UserSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError(path, "cannot open file");
    try {
        return spec_from_json(nlohmann::json::parse(in), path);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + " byte " + std::to_string(e.byte), e.what());
    }
}

double gops_per_watt(double e_op_fj, double p_leak_nw, double t_cycle_ps) {
    const double joules = e_op_fj * 1e-15 + p_leak_nw * 1e-9 * t_cycle_ps * 1e-12;
    return 1e-9 / joules;
}

double decode_delay(const TechParams& tech, int global_bits) { return tech.d0 + tech.d1 * global_bits; }

double decode_energy(const TechParams& tech, int address_bits) { return tech.e_dec0 + tech.e_dec1 * address_bits; }

double decoder_area(const TechParams& tech, int bits) {
    return bits <= 0 ? 0.0 : tech.area_dec0 + tech.area_dec_per_line * std::ldexp(1.0, bits);
}

double bitline_delay(const TechParams& tech, int drivers) { return drivers > 1 ? tech.g0 + tech.g1 * drivers : 0.0; }

double column_mux_delay(const TechParams& tech, int ways) {
    return ways > 1 ? tech.m0 + tech.m1 * ilog2(static_cast<std::uint64_t>(ways)) : 0.0;
}

std::vector<MemoryConfig> enumerate_configs(const UserSpec& spec, const Library& lib, const EnumBounds& bounds) {
    spec.validate();
    if (lib.empty())
        throw ConstraintError("enumerate_configs: empty library");
    auto limit = [&](int b) { return b > 0 ? std::int64_t{b} : spec.words; };
    const std::int64_t max_r = limit(bounds.max_R), max_c = limit(bounds.max_C), max_k = limit(bounds.max_K),
                       max_m = limit(bounds.max_M);
    std::vector<MemoryConfig> out;
    for (const auto& m : lib.macros()) {
        for (std::int64_t M = 1; M <= max_m; M *= 2) {
            // Width: C*W == bits*M.
            if ((spec.bits * M) % m.W != 0)
                continue;
            const std::int64_t C = spec.bits * M / m.W;
            if (!is_pow2(static_cast<std::uint64_t>(C)) || C > max_c)
                continue;
            // Depth: R*K == words / (B*M).
            if (spec.words % (std::int64_t{m.B} * M) != 0)
                continue;
            const std::int64_t rk = spec.words / (std::int64_t{m.B} * M);
            if (!is_pow2(static_cast<std::uint64_t>(rk)))
                continue;
            for (std::int64_t R = 1; R <= rk; R *= 2) {
                const std::int64_t K = rk / R;
                if (R > max_r || K > max_k)
                    continue;
                MemoryConfig cfg{m.name, static_cast<int>(R), static_cast<int>(C), static_cast<int>(K),
                                 static_cast<int>(M)};
                if (spec.aspect_ratio_target) {
                    double ar = estimate_dimensions(cfg, m, lib.tech(), logic_area(cfg, lib, lib.tech())).aspect_ratio();
                    if (std::abs(ar - *spec.aspect_ratio_target) > spec.aspect_ratio_tol * *spec.aspect_ratio_target)
                        continue;
                }
                out.push_back(std::move(cfg));
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

double logic_area(const MemoryConfig& cfg, const Library& lib, const TechParams& tech) {
    const auto& m = lib.at(cfg.variant);
    // One decoder per address field and port (read + write).
    double a = 2.0 * (decoder_area(tech, ilog2(static_cast<std::uint64_t>(cfg.R))) +
                      decoder_area(tech, ilog2(static_cast<std::uint64_t>(cfg.K))));
    if (cfg.C > 1 || cfg.M > 1)
        a += 2.0 * tech.area_mux_per_bit * static_cast<double>(cfg.C) * m.W;
    return a;
}

PPAEstimate evaluate_ppa(const MemoryConfig& cfg, const Library& lib, const TechParams& tech) {
    const auto& m = lib.at(cfg.variant);
    validate_config(cfg, m);
    const std::int64_t words = cfg.words(m);
    const int global_bits = ilog2(static_cast<std::uint64_t>(cfg.R)) + ilog2(static_cast<std::uint64_t>(cfg.K));
    const double logic = logic_area(cfg, lib, tech);
    const auto dims = estimate_dimensions(cfg, m, tech, logic);
    const double n = cfg.macro_count();

    PPAEstimate p;
    p.t_cycle_ps = decode_delay(tech, global_bits) + m.t_access + bitline_delay(tech, cfg.K) +
                   column_mux_delay(tech, cfg.M);
    // All C bank columns of the selected bank row fire; the mux discards the rest.
    p.e_op_fj = decode_energy(tech, clog2(static_cast<std::uint64_t>(words))) + cfg.C * m.e_read +
                tech.e_wire_per_um * dims.semiperimeter_um();
    p.p_leak_nw = n * m.p_leak + tech.p_leak_periph;
    p.area_um2 = n * m.area_um2(tech) * (1.0 + tech.periph_fraction) + logic;
    p.gops_per_watt = gops_per_watt(p.e_op_fj, p.p_leak_nw, p.t_cycle_ps);
    return p;
}

std::vector<Candidate> evaluate_all(const std::vector<MemoryConfig>& cfgs, const Library& lib, const TechParams& tech) {
    std::vector<Candidate> out(cfgs.size());
    parallel_for(cfgs.size(), [&](std::size_t i) { out[i] = {cfgs[i], evaluate_ppa(cfgs[i], lib, tech)}; });
    return out;
}

bool dominates(const PPAEstimate& a, const PPAEstimate& b) {
    bool le = a.area_um2 <= b.area_um2 && a.t_cycle_ps <= b.t_cycle_ps && a.e_op_fj <= b.e_op_fj;
    bool lt = a.area_um2 < b.area_um2 || a.t_cycle_ps < b.t_cycle_ps || a.e_op_fj < b.e_op_fj;
    return le && lt;
}

namespace {

auto objective_key(const Candidate& c) {
    return std::tie(c.ppa.area_um2, c.ppa.t_cycle_ps, c.ppa.e_op_fj, c.cfg);
}

} // namespace

std::vector<Candidate> pareto_front(const std::vector<Candidate>& points) {
    std::vector<Candidate> sorted = points;
    std::sort(sorted.begin(), sorted.end(),
              [](const Candidate& a, const Candidate& b) { return objective_key(a) < objective_key(b); });
    // A dominator precedes its victim in lexicographic objective order, and
    // any dominated dominator is itself dominated by a front member.
    std::vector<Candidate> front;
    for (const auto& c : sorted) {
        bool dominated = std::any_of(front.begin(), front.end(),
                                     [&](const Candidate& f) { return dominates(f.ppa, c.ppa); });
        if (!dominated)
            front.push_back(c);
    }
    return front;
}

double violation(const PPAEstimate& ppa, const UserSpec& spec) {
    double v = -std::numeric_limits<double>::infinity();
    bool any = false;
    if (spec.t_max) {
        v = std::max(v, ppa.t_cycle_ps / *spec.t_max - 1.0);
        any = true;
    }
    if (spec.e_max) {
        v = std::max(v, ppa.e_op_fj / *spec.e_max - 1.0);
        any = true;
    }
    return any ? v : 0.0;
}

Selection select_best(const std::vector<Candidate>& front, const UserSpec& spec) {
    if (front.empty())
        throw ConstraintError("select_best: empty front");
    auto tie_key = [](const Candidate& c) { return std::tie(c.ppa.area_um2, c.ppa.t_cycle_ps, c.cfg); };
    const Candidate* best = nullptr;
    for (const auto& c : front) {
        if (violation(c.ppa, spec) > 0)
            continue;
        if (!best || tie_key(c) < tie_key(*best))
            best = &c;
    }
    if (best)
        return {*best, true, violation(best->ppa, spec)};
    double best_v = 0;
    for (const auto& c : front) {
        double v = violation(c.ppa, spec);
        if (!best || v < best_v || (v == best_v && tie_key(c) < tie_key(*best))) {
            best = &c;
            best_v = v;
        }
    }
    return {*best, false, best_v};
}

PPAEstimate traditional_ppa(std::int64_t words, std::int64_t bits, const TechParams& tech) {
    if (words < 1 || bits < 1 || !is_pow2(static_cast<std::uint64_t>(words)))
        throw ConstraintError("traditional_ppa: words must be a power of two and bits >= 1");
    std::int64_t mux = 1;
    while (words / mux > tech.trad_max_rows && mux < words)
        mux *= 2;
    const std::int64_t rows = words / mux;
    const std::int64_t cols = bits * mux;
    const int row_bits = ilog2(static_cast<std::uint64_t>(rows));

    const auto h = static_cast<double>((rows + kPeriphRows) * tech.row_pitch_nm());
    const auto w = static_cast<double>((2 * cols + kPeriphPitches) * tech.poly_pitch_nm);
    const double array_area = h * w * 1e-6;
    const double semiperimeter_um = (h + w) * 1e-3;

    PPAEstimate p;
    p.area_um2 = array_area * (1.0 + tech.periph_fraction) + 2.0 * decoder_area(tech, row_bits) +
                 (mux > 1 ? tech.area_mux_per_bit * static_cast<double>(cols) : 0.0) + tech.area_ctrl;
    const double t = decode_delay(tech, row_bits) + tech.acc0 + tech.acc_per_row * static_cast<double>(rows) +
                     tech.acc_per_col * static_cast<double>(cols) + column_mux_delay(tech, static_cast<int>(mux));
    p.t_cycle_ps = tech.trad_delay_factor * t;
    const double e = decode_energy(tech, ilog2(static_cast<std::uint64_t>(words))) + tech.rd0 +
                     tech.rd_per_col * static_cast<double>(cols) +
                     tech.rd_per_row * static_cast<double>(rows) * tech.leak_fraction +
                     tech.e_wire_per_um * semiperimeter_um;
    p.e_op_fj = tech.trad_energy_factor * e;
    p.p_leak_nw = tech.leak_per_bit_nw * static_cast<double>(words * bits) + tech.p_leak_periph;
    p.gops_per_watt = gops_per_watt(p.e_op_fj, p.p_leak_nw, p.t_cycle_ps);
    return p;
}

std::string explore_csv(const std::vector<Candidate>& all, const std::vector<Candidate>& front) {
    std::set<MemoryConfig> on_front;
    for (const auto& c : front)
        on_front.insert(c.cfg);
    std::string out = csv_row({"variant", "R", "C", "K", "M", "area_um2", "t_cycle_ps", "e_op_fj", "p_leak_nw",
                               "gops_per_watt", "pareto"});
    for (const auto& c : all)
        out += csv_row({c.cfg.variant, std::to_string(c.cfg.R), std::to_string(c.cfg.C), std::to_string(c.cfg.K),
                        std::to_string(c.cfg.M), format_number(c.ppa.area_um2), format_number(c.ppa.t_cycle_ps),
                        format_number(c.ppa.e_op_fj), format_number(c.ppa.p_leak_nw),
                        format_number(c.ppa.gops_per_watt), on_front.count(c.cfg) ? "1" : "0"});
    return out;
}

std::string explore_plot_data(const std::vector<Candidate>& all, const std::vector<Candidate>& front) {
    std::set<MemoryConfig> on_front;
    for (const auto& c : front)
        on_front.insert(c.cfg);
    std::ostringstream os;
    os << "# area_um2 gops_per_watt pareto t_cycle_ps e_op_fj config\n";
    for (const auto& c : all)
        os << format_number(c.ppa.area_um2) << " " << format_number(c.ppa.gops_per_watt) << " "
           << (on_front.count(c.cfg) ? 1 : 0) << " " << format_number(c.ppa.t_cycle_ps) << " "
           << format_number(c.ppa.e_op_fj) << " " << c.cfg.variant << "_R" << c.cfg.R << "_C" << c.cfg.C << "_K"
           << c.cfg.K << "_M" << c.cfg.M << "\n";
    return os.str();
}

nlohmann::ordered_json config_to_json(const MemoryConfig& cfg) {
    nlohmann::ordered_json j;
    j["variant"] = cfg.variant;
    j["R"] = cfg.R;
    j["C"] = cfg.C;
    j["K"] = cfg.K;
    j["M"] = cfg.M;
    return j;
}

MemoryConfig config_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object())
        throw ParseError(where, "expected an object");
    static const std::set<std::string> keys = {"variant", "R", "C", "K", "M", "ppa", "feasible", "violation"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!keys.count(it.key()))
            throw ParseError(where + "." + it.key(), "unknown key");
    MemoryConfig cfg;
    if (!j.contains("variant") || !j["variant"].is_string())
        throw ParseError(where + ".variant", "missing or non-string field \"variant\"");
    cfg.variant = j["variant"].get<std::string>();
    for (auto [key, field] : {std::pair{"R", &cfg.R}, {"C", &cfg.C}, {"K", &cfg.K}, {"M", &cfg.M}}) {
        if (!j.contains(key) || !j[key].is_number_integer())
            throw ParseError(where + "." + key, std::string("missing or non-integer field \"") + key + "\"");
        *field = j[key].get<int>();
    }
    return cfg;
}

} // namespace smemsynth
