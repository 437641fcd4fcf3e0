#include "smemsynth/floorplan.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "smemsynth/common.hpp"

namespace smemsynth {

std::string to_string(RectKind k) {
    switch (k) {
    case RectKind::Macro: return "macro";
    case RectKind::PeriphRegion: return "periph_region";
    case RectKind::PowerRail: return "power_rail";
    case RectKind::Pin: return "pin";
    }
    return "?";
}

std::pair<std::int64_t, std::int64_t> Floorplan::bounding_box() const {
    std::int64_t w = 0, h = 0;
    for (const auto& r : placements) {
        w = std::max(w, r.x + r.w);
        h = std::max(h, r.y + r.h);
    }
    return {w, h};
}

namespace {

struct Geometry {
    std::int64_t macro_w, macro_h, gutter, periph_w, bank_periph_h, global_periph_h;
};

Geometry geometry(const BAPlusMacro& macro, const TechParams& tech) {
    return {macro.width_nm(tech),
            macro.height_nm(tech),
            tech.fp_gutter_pitches * tech.poly_pitch_nm,
            tech.fp_periph_pitches * tech.poly_pitch_nm,
            tech.fp_bank_periph_tracks * tech.track_pitch_nm,
            tech.fp_global_periph_tracks * tech.track_pitch_nm};
}

std::int64_t bank_height(const Geometry& g, int K) { return K * g.macro_h + g.bank_periph_h; }

} // namespace

namespace {

// Decoder strip width: the minimum, grown until the periphery holds
// logic_area/utilization.
std::int64_t periph_width(const MemoryConfig& cfg, const Geometry& g, const TechParams& tech, double logic_area_um2) {
    const std::int64_t core_h = cfg.R * bank_height(g, cfg.K);
    const std::int64_t die_h = core_h + g.global_periph_h;
    const std::int64_t grid_w = cfg.C * (g.macro_w + g.gutter);
    std::int64_t periph_w = g.periph_w;
    const double need_nm2 = logic_area_um2 * 1e6 / tech.fp_utilization;
    const double have_nm2 = static_cast<double>(periph_w) * static_cast<double>(core_h) +
                            static_cast<double>(grid_w + periph_w) * static_cast<double>(g.global_periph_h);
    if (need_nm2 > have_nm2) {
        // Extra strip width also adds to the bottom strip, which spans the die.
        double per_nm = static_cast<double>(die_h);
        auto extra = static_cast<std::int64_t>(std::ceil((need_nm2 - have_nm2) / per_nm));
        std::int64_t pitches = (extra + tech.poly_pitch_nm - 1) / tech.poly_pitch_nm;
        periph_w += pitches * tech.poly_pitch_nm;
    }
    return periph_w;
}

} // namespace

Dimensions estimate_dimensions(const MemoryConfig& cfg, const BAPlusMacro& macro, const TechParams& tech,
                               double logic_area_um2) {
    if (logic_area_um2 < 0)
        throw ConstraintError("logic_area must be >= 0");
    auto g = geometry(macro, tech);
    return {cfg.C * (g.macro_w + g.gutter) + periph_width(cfg, g, tech, logic_area_um2),
            cfg.R * bank_height(g, cfg.K) + g.global_periph_h};
}

std::string macro_instance_name(int r, int c, int k) {
    return "bank_r" + std::to_string(r) + "_c" + std::to_string(c) + "/ba" + std::to_string(k);
}

Floorplan realize(const MemoryConfig& cfg, const BAPlusMacro& macro, const TechParams& tech, double logic_area_um2,
                  const FloorplanOptions& opts) {
    validate_config(cfg, macro);
    if (logic_area_um2 < 0)
        throw ConstraintError("logic_area must be >= 0");
    auto g = geometry(macro, tech);
    const std::int64_t core_h = cfg.R * bank_height(g, cfg.K);
    const std::int64_t die_h = core_h + g.global_periph_h;
    const std::int64_t grid_w = cfg.C * (g.macro_w + g.gutter);
    const std::int64_t periph_w = periph_width(cfg, g, tech, logic_area_um2);
    const std::int64_t die_w = grid_w + periph_w;

    Floorplan fp;
    fp.die_w = die_w;
    fp.die_h = die_h;
    auto& out = fp.placements;
    out.push_back({"periph/output", RectKind::PeriphRegion, 0, 0, die_w, g.global_periph_h});
    out.push_back({"periph/decoder", RectKind::PeriphRegion, 0, g.global_periph_h, periph_w, core_h});
    for (int r = 0; r < cfg.R; ++r) {
        std::int64_t y0 = g.global_periph_h + r * bank_height(g, cfg.K);
        for (int c = 0; c < cfg.C; ++c) {
            std::int64_t x0 = periph_w + c * (g.macro_w + g.gutter);
            for (int k = 0; k < cfg.K; ++k)
                out.push_back({macro_instance_name(r, c, k), RectKind::Macro, x0, y0 + k * g.macro_h, g.macro_w,
                               g.macro_h});
            if (g.bank_periph_h > 0)
                out.push_back({"bank_r" + std::to_string(r) + "_c" + std::to_string(c) + "/drivers",
                               RectKind::PeriphRegion, x0, y0 + cfg.K * g.macro_h, g.macro_w, g.bank_periph_h});
        }
    }

    const std::int64_t rail_pitch = tech.fp_rail_pitch_tracks * tech.track_pitch_nm;
    const std::int64_t rails = die_h / rail_pitch + 1;
    for (std::int64_t i = 0; i < rails; ++i) {
        std::int64_t y = i * rail_pitch;
        out.push_back({"rail_" + std::to_string(i), RectKind::PowerRail, 0, y, die_w,
                       std::min(tech.track_pitch_nm, die_h - y)});
    }

    // Pins on the left edge, next to the decoder strip.
    const int abits = ilog2(static_cast<std::uint64_t>(cfg.words(macro)));
    const auto dbits = static_cast<int>(cfg.bits(macro));
    std::vector<std::string> pins = {"clk", "re", "we"};
    for (int i = 0; i < abits; ++i)
        pins.push_back("raddr[" + std::to_string(i) + "]");
    for (int i = 0; i < abits; ++i)
        pins.push_back("waddr[" + std::to_string(i) + "]");
    for (int i = 0; i < dbits; ++i)
        pins.push_back("wdata[" + std::to_string(i) + "]");
    for (int i = 0; i < dbits; ++i)
        pins.push_back("rdata[" + std::to_string(i) + "]");
    const auto npins = static_cast<std::int64_t>(pins.size());
    const std::int64_t pin_h = std::min(tech.track_pitch_nm, die_h / (npins + 1));
    const std::int64_t pin_w = std::min(tech.poly_pitch_nm, periph_w);
    for (std::int64_t i = 0; i < npins; ++i) {
        std::int64_t y = (i + 1) * (die_h - pin_h) / (npins + 1);
        out.push_back({"pin/" + pins[static_cast<std::size_t>(i)], RectKind::Pin, 0, y, pin_w, pin_h});
    }

    if (opts.transpose) {
        std::swap(fp.die_w, fp.die_h);
        for (auto& r : fp.placements) {
            std::swap(r.x, r.y);
            std::swap(r.w, r.h);
        }
    }
    if (opts.ar_target)
        fp.ar_miss = std::abs(fp.aspect_ratio() - *opts.ar_target) > opts.ar_tol * *opts.ar_target;
    return fp;
}

std::vector<std::string> check_floorplan(const Floorplan& fp, const MemoryConfig& cfg) {
    std::vector<std::string> v;
    std::vector<const PlacedRect*> solid;
    std::map<std::string, int> macro_seen;
    for (const auto& r : fp.placements) {
        if (r.w < 0 || r.h < 0 || r.x < 0 || r.y < 0 || r.x + r.w > fp.die_w || r.y + r.h > fp.die_h)
            v.push_back("rect " + r.instance + " is outside the die");
        if (r.kind == RectKind::Macro || r.kind == RectKind::PeriphRegion)
            solid.push_back(&r);
        if (r.kind == RectKind::Macro)
            ++macro_seen[r.instance];
    }
    // Sweep over x to keep the overlap test near-linear on large grids.
    std::sort(solid.begin(), solid.end(), [](auto* a, auto* b) { return a->x < b->x; });
    for (std::size_t i = 0; i < solid.size(); ++i) {
        const auto& a = *solid[i];
        for (std::size_t j = i + 1; j < solid.size() && solid[j]->x < a.x + a.w; ++j) {
            const auto& b = *solid[j];
            bool overlap = a.x < b.x + b.w && b.x < a.x + a.w && a.y < b.y + b.h && b.y < a.y + a.h;
            if (overlap)
                v.push_back("rects " + a.instance + " and " + b.instance + " overlap");
        }
    }
    for (int r = 0; r < cfg.R; ++r)
        for (int c = 0; c < cfg.C; ++c)
            for (int k = 0; k < cfg.K; ++k) {
                auto name = macro_instance_name(r, c, k);
                auto it = macro_seen.find(name);
                int n = it == macro_seen.end() ? 0 : it->second;
                if (n != 1)
                    v.push_back("macro " + name + " placed " + std::to_string(n) + " times");
                if (it != macro_seen.end())
                    macro_seen.erase(it);
            }
    for (const auto& [name, n] : macro_seen)
        v.push_back("unexpected macro " + name);
    return v;
}

std::string floorplan_to_text(const Floorplan& fp) {
    std::ostringstream os;
    os << "# die " << fp.die_w << " " << fp.die_h << "\n";
    for (const auto& r : fp.placements)
        os << "rect " << r.instance << " " << to_string(r.kind) << " " << r.x << " " << r.y << " " << r.w << " "
           << r.h << "\n";
    return os.str();
}

std::string floorplan_to_csv(const Floorplan& fp) {
    std::ostringstream os;
    os << "instance,kind,x_nm,y_nm,w_nm,h_nm\n";
    for (const auto& r : fp.placements)
        os << r.instance << "," << to_string(r.kind) << "," << r.x << "," << r.y << "," << r.w << "," << r.h << "\n";
    return os.str();
}

} // namespace smemsynth
