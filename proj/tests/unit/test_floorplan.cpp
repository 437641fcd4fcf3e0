#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "smemsynth/common.hpp"
#include "smemsynth/floorplan.hpp"

using namespace smemsynth;

namespace {

const TechParams kTech{};

std::size_t count_kind(const Floorplan& fp, RectKind k) {
    std::size_t n = 0;
    for (const auto& r : fp.placements)
        n += r.kind == k;
    return n;
}

} // namespace

TEST(EstimateDimensions, DegenerateGrid) {
    const auto m = generate_variant(32, 8, kTech);
    const auto d = estimate_dimensions({m.name, 1, 1, 1, 1}, m, kTech);
    const std::int64_t macro_w = m.width_pitches * kTech.poly_pitch_nm;
    const std::int64_t macro_h = m.height_tracks * kTech.row_pitch_nm();
    EXPECT_EQ(d.w, macro_w + kTech.fp_gutter_pitches * kTech.poly_pitch_nm +
                       kTech.fp_periph_pitches * kTech.poly_pitch_nm);
    EXPECT_EQ(d.h, macro_h + kTech.fp_bank_periph_tracks * kTech.track_pitch_nm +
                       kTech.fp_global_periph_tracks * kTech.track_pitch_nm);
}

TEST(EstimateDimensions, DoublingCDoublesMacroContribution) {
    const auto m = generate_variant(16, 16, kTech);
    const std::int64_t periph_w = kTech.fp_periph_pitches * kTech.poly_pitch_nm;
    for (int C : {1, 2, 4, 8}) {
        const auto a = estimate_dimensions({m.name, 2, C, 1, 1}, m, kTech);
        const auto b = estimate_dimensions({m.name, 2, 2 * C, 1, 1}, m, kTech);
        EXPECT_EQ(b.w - periph_w, 2 * (a.w - periph_w));
        EXPECT_EQ(a.h, b.h);
    }
    EXPECT_THROW(estimate_dimensions({m.name, 1, 1, 1, 1}, m, kTech, -1.0), ConstraintError);
}

TEST(EstimateDimensions, LargeLogicWidensStrip) {
    const auto m = generate_variant(16, 16, kTech);
    const MemoryConfig cfg{m.name, 1, 1, 1, 1};
    const auto base = estimate_dimensions(cfg, m, kTech);
    const auto big = estimate_dimensions(cfg, m, kTech, 1e4);
    EXPECT_GT(big.w, base.w);
    EXPECT_EQ(big.h, base.h);
    EXPECT_EQ((big.w - base.w) % kTech.poly_pitch_nm, 0);
    // The widened periphery holds the inflated logic area.
    const std::int64_t core_h = base.h - kTech.fp_global_periph_tracks * kTech.track_pitch_nm;
    const std::int64_t periph_w = big.w - (base.w - kTech.fp_periph_pitches * kTech.poly_pitch_nm);
    const double have = static_cast<double>(periph_w) * core_h +
                        static_cast<double>(big.w) * (big.h - core_h);
    EXPECT_GE(have, 1e4 * 1e6 / kTech.fp_utilization);
}

TEST(Realize, SingleMacroAtPeripheryCorner) {
    const auto m = generate_variant(32, 8, kTech);
    const MemoryConfig cfg{m.name, 1, 1, 1, 1};
    const auto fp = realize(cfg, m, kTech);
    const auto d = estimate_dimensions(cfg, m, kTech);
    EXPECT_EQ(fp.die_w, d.w);
    EXPECT_EQ(fp.die_h, d.h);
    ASSERT_EQ(count_kind(fp, RectKind::Macro), 1u);
    for (const auto& r : fp.placements)
        if (r.kind == RectKind::Macro) {
            EXPECT_EQ(r.instance, macro_instance_name(0, 0, 0));
            EXPECT_EQ(r.x, kTech.fp_periph_pitches * kTech.poly_pitch_nm);
            EXPECT_EQ(r.y, kTech.fp_global_periph_tracks * kTech.track_pitch_nm);
        }
}

TEST(Realize, SmallMacroGrid) {
    BAPlusMacro m;
    m.name = "toy";
    m.B = 16;
    m.W = 4;
    m.width_pitches = 10;
    m.height_tracks = 20;
    const MemoryConfig cfg{"toy", 2, 2, 2, 1};
    const auto fp = realize(cfg, m, kTech);
    EXPECT_EQ(count_kind(fp, RectKind::Macro), 8u);
    EXPECT_TRUE(oracle::geometry_problems(fp).empty());
    EXPECT_TRUE(check_floorplan(fp, cfg).empty());
    const auto d = estimate_dimensions(cfg, m, kTech);
    EXPECT_EQ(fp.bounding_box(), std::make_pair(d.w, d.h));
}

TEST(Realize, RailCount) {
    const auto lib = default_library();
    const std::int64_t pitch = kTech.fp_rail_pitch_tracks * kTech.track_pitch_nm;
    for (const MemoryConfig& cfg : {MemoryConfig{"ba_8x8", 1, 1, 1, 1}, MemoryConfig{"ba_64x32", 4, 2, 4, 2}}) {
        const auto fp = realize(cfg, lib.at(cfg.variant), kTech);
        EXPECT_EQ(static_cast<std::int64_t>(count_kind(fp, RectKind::PowerRail)), fp.die_h / pitch + 1);
        for (const auto& r : fp.placements)
            if (r.kind == RectKind::PowerRail) {
                EXPECT_EQ(r.x, 0);
                EXPECT_EQ(r.w, fp.die_w);
            }
    }
}

TEST(Realize, RandomConfigsGeometryAndEstimate) {
    const auto lib = default_library();
    std::mt19937_64 rng(11);
    for (int i = 0; i < 40; ++i) {
        const auto& m = lib.macros()[rng() % lib.macros().size()];
        const MemoryConfig cfg{m.name, 1 << (rng() % 4), 1 << (rng() % 4), 1 << (rng() % 4), 1};
        const double logic = static_cast<double>(rng() % 4) * 800.0;
        const auto fp = realize(cfg, m, kTech, logic);
        EXPECT_EQ(oracle::geometry_problems(fp), std::vector<std::string>{}) << to_string(cfg);
        EXPECT_TRUE(check_floorplan(fp, cfg).empty()) << to_string(cfg);
        const auto d = estimate_dimensions(cfg, m, kTech, logic);
        EXPECT_EQ(fp.bounding_box(), std::make_pair(d.w, d.h)) << to_string(cfg);
        EXPECT_EQ(floorplan_to_text(realize(cfg, m, kTech, logic)), floorplan_to_text(fp));
    }
}

TEST(Realize, TransposeSwapsAxes) {
    const auto m = generate_variant(16, 32, kTech);
    const MemoryConfig cfg{m.name, 2, 4, 2, 2};
    FloorplanOptions t;
    t.transpose = true;
    const auto a = realize(cfg, m, kTech);
    const auto b = realize(cfg, m, kTech, 0.0, t);
    EXPECT_EQ(a.die_w, b.die_h);
    EXPECT_EQ(a.die_h, b.die_w);
    ASSERT_EQ(a.placements.size(), b.placements.size());
    for (std::size_t i = 0; i < a.placements.size(); ++i) {
        EXPECT_EQ(a.placements[i].x, b.placements[i].y);
        EXPECT_EQ(a.placements[i].w, b.placements[i].h);
    }
    EXPECT_TRUE(oracle::geometry_problems(b).empty());
}

TEST(Realize, AspectRatioMissIsFlagged) {
    const auto m = generate_variant(16, 16, kTech);
    FloorplanOptions o;
    o.ar_target = 100.0;
    o.ar_tol = 0.1;
    const auto fp = realize({m.name, 1, 1, 1, 1}, m, kTech, 0.0, o);
    EXPECT_TRUE(fp.ar_miss);
}

TEST(CheckFloorplan, DetectsOverlapAndMissingMacro) {
    const auto m = generate_variant(16, 16, kTech);
    const MemoryConfig cfg{m.name, 1, 2, 1, 1};
    auto fp = realize(cfg, m, kTech);
    for (auto& r : fp.placements)
        if (r.instance == macro_instance_name(0, 1, 0))
            r.x -= 400;
    EXPECT_FALSE(check_floorplan(fp, cfg).empty());
    EXPECT_FALSE(check_floorplan(realize(cfg, m, kTech), {m.name, 1, 4, 1, 1}).empty());
}

TEST(FloorplanExport, TextRectLines) {
    const auto m = generate_variant(16, 16, kTech);
    const auto fp = realize({m.name, 1, 1, 1, 1}, m, kTech);
    const auto text = floorplan_to_text(fp);
    EXPECT_NE(text.find("rect bank_r0_c0/ba0 macro "), std::string::npos) << text;
}
