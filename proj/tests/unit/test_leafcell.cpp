#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "smemsynth/common.hpp"
#include "smemsynth/leafcell.hpp"

using namespace smemsynth;

namespace {

std::string fixture(const std::string& name) { return std::string(SMEMSYNTH_DATA_DIR) + "/fixtures/leafcell/" + name; }

// Vias on track 10 of a 20 x 20 cell at the given pitches, over a full poly grating.
GridLayout via_row(const std::vector<int>& xs, const std::string& poly_class = "pure_grating_1d") {
    std::ostringstream os;
    os << "cell row\nmeta tracks=20 pitches=20 fins=8/12 poly=1/20 rails=2\n";
    os << "layer poly " << poly_class << " V\nlayer v0 compound_2d\n";
    for (int x = 0; x < 20; ++x)
        os << "shape poly V " << x << " 0 20\n";
    for (int x : xs)
        os << "shape v0 H 10 " << x << " " << x + 1 << "\n";
    return parse_layout(os.str());
}

std::vector<std::string> all_layers(const GridLayout& g) {
    std::vector<std::string> v;
    for (const auto& l : g.layers)
        v.push_back(l.name);
    return v;
}

} // namespace

TEST(Metrics, FixtureValues) {
    const auto nand_u = load_layout(fixture("nand2_unidir.cell"));
    const auto nand_b = load_layout(fixture("nand2_bidir.cell"));
    const auto dff_u = load_layout(fixture("dffq_unidir.cell"));
    const auto dff_b = load_layout(fixture("dffq_bidir.cell"));
    EXPECT_EQ(transistor_efficiency(nand_u).str(), "2/4");
    EXPECT_EQ(transistor_efficiency(nand_b).str(), "2/4");
    EXPECT_EQ(transistor_efficiency(dff_u).str(), "13/25");
    EXPECT_EQ(transistor_efficiency(dff_b).str(), "13/23");
    for (const auto* g : {&nand_u, &nand_b, &dff_u, &dff_b}) {
        EXPECT_EQ(power_rail_efficiency(*g).str(), "2/10");
        EXPECT_DOUBLE_EQ(power_rail_efficiency(*g).value(), 0.2);
        EXPECT_NEAR(fin_efficiency(*g).value(), 0.6667, 1e-4);
        EXPECT_TRUE(check_restrictions(*g).empty()) << g->name;
    }
}

TEST(Metrics, DegenerateRatios) {
    auto g = via_row({});
    g.active_fins = g.total_fins;
    EXPECT_DOUBLE_EQ(fin_efficiency(g).value(), 1.0);
    g.rails = 0;
    EXPECT_DOUBLE_EQ(power_rail_efficiency(g).value(), 0.0);
    g.rails = g.tracks;
    EXPECT_DOUBLE_EQ(power_rail_efficiency(g).value(), 1.0);
    g.pitches = 1;
    g.active_poly = g.total_poly = 1;
    EXPECT_DOUBLE_EQ(transistor_efficiency(g).value(), 1.0);
    g.active_fins = g.total_fins = 0;
    EXPECT_THROW(fin_efficiency(g), ConstraintError);
}

TEST(Layout, ParseErrorsAndRoundTrip) {
    EXPECT_THROW(parse_layout("cell x\nmeta tracks=2 pitches=2 fins=1/2 poly=1/2 rails=1\nshape m1 H 0 0 1\n"),
                 ParseError);
    EXPECT_THROW(parse_layout("cell x\nmeta tracks=2 pitches=2 fins=1/2 poly=1/2 rails=1\n"
                              "layer m1 structured_1d H\nshape m1 H 0 0 3\n"),
                 ParseError);
    EXPECT_THROW(parse_layout("cell x\nmeta tracks=2\n"), ParseError);
    const auto g = load_layout(fixture("dffq_unidir.cell"));
    const auto back = parse_layout(layout_to_text(g));
    EXPECT_EQ(back.shapes, g.shapes);
    EXPECT_EQ(layout_to_text(back), layout_to_text(g));
}

TEST(Restrictions, FullGratingIsClean) {
    EXPECT_TRUE(check_restrictions(via_row({5})).empty());
    EXPECT_TRUE(check_restrictions(load_layout(fixture("track_plan_unidir.cell"))).empty());
}

TEST(Restrictions, WrongDirectionOnStructuredLayer) {
    auto g = via_row({}, "structured_1d");
    g.shapes.push_back({"poly", Dir::H, 3, 0, 4});
    const auto v = check_restrictions(g);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_NE(v[0].find("poly"), std::string::npos);
}

TEST(Restrictions, PureIsStricterThanStructured) {
    for (const auto& name : {"nand2_unidir.cell", "dffq_bidir.cell", "track_plan_unidir.cell"}) {
        auto g = load_layout(fixture(name));
        // Cut a gap into every poly line and add a stray horizontal piece.
        for (auto& s : g.shapes)
            if (s.layer == "poly" && s.end - s.start > 2)
                s.end -= 1;
        g.shapes.push_back({"poly", Dir::H, 1, 0, 1});
        auto as_structured = g;
        for (auto& l : as_structured.layers)
            if (l.cls == Restriction::PureGrating1D)
                l.cls = Restriction::Structured1D;
        EXPECT_GE(check_restrictions(g).size(), check_restrictions(as_structured).size()) << name;
        EXPECT_GT(check_restrictions(g).size(), check_restrictions(as_structured).size()) << name;
    }
}

TEST(Constructs, UniformGratingHasOneInteriorConstruct) {
    std::vector<int> xs;
    for (int x = 0; x < 20; ++x)
        xs.push_back(x);
    const auto c = count_constructs(via_row(xs), "v0", 3, {"poly", "v0"});
    EXPECT_EQ(c.targets, 20u);
    EXPECT_EQ(c.interior, 1u);
    EXPECT_GE(c.boundary, 1u);
}

TEST(Constructs, DifferentSpacingGivesTwo) {
    // Each via has one m1 neighbour, one and two pitches to its right.
    auto g = via_row({5, 14});
    g.layers.push_back({"m1", Restriction::Structured1D, Dir::H});
    g.shapes.push_back({"m1", Dir::H, 10, 6, 7});
    g.shapes.push_back({"m1", Dir::H, 10, 16, 17});
    const auto c = count_constructs(g, "v0", 5, {"v0", "m1"});
    EXPECT_EQ(c.interior, 2u);
    EXPECT_EQ(c.boundary, 0u);
    g.shapes.back() = {"m1", Dir::H, 10, 15, 16};
    EXPECT_EQ(count_constructs(g, "v0", 5, {"v0", "m1"}).unique(), 1u);
}

TEST(Constructs, EmptyTargetLayer) {
    EXPECT_EQ(count_constructs(via_row({}), "v0", 5, {"poly"}).unique(), 0u);
    EXPECT_THROW(count_constructs(via_row({}), "v0", 0, {"poly"}), Error);
}

TEST(Constructs, MatchesNaiveOracleOnFixtures) {
    for (const auto& name : {"nand2_unidir.cell", "nand2_bidir.cell", "dffq_unidir.cell", "dffq_bidir.cell",
                             "inv_bidir.cell", "track_plan_unidir.cell"}) {
        const auto g = load_layout(fixture(name));
        const auto layers = all_layers(g);
        for (int w : {1, 3, 5}) {
            const auto c = count_constructs(g, "v0", w, layers);
            const auto [interior, boundary] = oracle::naive_constructs(g, "v0", w, layers);
            EXPECT_EQ(c.interior, interior) << name << " w=" << w;
            EXPECT_EQ(c.boundary, boundary) << name << " w=" << w;
        }
    }
}

TEST(Constructs, MonotoneInWindowWhileInBounds) {
    const auto g = via_row({7, 9, 10, 12});
    std::size_t prev = 0;
    for (int w = 1; w <= 9; ++w) {
        const auto c = count_constructs(g, "v0", w, {"poly", "v0"});
        ASSERT_EQ(c.boundary, 0u) << w;
        EXPECT_GE(c.interior, prev) << w;
        prev = c.interior;
    }
}

TEST(Constructs, TranslationInvariant) {
    const auto a = via_row({6, 8, 13});
    auto b = a;
    for (auto& s : b.shapes) {
        if (s.layer == "v0") {
            s.start += 2;
            s.end += 2;
        }
    }
    for (int w : {1, 3, 5})
        EXPECT_EQ(count_constructs(a, "v0", w, {"v0"}), count_constructs(b, "v0", w, {"v0"})) << w;
}

TEST(Report, CsvRow) {
    const auto csv = leafcell_report({load_layout(fixture("dffq_unidir.cell"))});
    EXPECT_NE(csv.find("13/25"), std::string::npos);
    EXPECT_NE(csv.find("2/10"), std::string::npos);
    EXPECT_EQ(csv.substr(0, csv.find("\r\n")),
              "cell,tracks,fin_eff,fin_eff_value,transistor_eff,transistor_eff_value,power_rail_eff,"
              "power_rail_eff_value,violations");
}
