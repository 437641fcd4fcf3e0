#include <gtest/gtest.h>

#include <random>
#include <regex>

#include "smemsynth/common.hpp"
#include "smemsynth/netlist.hpp"

using namespace smemsynth;

namespace {

const Library& lib() {
    static const Library l = default_library();
    return l;
}

std::size_t count_matches(const std::string& text, const std::regex& re) {
    return static_cast<std::size_t>(std::distance(std::sregex_iterator(text.begin(), text.end(), re),
                                                  std::sregex_iterator()));
}

} // namespace

TEST(GenerateSram, SingleArray) {
    const auto ir = generate_sram({"ba_32x8", 1, 1, 1, 1}, lib());
    EXPECT_EQ(ir.count(CellKind::BAPlus), 1u);
    EXPECT_EQ(ir.count(CellKind::ColumnMux), 0u);
    ASSERT_NE(ir.find_port("raddr"), nullptr);
    EXPECT_EQ(ir.find_port("raddr")->width, 5);
    EXPECT_EQ(ir.find_port("waddr")->width, 5);
    EXPECT_EQ(ir.find_port("rdata")->width, 8);
    EXPECT_TRUE(check_wellformed(ir).empty());
}

TEST(GenerateSram, BankedConfig) {
    const MemoryConfig cfg{"ba_32x8", 2, 2, 2, 2};
    const auto ir = generate_sram(cfg, lib());
    EXPECT_EQ(ir.count(CellKind::BAPlus), 8u);
    EXPECT_EQ(cfg.words(lib().at("ba_32x8")), 256);
    EXPECT_EQ(ir.find_port("raddr")->width, 8);
    EXPECT_EQ(ir.find_port("rdata")->width, 8);
    EXPECT_EQ(ir.find_port("wdata")->width, 8);
    EXPECT_TRUE(check_wellformed(ir).empty());
}

TEST(GenerateSram, BankOutputsShareTristateNet) {
    const auto ir = generate_sram({"ba_16x16", 1, 1, 4, 1}, lib());
    std::size_t shared = 0;
    for (const auto& n : ir.nets)
        if (n.drivers.size() == 4)
            ++shared;
    EXPECT_GE(shared, 1u);
    EXPECT_EQ(ir.count(CellKind::TristateDriver), 4u);
}

TEST(GenerateSram, InvalidConfigRejected) {
    EXPECT_THROW(generate_sram({"ba_32x8", 3, 1, 1, 1}, lib()), ConstraintError);
    EXPECT_THROW(generate_sram({"ba_32x8", 1, 1, 1, 16}, lib()), ConstraintError);
    EXPECT_THROW(generate_sram({"ba_5x5", 1, 1, 1, 1}, lib()), LookupError);
}

TEST(GenerateSram, RandomConfigsWellFormed) {
    std::mt19937_64 rng(3);
    const auto& macros = lib().macros();
    for (int i = 0; i < 20; ++i) {
        const auto& m = macros[rng() % macros.size()];
        MemoryConfig cfg{m.name, 1 << (rng() % 3), 1 << (rng() % 3), 1 << (rng() % 3), 1 << (rng() % 3)};
        const auto ir = generate_sram(cfg, lib());
        EXPECT_EQ(check_wellformed(ir), std::vector<std::string>{}) << to_string(cfg);
        EXPECT_EQ(ir.count(CellKind::BAPlus), static_cast<std::size_t>(cfg.macro_count()));
        EXPECT_EQ(ir.find_port("raddr")->width, ilog2(static_cast<std::uint64_t>(cfg.words(m))));
    }
}

TEST(CheckWellformed, EmptyNetlist) { EXPECT_TRUE(check_wellformed(NetlistIR{}).empty()); }

TEST(CheckWellformed, TwoPlainDriversIsOneViolation) {
    NetlistBuilder b;
    b.port("a", PinDir::In, 1);
    b.port("y", PinDir::Out, 1);
    b.net("a", 1);
    b.net("y", 1);
    b.cell("", "u0", CellKind::Inv, {}, {{"a", "a"}, {"y", "y"}});
    b.cell("", "u1", CellKind::Inv, {}, {{"a", "a"}, {"y", "y"}});
    const auto v = check_wellformed(b.take());
    ASSERT_EQ(v.size(), 1u);
    EXPECT_NE(v[0].find("multiple drivers"), std::string::npos);
    EXPECT_NE(v[0].find("y"), std::string::npos);
}

TEST(CheckWellformed, DanglingNetNamed) {
    NetlistBuilder b;
    b.port("a", PinDir::In, 1);
    b.net("a", 1);
    b.net("z", 1);
    b.cell("", "u0", CellKind::Inv, {}, {{"a", "a"}, {"y", "z"}});
    const auto v = check_wellformed(b.take());
    ASSERT_EQ(v.size(), 1u);
    EXPECT_NE(v[0].find("net z has no sink"), std::string::npos);
}

TEST(NetlistText, RoundTrip) {
    for (const MemoryConfig& cfg : {MemoryConfig{"ba_32x8", 1, 1, 1, 1}, MemoryConfig{"ba_16x32", 2, 4, 2, 8}}) {
        const auto ir = generate_sram(cfg, lib());
        const auto text = netlist_to_text(ir);
        const auto back = netlist_from_text(text);
        EXPECT_EQ(back, ir);
        EXPECT_EQ(netlist_to_text(back), text);
    }
}

TEST(NetlistText, ParseErrorCarriesLine) {
    try {
        netlist_from_text("# smemsynth netlist\nport a in 1\nbogus line\n", "x.net");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.where(), "x.net:3");
    }
}

TEST(Verilog, SingleArrayHasOneBaInstance) {
    const auto ir = generate_sram({"ba_32x8", 1, 1, 1, 1}, lib());
    const auto v = emit_verilog(ir);
    EXPECT_EQ(count_matches(v, std::regex(R"(\n\s*ba_\w+\s+\S+\s*\()")), 1u);
    EXPECT_EQ(emit_verilog(ir), v);
    EXPECT_NE(v.find("endmodule"), std::string::npos);
}

TEST(Verilog, InstancesPerArray) {
    const auto ir = generate_sram({"ba_32x8", 2, 2, 2, 2}, lib());
    EXPECT_EQ(count_matches(emit_verilog(ir), std::regex(R"(\n\s*ba_\w+\s+\S+\s*\()")), 8u);
}

TEST(AddressLayout, FieldsMsbToLsb) {
    const MemoryConfig cfg{"ba_32x8", 2, 2, 4, 2};
    const auto l = address_layout(cfg, lib().at("ba_32x8"));
    EXPECT_EQ(l.bank_row_bits, 1);
    EXPECT_EQ(l.ba_bits, 2);
    EXPECT_EQ(l.row_bits, 5);
    EXPECT_EQ(l.mux_bits, 1);
    const AddressFields f{1, 2, 17, 1};
    const std::uint64_t addr = (1u << 8) | (2u << 6) | (17u << 1) | 1u;
    EXPECT_EQ(join_address(l, f), addr);
    EXPECT_EQ(split_address(l, addr), f);
}
