#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "smemsynth/common.hpp"
#include "smemsynth/explorer.hpp"
#include "smemsynth/netlist.hpp"
#include "smemsynth/sim.hpp"

using namespace smemsynth;

namespace {

const Library& lib() {
    static const Library l = default_library();
    return l;
}

const NetlistIR& sram(const MemoryConfig& cfg) {
    static std::map<MemoryConfig, NetlistIR> cache;
    auto it = cache.find(cfg);
    if (it == cache.end())
        it = cache.emplace(cfg, generate_sram(cfg, lib())).first;
    return it->second;
}

const MemoryConfig kSmall{"ba_32x8", 1, 1, 1, 1};
const MemoryConfig kBanked{"ba_16x16", 2, 2, 2, 4};

} // namespace

TEST(Trace, ParseAndPrint) {
    const auto t = parse_trace("W 5 ab\n# note\nR 5\n@7 W 1 ff ; R 2\nIDLE\nR 0\n");
    ASSERT_EQ(t.cycles.size(), 4u);
    EXPECT_EQ(t.cycles[0].cycle, 0);
    EXPECT_EQ(t.cycles[0].write, (WriteOp{5, 0xab}));
    EXPECT_EQ(t.cycles[1].read, (ReadOp{5}));
    EXPECT_EQ(t.cycles[2].cycle, 7);
    EXPECT_TRUE(t.cycles[2].write && t.cycles[2].read);
    EXPECT_EQ(t.cycles[3].cycle, 9);
    EXPECT_EQ(parse_trace(trace_to_text(t)), t);
}

TEST(Trace, Errors) {
    EXPECT_THROW(parse_trace("W 1\n"), ParseError);
    EXPECT_THROW(parse_trace("X 1\n"), ParseError);
    EXPECT_THROW(parse_trace("@4 R 1\n@2 R 1\n"), ParseError);
    SimTrace bad;
    bad.cycles.resize(2);
    bad.cycles[0].cycle = bad.cycles[1].cycle = 3;
    EXPECT_THROW(bad.validate(), SimError);
    EXPECT_THROW(parse_trace("R 1 ; R 2\n"), ParseError);
}

TEST(Simulate, StoreThenLoad) {
    const auto r = simulate(sram(kSmall), parse_trace("W 5 ab\nR 5\n"));
    ASSERT_EQ(r.outputs.size(), 1u);
    EXPECT_EQ(r.outputs[0], (SimOutput{2, {0xab}}));
    EXPECT_EQ(r.uninitialized_reads, 0u);
}

TEST(Simulate, ReadDuringWriteReturnsOldData) {
    for (const auto& cfg : {kSmall, kBanked}) {
        const auto r = simulate(sram(cfg), parse_trace("W 7 12\nW 7 34 ; R 7\nR 7\n"));
        ASSERT_EQ(r.outputs.size(), 2u);
        EXPECT_EQ(r.outputs[0], (SimOutput{2, {0x12}}));
        EXPECT_EQ(r.outputs[1], (SimOutput{3, {0x34}}));
    }
}

TEST(Simulate, UninitializedReadIsPoisonWithWarning) {
    const auto r = simulate(sram(kBanked), parse_trace("R 3\n"));
    ASSERT_EQ(r.outputs.size(), 1u);
    EXPECT_EQ(r.outputs[0].data[0], width_mask(r.data_width));
    EXPECT_EQ(r.uninitialized_reads, 1u);
    EXPECT_FALSE(r.warnings.empty());
}

TEST(Simulate, RangeErrors) {
    EXPECT_THROW(simulate(sram(kSmall), parse_trace("R 32\n")), SimError);
    EXPECT_THROW(simulate(sram(kSmall), parse_trace("W 1 100\n")), SimError);
    EXPECT_THROW(simulate(sram(kSmall), parse_trace("WIN 0 0\n")), SimError);
}

TEST(Simulate, MatchesFlatMemoryOnRandomTraces) {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 8; ++i) {
        const auto& m = lib().macros()[rng() % lib().macros().size()];
        MemoryConfig cfg{m.name, 1 << (rng() % 3), 1 << (rng() % 3), 1 << (rng() % 3), 1};
        cfg.M = 1 << (rng() % 3);
        if (cfg.bits(m) > 64 || cfg.C * m.W % cfg.M)
            cfg.M = 1, cfg.C = 1;
        const auto& ir = sram(cfg);
        const auto trace = random_trace(ir, 2000, rng());
        const auto r = simulate(ir, trace);
        EXPECT_EQ(r.outputs, oracle::flat_memory(trace, static_cast<std::uint64_t>(cfg.words(m)),
                                                  static_cast<int>(cfg.bits(m))))
            << to_string(cfg);
    }
}

TEST(Simulate, DeterministicAndSeeded) {
    const auto& ir = sram(kBanked);
    EXPECT_EQ(random_trace(ir, 500, 9), random_trace(ir, 500, 9));
    EXPECT_NE(random_trace(ir, 500, 9), random_trace(ir, 500, 10));
    const auto t = random_trace(ir, 500, 9);
    EXPECT_EQ(result_to_text(simulate(ir, t)), result_to_text(simulate(ir, t)));
}

TEST(Simulate, ActivityCountsOneArrayPerAccess) {
    const auto& ir = sram(kBanked);
    const auto r = simulate(ir, parse_trace("W 0 1\nW 100 2\nR 0\nR 100\nR 5\n"));
    std::uint64_t reads = 0, writes = 0;
    for (const auto& [id, a] : r.activity) {
        reads += a.reads;
        writes += a.writes;
    }
    // All C bank columns fire on every access.
    EXPECT_EQ(reads, 3u * kBanked.C);
    EXPECT_EQ(writes, 2u * kBanked.C);
}

TEST(Energy, IdleTraceIsLeakageOnly) {
    const auto r = simulate(sram(kSmall), parse_trace("IDLE\nIDLE\nIDLE\nIDLE\n"));
    const auto ppa = evaluate_ppa(kSmall, lib());
    EXPECT_EQ(r.outputs.size(), 0u);
    EXPECT_NEAR(energy_report(r, lib(), lib().tech()),
                ppa.p_leak_nw * ppa.t_cycle_ps * static_cast<double>(r.cycles) * 1e-6, 1e-9);
}

TEST(Energy, EmptyTraceIsZero) {
    const auto r = simulate(sram(kSmall), SimTrace{});
    EXPECT_EQ(r.cycles, 0);
    EXPECT_EQ(energy_report(r, lib(), lib().tech()), 0.0);
}

// ba_32x8 alone: decode 50 + 6*5 = 80, e_read 7.6, die 4960 x 36512 nm so the
// wire term is 0.3 * 41.472 = 12.4416; total 100.0416 fJ plus leakage.
TEST(Energy, SingleReadComposition) {
    const auto r = simulate(sram(kSmall), parse_trace("R 0\n"));
    const auto ppa = evaluate_ppa(kSmall, lib());
    const double leak = ppa.p_leak_nw * ppa.t_cycle_ps * static_cast<double>(r.cycles) * 1e-6;
    EXPECT_NEAR(energy_report(r, lib(), lib().tech()) - leak, 100.0416, 1e-9);
}

TEST(Energy, RandomTraceNearAnalytic) {
    for (const auto& cfg : {kSmall, kBanked}) {
        const auto& ir = sram(cfg);
        const auto trace = random_trace(ir, 1000, 4);
        const auto r = simulate(ir, trace);
        const double ops = static_cast<double>(r.port_reads + r.port_writes);
        EXPECT_GE(ops, 1000.0);
        const double analytic = evaluate_ppa(cfg, lib()).e_op_fj * ops;
        const double simulated = energy_report(r, lib(), lib().tech());
        EXPECT_LE(std::abs(simulated / analytic - 1.0), 0.10) << to_string(cfg);
    }
}

TEST(VerifyPA, SinglePixelWindow) {
    const PAWindowSpec s{3, 3, 0, 0, 8};
    const auto rep = verify_pa(s, generate_pa_sm(s, lib()));
    EXPECT_TRUE(rep.ok());
    EXPECT_EQ(rep.windows, 64u);
    EXPECT_EQ(verify_report_text(rep).rfind("mismatches=0 conflicts=0", 0), 0u);
}

TEST(VerifyPA, FullSweepOnReferenceSpec) {
    const PAWindowSpec s{5, 5, 1, 1, 8};
    const auto sm = verify_pa(s, generate_pa_sm(s, lib()));
    const auto tm = verify_pa(s, generate_pa_tm(s, lib()));
    EXPECT_EQ(sm.windows, 1024u);
    EXPECT_TRUE(sm.ok());
    EXPECT_TRUE(tm.ok());
    EXPECT_EQ(sm.outputs, tm.outputs);
}

TEST(SimulatePA, WindowTrace) {
    const PAWindowSpec s{5, 5, 1, 1, 8};
    const auto ir = generate_pa_sm(s, lib());
    const auto r = simulate(ir, parse_trace("W 0 11\nW 1 22\nW 32 33\nW 33 44\nWIN 0 0\n"));
    ASSERT_EQ(r.outputs.size(), 1u);
    EXPECT_EQ(r.outputs[0], (SimOutput{5, {0x11, 0x22, 0x33, 0x44}}));
    EXPECT_EQ(r.conflicts, 0u);
}
