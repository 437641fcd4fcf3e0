#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smemsynth/baplus.hpp"
#include "smemsynth/netlist.hpp"
#include "smemsynth/pa.hpp"
#include "smemsynth/tech.hpp"

namespace smemsynth {

// Write: an address on 1R-1W designs, the linear pixel address x*2^n + y on
// parallel-access designs.
struct WriteOp {
    std::uint64_t addr = 0;
    std::uint64_t data = 0;
    bool operator==(const WriteOp&) const = default;
};

struct ReadOp {
    std::uint64_t addr = 0;
    bool operator==(const ReadOp&) const = default;
};

struct WindowOp {
    std::uint64_t x = 0, y = 0;
    bool operator==(const WindowOp&) const = default;
};

// Operations issued in one clock cycle. Empty = idle.
struct TraceCycle {
    std::int64_t cycle = 0;
    std::optional<WriteOp> write;
    std::optional<ReadOp> read;
    std::optional<WindowOp> window;

    bool operator==(const TraceCycle&) const = default;
};

// Cycle stamps strictly increasing; cycles absent from the list are idle.
struct SimTrace {
    std::vector<TraceCycle> cycles;

    // Throws SimError when stamps are not strictly increasing.
    void validate() const;
    bool operator==(const SimTrace&) const = default;
};

// Trace text: one cycle per line, numbered from 0 or from an explicit
// "@<cycle>" prefix. Ops on one line share the cycle and are separated by
// ';': "W <addr> <hex>", "R <addr>", "WIN <x> <y>", "IDLE". '#' starts a
// comment.
SimTrace parse_trace(const std::string& text, const std::string& origin = "<string>");
std::string trace_to_text(const SimTrace& trace);
SimTrace load_trace(const std::string& path);

// Seeded random trace of `ops` busy cycles for the netlist's port set:
// reads, writes or both on 1R-1W designs; writes or window reads on
// parallel-access designs.
SimTrace random_trace(const NetlistIR& ir, std::size_t ops, std::uint64_t seed);

struct SimOutput {
    std::int64_t cycle = 0;
    std::vector<std::uint64_t> data; // rdata, or window pixels row-major
    bool operator==(const SimOutput&) const = default;
};

struct CellActivity {
    int B = 0, W = 0;
    std::uint64_t reads = 0;
    std::uint64_t writes = 0;
    bool operator==(const CellActivity&) const = default;
};

struct SimResult {
    std::map<std::string, std::string> attrs; // copied from the netlist
    std::vector<SimOutput> outputs;
    std::map<std::string, CellActivity> activity; // array cells by id
    std::int64_t cycles = 0;                       // including the drain cycle
    std::uint64_t port_reads = 0;                  // R and WIN ops
    std::uint64_t port_writes = 0;
    std::uint64_t uninitialized_reads = 0;
    std::uint64_t conflicts = 0; // window reads where a bank did not fire exactly one array
    std::vector<std::string> warnings;
    int data_width = 0;
    double e_total_fj = 0.0; // filled by energy_report callers
};

// Cycle-accurate simulation. Reads issued in cycle t are reported at t+1.
// Throws SimError on an out-of-range address or data value, a port conflict,
// bus contention or a combinational loop.
SimResult simulate(const NetlistIR& ir, const SimTrace& trace);

// "OUT <cycle> <hex>..." lines followed by '#' summary comments.
std::string result_to_text(const SimResult& r);

// Activity-based energy: array reads/writes at the characterized per-access
// energies, per-operation periphery overhead from the analytic model, and
// leakage over the simulated cycles.
double energy_report(const SimResult& r, const Library& lib, const TechParams& tech);

struct PAVerifyReport {
    std::uint64_t windows = 0;
    std::uint64_t mismatches = 0;
    std::uint64_t conflicts = 0;
    std::vector<std::string> details; // first mismatches
    std::vector<SimOutput> outputs;   // window outputs in origin order

    bool ok() const { return mismatches == 0 && conflicts == 0; }
};

// Writes a pseudorandom image, reads every window origin and compares each
// output against the reference image under the design's boundary mode.
PAVerifyReport verify_pa(const PAWindowSpec& spec, const NetlistIR& ir, std::uint64_t seed = 0);
std::string verify_report_text(const PAVerifyReport& r);

} // namespace smemsynth
