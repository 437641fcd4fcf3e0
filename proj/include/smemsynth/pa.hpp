#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smemsynth/baplus.hpp"
#include "smemsynth/explorer.hpp"
#include "smemsynth/netlist.hpp"
#include "smemsynth/tech.hpp"

namespace smemsynth {

// 2^a x 2^b window access over a 2^m x 2^n image of pixel_bits-wide pixels.
// x indexes the 2^m dimension, y the 2^n dimension.
struct PAWindowSpec {
    int m = 0, n = 0, a = 0, b = 0;
    int pixel_bits = 8;

    int banks() const { return 1 << (a + b); }
    std::int64_t words_per_bank() const { return std::int64_t{1} << ((m - a) + (n - b)); }
    std::int64_t pixels() const { return std::int64_t{1} << (m + n); }

    // Throws ConstraintError: needs 1 <= m, n <= 16, 0 <= a <= min(m, 4),
    // 0 <= b <= min(n, 4), at least two words per bank and a power-of-two
    // pixel_bits <= 64.
    void validate() const;

    bool operator==(const PAWindowSpec&) const = default;
};

std::string to_string(const PAWindowSpec& s);
// "m,n,a,b" or "m,n,a,b,pixel_bits".
PAWindowSpec parse_pa_spec(const std::string& text);
PAWindowSpec pa_spec_from_json(const nlohmann::json& j, const std::string& where = "pa");

enum class Boundary { Wrap, Clamp };
std::string to_string(Boundary b);
Boundary parse_boundary(const std::string& s);

struct PixelLocation {
    int p = 0, q = 0; // bank
    std::int64_t row = 0, col = 0;

    bool operator==(const PixelLocation&) const = default;
};

// Bank (x mod 2^a, y mod 2^b), in-bank address (x >> a, y >> b).
// Throws BoundsError for an out-of-range coordinate.
PixelLocation map_pixel(const PAWindowSpec& s, std::int64_t x, std::int64_t y);

struct BankAccess {
    int p = 0, q = 0;
    std::int64_t row = 0, col = 0;

    bool operator==(const BankAccess&) const = default;
};

struct WindowPlan {
    std::vector<BankAccess> banks; // one per bank, p-major
    int rx = 0, ry = 0;            // alignment rotation
};

// Per-bank addresses for the window at origin (x, y) with toroidal wrap:
// row(p) = ((x >> a) + [p < x mod 2^a]) mod 2^(m-a), col(q) likewise.
WindowPlan window_access_plan(const PAWindowSpec& s, std::int64_t x, std::int64_t y);

// Image coordinate of window pixel (i, j) for origin (x, y).
std::pair<std::int64_t, std::int64_t> window_pixel(const PAWindowSpec& s, std::int64_t x, std::int64_t y, int i, int j,
                                                   Boundary mode = Boundary::Wrap);

// Linear pixel address used by traces: x * 2^n + y.
inline std::int64_t pixel_address(const PAWindowSpec& s, std::int64_t x, std::int64_t y) { return (x << s.n) | y; }

// Array variant used for every bank: W = pixel_bits and the deepest library
// B that divides 2^(m-a); generated on demand when the library has none.
BAPlusMacro pa_variant(const PAWindowSpec& s, const Library& lib);

// Smart design: one X and one Y one-hot decoder shared by all banks, a
// per-bank one-hot increment and tile-select wordline gating.
NetlistIR generate_pa_sm(const PAWindowSpec& s, const Library& lib, Boundary mode = Boundary::Wrap);

// Traditional design: one complete 1R-1W SRAM per bank behind a binary
// address translator.
NetlistIR generate_pa_tm(const PAWindowSpec& s, const Library& lib, Boundary mode = Boundary::Wrap);

enum class PAArch { SM, TM };
std::string to_string(PAArch a);

struct PAComparison {
    PPAEstimate sm;
    PPAEstimate tm;
};

PPAEstimate pa_ppa(const PAWindowSpec& s, PAArch arch, const Library& lib, const TechParams& tech);
PAComparison compare_pa_ppa(const PAWindowSpec& s, const Library& lib, const TechParams& tech);

// Energy of one port operation excluding array activations (decode,
// increment/translation, control, alignment, wire).
double pa_op_overhead_fj(const PAWindowSpec& s, PAArch arch, const Library& lib, const TechParams& tech);

// design,area_um2,t_cycle_ps,e_op_fj,gops_per_watt
std::string pa_csv(const PAComparison& c);

} // namespace smemsynth
