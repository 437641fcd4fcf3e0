#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include "smemsynth/baplus.hpp"

namespace smemsynth {

// One 1R-1W synthesis candidate: R x C banks, each stacking K arrays of the
// named variant, read through an M:1 column mux.
struct MemoryConfig {
    std::string variant;
    int R = 1; // bank rows
    int C = 1; // bank columns
    int K = 1; // arrays per bank
    int M = 1; // column-mux factor

    auto operator<=>(const MemoryConfig&) const = default;
    bool operator==(const MemoryConfig&) const = default;

    int macro_count() const { return R * C * K; }
    std::int64_t words(const BAPlusMacro& m) const { return std::int64_t{R} * K * m.B * M; }
    std::int64_t bits(const BAPlusMacro& m) const { return std::int64_t{C} * m.W / M; }
};

std::string to_string(const MemoryConfig& cfg);

// Throws ConstraintError unless every factor is a power of two >= 1 and M
// divides C*W. With words/bits > 0 the capacity constraints are also checked.
void validate_config(const MemoryConfig& cfg, const BAPlusMacro& macro, std::int64_t words = 0,
                     std::int64_t bits = 0);

// Address field widths, MSB to LSB: [bank_row | ba_in_bank | row_in_ba | mux_sel].
struct AddressLayout {
    int bank_row_bits = 0;
    int ba_bits = 0;
    int row_bits = 0;
    int mux_bits = 0;

    int total() const { return bank_row_bits + ba_bits + row_bits + mux_bits; }
};

AddressLayout address_layout(const MemoryConfig& cfg, const BAPlusMacro& macro);

struct AddressFields {
    std::uint64_t bank_row = 0;
    std::uint64_t ba = 0;
    std::uint64_t row = 0;
    std::uint64_t mux_sel = 0;

    bool operator==(const AddressFields&) const = default;
};

AddressFields split_address(const AddressLayout& layout, std::uint64_t addr);
std::uint64_t join_address(const AddressLayout& layout, const AddressFields& f);

} // namespace smemsynth
