#include "smemsynth/memory_config.hpp"

#include <sstream>

#include "smemsynth/common.hpp"

namespace smemsynth {

std::string to_string(const MemoryConfig& cfg) {
    std::ostringstream os;
    os << cfg.variant << " R=" << cfg.R << " C=" << cfg.C << " K=" << cfg.K << " M=" << cfg.M;
    return os.str();
}

void validate_config(const MemoryConfig& cfg, const BAPlusMacro& macro, std::int64_t words, std::int64_t bits) {
    auto fail = [&](const std::string& what) { throw ConstraintError(to_string(cfg) + ": " + what); };
    if (cfg.variant != macro.name)
        fail("variant does not match macro " + macro.name);
    for (int v : {cfg.R, cfg.C, cfg.K, cfg.M})
        if (v < 1 || !is_pow2(static_cast<std::uint64_t>(v)))
            fail("R, C, K, M must be powers of two >= 1");
    if ((std::int64_t{cfg.C} * macro.W) % cfg.M != 0)
        fail("M must divide C*W");
    if (words > 0 && cfg.words(macro) != words)
        fail("depth R*K*B*M != " + std::to_string(words));
    if (bits > 0 && cfg.bits(macro) != bits)
        fail("width C*W/M != " + std::to_string(bits));
}

AddressLayout address_layout(const MemoryConfig& cfg, const BAPlusMacro& macro) {
    return {ilog2(static_cast<std::uint64_t>(cfg.R)), ilog2(static_cast<std::uint64_t>(cfg.K)),
            clog2(static_cast<std::uint64_t>(macro.B)), ilog2(static_cast<std::uint64_t>(cfg.M))};
}

AddressFields split_address(const AddressLayout& l, std::uint64_t addr) {
    AddressFields f;
    f.mux_sel = addr & width_mask(l.mux_bits);
    addr >>= l.mux_bits;
    f.row = addr & width_mask(l.row_bits);
    addr >>= l.row_bits;
    f.ba = addr & width_mask(l.ba_bits);
    addr >>= l.ba_bits;
    f.bank_row = addr & width_mask(l.bank_row_bits);
    return f;
}

std::uint64_t join_address(const AddressLayout& l, const AddressFields& f) {
    std::uint64_t a = f.bank_row;
    a = (a << l.ba_bits) | f.ba;
    a = (a << l.row_bits) | f.row;
    a = (a << l.mux_bits) | f.mux_sel;
    return a;
}

} // namespace smemsynth
