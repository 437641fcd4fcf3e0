#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace smemsynth {

// Technology and model coefficients. Units: lengths in nm, times in ps,
// energies in fJ, powers in nW, areas in um^2.
//
// Geometry counts height in bitcell rows: one row is `bitcell_tracks`
// M1 tracks of `track_pitch_nm` each.
struct TechParams {
    // Grid.
    std::int64_t track_pitch_nm = 56;
    std::int64_t poly_pitch_nm = 80;
    std::int64_t bitcell_tracks = 16;

    // BA+ access time: acc0 + acc_per_row*B + acc_per_col*W.
    double acc0 = 60.0;
    double acc_per_row = 2.0;
    double acc_per_col = 1.5;

    // BA+ read/write energy: e0 + per_col*W + per_row*B*leak_fraction.
    double rd0 = 2.0;
    double rd_per_col = 0.5;
    double rd_per_row = 0.1;
    double wr0 = 2.2;
    double wr_per_col = 0.55;
    double wr_per_row = 0.1;
    double leak_fraction = 0.5;

    // BA+ leakage per stored bit.
    double leak_per_bit_nw = 0.03;

    // Periphery timing: global decode, shared global bitline, column mux.
    double d0 = 40.0;
    double d1 = 12.0;
    double g0 = 15.0;
    double g1 = 4.0;
    double m0 = 20.0;
    double m1 = 10.0;

    // Periphery energy and leakage.
    double e_dec0 = 50.0;
    double e_dec1 = 6.0;
    double e_wire_per_um = 0.3;
    double p_leak_periph = 200.0;

    // Periphery area.
    double periph_fraction = 0.25;
    double area_dec0 = 20.0;
    double area_dec_per_line = 2.0;
    double area_mux_per_bit = 0.4;

    // Parallel-access logic.
    double area_inc_per_line = 0.5;
    double area_align_per_bit = 0.4;
    double area_trans_per_bit = 3.0;
    double area_ctrl = 200.0;
    double e_inc = 0.5;
    double e_align_per_bit = 0.05;
    double e_trans_per_bit = 0.4;
    double e_ctrl = 20.0;
    double t_inc = 10.0;
    double t_align0 = 10.0;
    double t_align_per_level = 8.0;
    double t_trans_per_bit = 6.0;

    // Compiled-SRAM baseline penalties (patterning-restricted periphery).
    double trad_delay_factor = 1.5;
    double trad_energy_factor = 1.1;
    std::int64_t trad_max_rows = 256;

    // Floorplan.
    std::int64_t fp_gutter_pitches = 2;
    std::int64_t fp_periph_pitches = 40;
    std::int64_t fp_bank_periph_tracks = 4;
    std::int64_t fp_global_periph_tracks = 40;
    std::int64_t fp_rail_pitch_tracks = 20;
    double fp_utilization = 0.7;

    std::int64_t row_pitch_nm() const { return bitcell_tracks * track_pitch_nm; }

    // Throws ConstraintError when a pitch is not positive or a coefficient
    // is negative.
    void validate() const;

    bool operator==(const TechParams&) const = default;
};

nlohmann::ordered_json tech_to_json(const TechParams& tech);

// Keys absent from `j` keep their default; unknown keys are rejected.
TechParams tech_from_json(const nlohmann::json& j, const std::string& where = "tech");

TechParams load_tech(const std::string& path);

} // namespace smemsynth
