#include "smemsynth/tech.hpp"

#include <fstream>
#include <sstream>
#include <type_traits>

#include "smemsynth/common.hpp"

namespace smemsynth {

namespace {

template <class T, class F>
void visit_fields(T& t, F&& f) {
    f("track_pitch_nm", t.track_pitch_nm);
    f("poly_pitch_nm", t.poly_pitch_nm);
    f("bitcell_tracks", t.bitcell_tracks);
    f("acc0", t.acc0);
    f("acc_per_row", t.acc_per_row);
    f("acc_per_col", t.acc_per_col);
    f("rd0", t.rd0);
    f("rd_per_col", t.rd_per_col);
    f("rd_per_row", t.rd_per_row);
    f("wr0", t.wr0);
    f("wr_per_col", t.wr_per_col);
    f("wr_per_row", t.wr_per_row);
    f("leak_fraction", t.leak_fraction);
    f("leak_per_bit_nw", t.leak_per_bit_nw);
    f("d0", t.d0);
    f("d1", t.d1);
    f("g0", t.g0);
    f("g1", t.g1);
    f("m0", t.m0);
    f("m1", t.m1);
    f("e_dec0", t.e_dec0);
    f("e_dec1", t.e_dec1);
    f("e_wire_per_um", t.e_wire_per_um);
    f("p_leak_periph", t.p_leak_periph);
    f("periph_fraction", t.periph_fraction);
    f("area_dec0", t.area_dec0);
    f("area_dec_per_line", t.area_dec_per_line);
    f("area_mux_per_bit", t.area_mux_per_bit);
    f("area_inc_per_line", t.area_inc_per_line);
    f("area_align_per_bit", t.area_align_per_bit);
    f("area_trans_per_bit", t.area_trans_per_bit);
    f("area_ctrl", t.area_ctrl);
    f("e_inc", t.e_inc);
    f("e_align_per_bit", t.e_align_per_bit);
    f("e_trans_per_bit", t.e_trans_per_bit);
    f("e_ctrl", t.e_ctrl);
    f("t_inc", t.t_inc);
    f("t_align0", t.t_align0);
    f("t_align_per_level", t.t_align_per_level);
    f("t_trans_per_bit", t.t_trans_per_bit);
    f("trad_delay_factor", t.trad_delay_factor);
    f("trad_energy_factor", t.trad_energy_factor);
    f("trad_max_rows", t.trad_max_rows);
    f("fp_gutter_pitches", t.fp_gutter_pitches);
    f("fp_periph_pitches", t.fp_periph_pitches);
    f("fp_bank_periph_tracks", t.fp_bank_periph_tracks);
    f("fp_global_periph_tracks", t.fp_global_periph_tracks);
    f("fp_rail_pitch_tracks", t.fp_rail_pitch_tracks);
    f("fp_utilization", t.fp_utilization);
}

} // namespace

void TechParams::validate() const {
    if (track_pitch_nm <= 0 || poly_pitch_nm <= 0 || bitcell_tracks <= 0)
        throw ConstraintError("tech: pitches must be positive");
    if (fp_rail_pitch_tracks <= 0)
        throw ConstraintError("tech: fp_rail_pitch_tracks must be positive");
    if (fp_utilization <= 0.0 || fp_utilization > 1.0)
        throw ConstraintError("tech: fp_utilization must be in (0, 1]");
    if (trad_max_rows < 1)
        throw ConstraintError("tech: trad_max_rows must be >= 1");
    visit_fields(*this, [](const char* name, const auto& v) {
        if (v < 0)
            throw ConstraintError(std::string("tech: coefficient ") + name + " is negative");
    });
}

nlohmann::ordered_json tech_to_json(const TechParams& tech) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    visit_fields(tech, [&](const char* name, const auto& v) { j[name] = v; });
    return j;
}

TechParams tech_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object())
        throw ParseError(where, "expected an object");
    TechParams t;
    std::size_t matched = 0;
    visit_fields(t, [&](const char* name, auto& v) {
        auto it = j.find(name);
        if (it == j.end())
            return;
        ++matched;
        using V = std::remove_reference_t<decltype(v)>;
        if constexpr (std::is_integral_v<V>) {
            if (!it->is_number_integer())
                throw ParseError(where + "." + name, "expected an integer");
        } else if (!it->is_number()) {
            throw ParseError(where + "." + name, "expected a number");
        }
        v = it->template get<V>();
    });
    if (matched != j.size()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            bool known = false;
            visit_fields(t, [&](const char* name, auto&) { known = known || it.key() == name; });
            if (!known)
                throw ParseError(where + "." + it.key(), "unknown key");
        }
    }
    t.validate();
    return t;
}

TechParams load_tech(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError(path, "cannot open file");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + " byte " + std::to_string(e.byte), e.what());
    }
    // Accept either a bare tech object or a library document's "tech" member.
    if (j.is_object() && j.contains("tech") && j.contains("macros"))
        return tech_from_json(j["tech"], path + ":tech");
    return tech_from_json(j, path);
}

} // namespace smemsynth
