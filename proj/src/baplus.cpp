#include "smemsynth/baplus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "smemsynth/common.hpp"

namespace smemsynth {

std::string variant_name(int B, int W) { return "ba_" + std::to_string(B) + "x" + std::to_string(W); }

namespace {

void check_dim(const char* dim, int v, int lo, int hi) {
    if (!is_pow2(static_cast<std::uint64_t>(v < 0 ? 0 : v)) || v < lo || v > hi) {
        std::ostringstream os;
        os << "dimension " << dim << "=" << v << " must be a power of two in [" << lo << ", " << hi << "]";
        throw BoundsError(os.str());
    }
}

std::vector<Pin> default_pins(int B, int W) {
    std::vector<Pin> pins;
    pins.push_back({"clk", "W", 0});
    pins.push_back({"rwl", "W", 1});
    pins.push_back({"wwl", "W", 1 + B});
    pins.push_back({"wd", "N", 2});
    pins.push_back({"wm", "N", 2 + 2 * std::int64_t{W}});
    pins.push_back({"q", "S", 2});
    pins.push_back({"oe", "S", 2 + 2 * std::int64_t{W}});
    return pins;
}

} // namespace

BAPlusMacro generate_variant(int B, int W, const TechParams& tech, const VariantBounds& bounds) {
    check_dim("B", B, bounds.min_b, bounds.max_b);
    check_dim("W", W, bounds.min_w, bounds.max_w);
    BAPlusMacro m;
    m.name = variant_name(B, W);
    m.B = B;
    m.W = W;
    m.height_tracks = B + kPeriphRows;
    m.width_pitches = 2 * std::int64_t{W} + kPeriphPitches;
    // Bitline RC grows with B, wordline RC with W.
    m.t_access = tech.acc0 + tech.acc_per_row * B + tech.acc_per_col * W;
    m.e_read = tech.rd0 + tech.rd_per_col * W + tech.rd_per_row * B * tech.leak_fraction;
    m.e_write = tech.wr0 + tech.wr_per_col * W + tech.wr_per_row * B * tech.leak_fraction;
    m.p_leak = tech.leak_per_bit_nw * B * W;
    m.pins = default_pins(B, W);
    validate_macro(m);
    return m;
}

void validate_macro(const BAPlusMacro& m) {
    auto fail = [&](const std::string& what) { throw ConstraintError("macro " + m.name + ": " + what); };
    if (m.name.empty())
        throw ConstraintError("macro with empty name");
    if (m.B < 1 || m.W < 1)
        fail("B and W must be >= 1");
    if (m.height_tracks < m.B)
        fail("height_tracks must be >= B");
    if (m.width_pitches < 2 * std::int64_t{m.W})
        fail("width_pitches must be >= 2*W");
    if (!(m.t_access > 0) || !(m.e_read > 0) || !(m.e_write > 0) || !(m.p_leak > 0))
        fail("t_access, e_read, e_write and p_leak must be positive");
}

Library::Library(TechParams tech, std::vector<BAPlusMacro> macros)
    : tech_(std::move(tech)), macros_(std::move(macros)) {
    std::sort(macros_.begin(), macros_.end(),
              [](const BAPlusMacro& a, const BAPlusMacro& b) { return a.name < b.name; });
    for (std::size_t i = 0; i < macros_.size(); ++i) {
        validate_macro(macros_[i]);
        if (i > 0 && macros_[i].name == macros_[i - 1].name)
            throw ConstraintError("duplicate macro name " + macros_[i].name);
    }
}

const BAPlusMacro* Library::find(const std::string& name) const {
    auto it = std::lower_bound(macros_.begin(), macros_.end(), name,
                               [](const BAPlusMacro& m, const std::string& n) { return m.name < n; });
    return it != macros_.end() && it->name == name ? &*it : nullptr;
}

const BAPlusMacro& Library::at(const std::string& name) const {
    if (const auto* m = find(name))
        return *m;
    throw LookupError("unknown BA+ variant " + name);
}

Library generate_library(const std::vector<int>& b_values, const std::vector<int>& w_values,
                         const TechParams& tech, const VariantBounds& bounds) {
    std::vector<BAPlusMacro> macros;
    for (int b : b_values)
        for (int w : w_values)
            macros.push_back(generate_variant(b, w, tech, bounds));
    return Library(tech, std::move(macros));
}

Library default_library(const TechParams& tech) {
    return generate_library({8, 16, 32, 64}, {8, 16, 32, 64}, tech);
}

// ---------------------------------------------------------------------------
// JSON document

namespace {

const std::set<std::string> kMacroKeys = {"name",       "B",         "W",         "height_tracks",
                                          "width_pitches", "t_access_ps", "e_read_fj", "e_write_fj",
                                          "p_leak_nw", "pins"};

nlohmann::ordered_json macro_to_json(const BAPlusMacro& m) {
    nlohmann::ordered_json j;
    j["name"] = m.name;
    j["B"] = m.B;
    j["W"] = m.W;
    j["height_tracks"] = m.height_tracks;
    j["width_pitches"] = m.width_pitches;
    j["t_access_ps"] = m.t_access;
    j["e_read_fj"] = m.e_read;
    j["e_write_fj"] = m.e_write;
    j["p_leak_nw"] = m.p_leak;
    auto pins = nlohmann::ordered_json::array();
    for (const auto& p : m.pins)
        pins.push_back({{"name", p.name}, {"side", p.side}, {"offset", p.offset}});
    j["pins"] = pins;
    return j;
}

// Line number of a byte offset, for parse diagnostics.
std::size_t line_of(const std::string& text, std::size_t byte) {
    return 1 + static_cast<std::size_t>(
                   std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(std::min(byte, text.size())), '\n'));
}

template <class T>
T get_field(const nlohmann::json& obj, const std::string& key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError(where + "." + key, "missing field \"" + key + "\"");
    if constexpr (std::is_same_v<T, std::string>) {
        if (!it->is_string())
            throw ParseError(where + "." + key, "expected a string");
    } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer())
            throw ParseError(where + "." + key, "expected an integer");
    } else {
        if (!it->is_number())
            throw ParseError(where + "." + key, "expected a number");
    }
    return it->get<T>();
}

BAPlusMacro macro_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object())
        throw ParseError(where, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!kMacroKeys.count(it.key()))
            throw ParseError(where + "." + it.key(), "unknown key");
    BAPlusMacro m;
    m.name = get_field<std::string>(j, "name", where);
    m.B = get_field<int>(j, "B", where);
    m.W = get_field<int>(j, "W", where);
    m.height_tracks = get_field<std::int64_t>(j, "height_tracks", where);
    m.width_pitches = get_field<std::int64_t>(j, "width_pitches", where);
    m.t_access = get_field<double>(j, "t_access_ps", where);
    m.e_read = get_field<double>(j, "e_read_fj", where);
    m.e_write = get_field<double>(j, "e_write_fj", where);
    m.p_leak = get_field<double>(j, "p_leak_nw", where);
    auto pins = j.find("pins");
    if (pins == j.end())
        throw ParseError(where + ".pins", "missing field \"pins\"");
    if (!pins->is_array())
        throw ParseError(where + ".pins", "expected an array");
    for (std::size_t i = 0; i < pins->size(); ++i) {
        const auto& pj = (*pins)[i];
        std::string pw = where + ".pins[" + std::to_string(i) + "]";
        if (!pj.is_object())
            throw ParseError(pw, "expected an object");
        for (auto it = pj.begin(); it != pj.end(); ++it)
            if (it.key() != "name" && it.key() != "side" && it.key() != "offset")
                throw ParseError(pw + "." + it.key(), "unknown key");
        Pin p{get_field<std::string>(pj, "name", pw), get_field<std::string>(pj, "side", pw),
              get_field<std::int64_t>(pj, "offset", pw)};
        if (p.side != "N" && p.side != "S" && p.side != "E" && p.side != "W")
            throw ParseError(pw + ".side", "side must be one of N, S, E, W");
        m.pins.push_back(std::move(p));
    }
    try {
        validate_macro(m);
    } catch (const ConstraintError& e) {
        throw ParseError(where, e.what());
    }
    return m;
}

} // namespace

std::string library_to_string(const Library& lib) {
    nlohmann::ordered_json doc;
    doc["tech"] = tech_to_json(lib.tech());
    auto macros = nlohmann::ordered_json::array();
    for (const auto& m : lib.macros())
        macros.push_back(macro_to_json(m));
    doc["macros"] = macros;
    return doc.dump(2) + "\n";
}

Library library_from_string(const std::string& text, const std::string& origin) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(origin + ":" + std::to_string(line_of(text, e.byte)), e.what());
    }
    if (!doc.is_object())
        throw ParseError(origin, "top level must be an object");
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (it.key() != "tech" && it.key() != "macros")
            throw ParseError(origin + ":" + it.key(), "unknown key");
    if (!doc.contains("tech"))
        throw ParseError(origin + ":tech", "missing field \"tech\"");
    if (!doc.contains("macros") || !doc["macros"].is_array())
        throw ParseError(origin + ":macros", "missing or non-array field \"macros\"");
    TechParams tech;
    try {
        tech = tech_from_json(doc["tech"], origin + ":tech");
    } catch (const ConstraintError& e) {
        throw ParseError(origin + ":tech", e.what());
    }
    std::vector<BAPlusMacro> macros;
    std::set<std::string> seen;
    const auto& arr = doc["macros"];
    for (std::size_t i = 0; i < arr.size(); ++i) {
        std::string where = origin + ":macros[" + std::to_string(i) + "]";
        auto m = macro_from_json(arr[i], where);
        if (!seen.insert(m.name).second)
            throw ParseError(where + ".name", "duplicate macro name \"" + m.name + "\"");
        macros.push_back(std::move(m));
    }
    return Library(tech, std::move(macros));
}

void save_library(const Library& lib, const std::string& path) {
    if (lib.empty())
        throw ConstraintError("refusing to save an empty library");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path);
    out << library_to_string(lib);
    if (!out)
        throw Error("write failed: " + path);
}

Library load_library(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError(path, "cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return library_from_string(ss.str(), path);
}

} // namespace smemsynth
