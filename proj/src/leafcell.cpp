#include "smemsynth/leafcell.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include "smemsynth/common.hpp"
#include "smemsynth/report.hpp"

namespace smemsynth {

std::string to_string(Restriction r) {
    switch (r) {
    case Restriction::PureGrating1D:
        return "pure_grating_1d";
    case Restriction::Structured1D:
        return "structured_1d";
    case Restriction::Compound2D:
        return "compound_2d";
    }
    return "?";
}

Restriction parse_restriction(const std::string& s) {
    if (s == "pure_grating_1d")
        return Restriction::PureGrating1D;
    if (s == "structured_1d")
        return Restriction::Structured1D;
    if (s == "compound_2d")
        return Restriction::Compound2D;
    throw ParseError("restriction", "unknown class '" + s + "'");
}

namespace {

char dir_char(Dir d) { return d == Dir::H ? 'H' : 'V'; }

std::string describe(const Shape& s) {
    std::ostringstream os;
    os << s.layer << " " << dir_char(s.dir) << " " << s.index << " " << s.start << " " << s.end;
    return os.str();
}

} // namespace

const LayerInfo* GridLayout::find_layer(const std::string& n) const {
    for (const auto& l : layers)
        if (l.name == n)
            return &l;
    return nullptr;
}

void GridLayout::validate() const {
    if (tracks < 1 || pitches < 1)
        throw ConstraintError("cell " + name + " needs positive tracks and pitches");
    if (active_fins < 0 || active_fins > total_fins)
        throw ConstraintError("cell " + name + " has more active fins than fins");
    if (active_poly < 0 || active_poly > total_poly)
        throw ConstraintError("cell " + name + " has more active gates than gates");
    if (active_poly > pitches)
        throw ConstraintError("cell " + name + " has more active gates than poly pitches");
    if (rails < 0 || rails > tracks)
        throw ConstraintError("cell " + name + " has more rail tracks than tracks");
    std::set<std::string> seen;
    for (const auto& l : layers)
        if (!seen.insert(l.name).second)
            throw ConstraintError("cell " + name + " declares layer " + l.name + " twice");
    for (const auto& s : shapes) {
        if (!find_layer(s.layer))
            throw ConstraintError("cell " + name + " shape on undeclared layer " + s.layer);
        const int idx_max = s.dir == Dir::H ? tracks : pitches;
        const int ext_max = s.dir == Dir::H ? pitches : tracks;
        if (s.index < 0 || s.index >= idx_max || s.start < 0 || s.end > ext_max || s.start >= s.end)
            throw ConstraintError("cell " + name + " shape " + describe(s) + " lies outside the cell");
    }
}

GridLayout parse_layout(const std::string& text, const std::string& origin) {
    GridLayout g;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    bool meta = false;
    auto to_int = [](const std::string& v, const std::string& where) {
        std::size_t pos = 0;
        int r = 0;
        try {
            r = std::stoi(v, &pos);
        } catch (const std::exception&) {
            throw ParseError(where, "bad integer '" + v + "'");
        }
        if (pos != v.size())
            throw ParseError(where, "bad integer '" + v + "'");
        return r;
    };
    while (std::getline(is, line)) {
        ++lineno;
        const std::string where = origin + ":" + std::to_string(lineno);
        if (auto h = line.find('#'); h != std::string::npos)
            line.erase(h);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string s; ls >> s;)
            tok.push_back(s);
        if (tok.empty())
            continue;
        if (tok[0] == "cell") {
            if (tok.size() != 2)
                throw ParseError(where, "expected 'cell <name>'");
            g.name = tok[1];
        } else if (tok[0] == "meta") {
            meta = true;
            for (std::size_t i = 1; i < tok.size(); ++i) {
                auto eq = tok[i].find('=');
                if (eq == std::string::npos)
                    throw ParseError(where, "expected key=value, got '" + tok[i] + "'");
                const auto k = tok[i].substr(0, eq), v = tok[i].substr(eq + 1);
                auto ratio = [&](int& a, int& t) {
                    auto sl = v.find('/');
                    if (sl == std::string::npos)
                        throw ParseError(where, k + " must be <active>/<total>");
                    a = to_int(v.substr(0, sl), where);
                    t = to_int(v.substr(sl + 1), where);
                };
                if (k == "tracks")
                    g.tracks = to_int(v, where);
                else if (k == "pitches")
                    g.pitches = to_int(v, where);
                else if (k == "fins")
                    ratio(g.active_fins, g.total_fins);
                else if (k == "poly")
                    ratio(g.active_poly, g.total_poly);
                else if (k == "rails")
                    g.rails = to_int(v, where);
                else
                    throw ParseError(where, "unknown meta key '" + k + "'");
            }
        } else if (tok[0] == "layer") {
            if (tok.size() != 3 && tok.size() != 4)
                throw ParseError(where, "expected 'layer <name> <class> [H|V]'");
            LayerInfo l{tok[1], Restriction::Compound2D, std::nullopt};
            try {
                l.cls = parse_restriction(tok[2]);
            } catch (const ParseError&) {
                throw ParseError(where, "unknown restriction class '" + tok[2] + "'");
            }
            if (tok.size() == 4) {
                if (tok[3] != "H" && tok[3] != "V")
                    throw ParseError(where, "direction must be H or V");
                l.dir = tok[3] == "H" ? Dir::H : Dir::V;
            }
            g.layers.push_back(l);
        } else if (tok[0] == "shape") {
            if (tok.size() != 6)
                throw ParseError(where, "expected 'shape <layer> <H|V> <index> <start> <end>'");
            if (tok[2] != "H" && tok[2] != "V")
                throw ParseError(where, "direction must be H or V");
            g.shapes.push_back({tok[1], tok[2] == "H" ? Dir::H : Dir::V, to_int(tok[3], where), to_int(tok[4], where),
                                to_int(tok[5], where)});
        } else {
            throw ParseError(where, "unknown record '" + tok[0] + "'");
        }
    }
    if (!meta)
        throw ParseError(origin, "missing meta line");
    try {
        g.validate();
    } catch (const ConstraintError& e) {
        throw ParseError(origin, e.what());
    }
    return g;
}

GridLayout load_layout(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    auto g = parse_layout(ss.str(), path);
    if (g.name.empty()) {
        auto slash = path.find_last_of('/');
        auto base = path.substr(slash == std::string::npos ? 0 : slash + 1);
        g.name = base.substr(0, base.find('.'));
    }
    return g;
}

std::string layout_to_text(const GridLayout& g) {
    std::ostringstream os;
    if (!g.name.empty())
        os << "cell " << g.name << "\n";
    os << "meta tracks=" << g.tracks << " pitches=" << g.pitches << " fins=" << g.active_fins << "/" << g.total_fins
       << " poly=" << g.active_poly << "/" << g.total_poly << " rails=" << g.rails << "\n";
    for (const auto& l : g.layers) {
        os << "layer " << l.name << " " << to_string(l.cls);
        if (l.dir)
            os << " " << dir_char(*l.dir);
        os << "\n";
    }
    for (const auto& s : g.shapes)
        os << "shape " << describe(s) << "\n";
    return os.str();
}

Fraction fin_efficiency(const GridLayout& g) {
    if (g.total_fins <= 0)
        throw ConstraintError("cell " + g.name + " has no fins");
    return {g.active_fins, g.total_fins};
}

Fraction transistor_efficiency(const GridLayout& g) {
    if (g.pitches <= 0)
        throw ConstraintError("cell " + g.name + " has zero width");
    return {g.active_poly, g.pitches};
}

Fraction power_rail_efficiency(const GridLayout& g) {
    if (g.tracks <= 0)
        throw ConstraintError("cell " + g.name + " has zero height");
    return {g.rails, g.tracks};
}

std::vector<std::string> check_restrictions(const GridLayout& g) {
    std::vector<std::string> v;
    for (const auto& l : g.layers) {
        if (l.cls == Restriction::Compound2D)
            continue; // integer grid coordinates are axis-aligned by construction
        std::optional<Dir> dir = l.dir;
        for (const auto& s : g.shapes)
            if (s.layer == l.name) {
                if (!dir)
                    dir = s.dir;
                if (s.dir != *dir)
                    v.push_back("layer " + l.name + ": shape " + describe(s) + " runs " + dir_char(s.dir) + " on a " +
                                dir_char(*dir) + "-only layer");
            }
        if (l.cls != Restriction::PureGrating1D)
            continue;
        if (!dir) {
            v.push_back("layer " + l.name + ": pure grating layer has no shapes");
            continue;
        }
        const int n = *dir == Dir::H ? g.tracks : g.pitches;
        const int ext = *dir == Dir::H ? g.pitches : g.tracks;
        for (int i = 0; i < n; ++i) {
            std::vector<std::pair<int, int>> segs;
            for (const auto& s : g.shapes)
                if (s.layer == l.name && s.dir == *dir && s.index == i)
                    segs.emplace_back(s.start, s.end);
            std::sort(segs.begin(), segs.end());
            int reach = 0;
            for (const auto& [a, b] : segs) {
                if (a > reach)
                    break;
                reach = std::max(reach, b);
            }
            if (reach < ext)
                v.push_back("layer " + l.name + ": grating line " + std::to_string(i) + " is not populated end to end");
        }
    }
    return v;
}

ConstructCount count_constructs(const GridLayout& g, const std::string& target_layer, int window_pitches,
                                const std::vector<std::string>& relevant_layers) {
    if (window_pitches < 1)
        throw ConstraintError("construct window must be at least one pitch");
    // Doubled coordinates keep shape centres on the integer grid.
    using Rect = std::array<int, 5>; // layer, x0, y0, x1, y1
    std::vector<Rect> rects;
    std::vector<Rect> targets;
    auto rect = [](const Shape& s, int layer) {
        if (s.dir == Dir::H)
            return Rect{layer, 2 * s.start, 2 * s.index, 2 * s.end, 2 * s.index + 2};
        return Rect{layer, 2 * s.index, 2 * s.start, 2 * s.index + 2, 2 * s.end};
    };
    for (const auto& s : g.shapes) {
        auto it = std::find(relevant_layers.begin(), relevant_layers.end(), s.layer);
        if (it != relevant_layers.end())
            rects.push_back(rect(s, static_cast<int>(it - relevant_layers.begin())));
        if (s.layer == target_layer)
            targets.push_back(rect(s, -1));
    }
    std::set<std::vector<Rect>> interior, boundary;
    const int w = window_pitches;
    for (const auto& t : targets) {
        const int cx = (t[1] + t[3]) / 2, cy = (t[2] + t[4]) / 2;
        // Centres sit on half-grid points; the window spans [c - w, c + w] doubled.
        const int wx0 = cx - w, wy0 = cy - w, wx1 = cx + w, wy1 = cy + w;
        std::vector<Rect> hood;
        for (const auto& r : rects) {
            const int x0 = std::max(r[1], wx0), y0 = std::max(r[2], wy0);
            const int x1 = std::min(r[3], wx1), y1 = std::min(r[4], wy1);
            if (x0 < x1 && y0 < y1)
                hood.push_back({r[0], x0 - wx0, y0 - wy0, x1 - wx0, y1 - wy0});
        }
        std::sort(hood.begin(), hood.end());
        const bool inside = wx0 >= 0 && wy0 >= 0 && wx1 <= 2 * g.pitches && wy1 <= 2 * g.tracks;
        (inside ? interior : boundary).insert(std::move(hood));
    }
    return {targets.size(), interior.size(), boundary.size()};
}

std::string leafcell_report(const std::vector<GridLayout>& cells) {
    std::string out = csv_row({"cell", "tracks", "fin_eff", "fin_eff_value", "transistor_eff", "transistor_eff_value",
                               "power_rail_eff", "power_rail_eff_value", "violations"});
    for (const auto& g : cells) {
        const auto rail = power_rail_efficiency(g), tr = transistor_efficiency(g);
        std::string fe = "n/a", fev = "n/a";
        if (g.total_fins > 0) {
            const auto f = fin_efficiency(g);
            fe = f.str();
            fev = format_number(f.value());
        }
        out += csv_row({g.name, std::to_string(g.tracks), fe, fev, tr.str(), format_number(tr.value()), rail.str(),
                        format_number(rail.value()), std::to_string(check_restrictions(g).size())});
    }
    return out;
}

} // namespace smemsynth
