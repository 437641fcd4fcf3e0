#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace smemsynth {

// Unreduced ratio so reports read "13/25" rather than a float.
struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
    bool operator==(const Fraction&) const = default;
};

enum class Restriction { PureGrating1D, Structured1D, Compound2D };
std::string to_string(Restriction r);
Restriction parse_restriction(const std::string& s);

enum class Dir { H, V };

struct LayerInfo {
    std::string name;
    Restriction cls = Restriction::Compound2D;
    std::optional<Dir> dir; // preferred direction; the first shape's when unset
};

// H shapes run along track `index` over pitches [start, end); V shapes run
// along pitch `index` over tracks [start, end).
struct Shape {
    std::string layer;
    Dir dir = Dir::H;
    int index = 0;
    int start = 0, end = 0;

    bool operator==(const Shape&) const = default;
};

struct GridLayout {
    std::string name;
    int tracks = 0;  // cell height
    int pitches = 0; // cell width in poly pitches
    int active_fins = 0, total_fins = 0;
    int active_poly = 0, total_poly = 0;
    int rails = 0;
    std::vector<LayerInfo> layers;
    std::vector<Shape> shapes;

    const LayerInfo* find_layer(const std::string& n) const;
    // Throws ConstraintError on shapes outside the cell, undeclared layers
    // or inconsistent counts.
    void validate() const;
};

// Layout text:
//   cell <name>
//   meta tracks=<n> pitches=<n> fins=<a>/<t> poly=<a>/<t> rails=<n>
//   layer <name> <pure_grating_1d|structured_1d|compound_2d> [H|V]
//   shape <layer> <H|V> <index> <start> <end>
GridLayout parse_layout(const std::string& text, const std::string& origin = "<string>");
GridLayout load_layout(const std::string& path);
std::string layout_to_text(const GridLayout& g);

// Throws ConstraintError when the layout has no fins.
Fraction fin_efficiency(const GridLayout& g);
// Active gates over cell width, both in poly pitches.
Fraction transistor_efficiency(const GridLayout& g);
Fraction power_rail_efficiency(const GridLayout& g);

// One message per violation, naming the layer and shape.
std::vector<std::string> check_restrictions(const GridLayout& g);

struct ConstructCount {
    std::size_t targets = 0;
    std::size_t interior = 0; // unique neighborhoods fully inside the cell
    std::size_t boundary = 0; // unique neighborhoods whose window leaves the cell

    std::size_t unique() const { return interior + boundary; }
    bool operator==(const ConstructCount&) const = default;
};

// Neighborhood of a shape: the relevant layers clipped to a square window of
// window_pitches grid units centred on the shape, translated to the window
// origin. No rotation or mirror equivalence.
ConstructCount count_constructs(const GridLayout& g, const std::string& target_layer, int window_pitches,
                                const std::vector<std::string>& relevant_layers);

// Metrics table for several cells, one row per cell.
std::string leafcell_report(const std::vector<GridLayout>& cells);

} // namespace smemsynth
