#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smemsynth/baplus.hpp"
#include "smemsynth/memory_config.hpp"
#include "smemsynth/tech.hpp"

namespace smemsynth {

enum class RectKind { Macro, PeriphRegion, PowerRail, Pin };

std::string to_string(RectKind k);

struct PlacedRect {
    std::string instance;
    RectKind kind = RectKind::Macro;
    std::int64_t x = 0, y = 0, w = 0, h = 0; // nm

    bool operator==(const PlacedRect&) const = default;
};

struct Floorplan {
    std::int64_t die_w = 0; // nm
    std::int64_t die_h = 0;
    std::vector<PlacedRect> placements;
    bool ar_miss = false;

    double aspect_ratio() const { return static_cast<double>(die_h) / static_cast<double>(die_w); }
    double area_um2() const { return static_cast<double>(die_w) * static_cast<double>(die_h) * 1e-6; }
    // Bounding box of all placements, as (w, h) from the origin.
    std::pair<std::int64_t, std::int64_t> bounding_box() const;
};

struct Dimensions {
    std::int64_t w = 0; // nm
    std::int64_t h = 0;

    bool operator==(const Dimensions&) const = default;
    double aspect_ratio() const { return static_cast<double>(h) / static_cast<double>(w); }
    double semiperimeter_um() const { return static_cast<double>(w + h) * 1e-3; }
};

// Die size of the realized floorplan:
//   w = C*(macro_w + gutter) + periph_w
//   h = R*(K*macro_h + bank_periph_h) + global_periph_h
// periph_w is the minimum strip, widened when logic_area_um2 does not fit
// (see realize).
Dimensions estimate_dimensions(const MemoryConfig& cfg, const BAPlusMacro& macro, const TechParams& tech,
                               double logic_area_um2 = 0.0);

struct FloorplanOptions {
    std::optional<double> ar_target; // height / width
    double ar_tol = 0.0;             // fraction of target
    bool transpose = false;          // swap the x and y axes
};

// Places the R x C bank grid (macros bottom-up inside each bank), a decoder
// strip on the left edge, a column-mux/output strip along the bottom, one
// driver strip above each bank, full-width power rails and edge pins.
// `logic_area_um2` is inflated by 1/utilization and widens the decoder strip
// when it does not fit in the minimum periphery.
Floorplan realize(const MemoryConfig& cfg, const BAPlusMacro& macro, const TechParams& tech,
                  double logic_area_um2 = 0.0, const FloorplanOptions& opts = {});

// Instance name used for array k of bank (r, c); matches the netlist.
std::string macro_instance_name(int r, int c, int k);

// Geometric checks: non-overlap of macro/periphery rectangles, containment,
// and that every array of `cfg` is placed exactly once.
std::vector<std::string> check_floorplan(const Floorplan& fp, const MemoryConfig& cfg);

std::string floorplan_to_text(const Floorplan& fp);
std::string floorplan_to_csv(const Floorplan& fp);

} // namespace smemsynth
