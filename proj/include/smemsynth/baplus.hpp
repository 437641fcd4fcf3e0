#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smemsynth/tech.hpp"

namespace smemsynth {

struct Pin {
    std::string name;
    std::string side; // "N", "S", "E" or "W"
    std::int64_t offset = 0;

    bool operator==(const Pin&) const = default;
};

// A characterized B x W augmented bitcell array: B entries of W bits with
// clocked wordline drivers, local sense and a tri-state output driver.
struct BAPlusMacro {
    std::string name;
    int B = 0; // bitcells per bitline (entries)
    int W = 0; // bitcells per wordline (bits)
    std::int64_t height_tracks = 0; // bitcell rows, including periphery rows
    std::int64_t width_pitches = 0; // poly pitches
    double t_access = 0; // ps
    double e_read = 0;   // fJ per access
    double e_write = 0;  // fJ per access
    double p_leak = 0;   // nW
    std::vector<Pin> pins;

    std::int64_t bits() const { return std::int64_t{B} * W; }
    std::int64_t height_nm(const TechParams& tech) const { return height_tracks * tech.row_pitch_nm(); }
    std::int64_t width_nm(const TechParams& tech) const { return width_pitches * tech.poly_pitch_nm; }
    double area_um2(const TechParams& tech) const {
        return static_cast<double>(height_nm(tech)) * static_cast<double>(width_nm(tech)) * 1e-6;
    }

    bool operator==(const BAPlusMacro&) const = default;
};

// Fixed periphery around every generated array.
inline constexpr std::int64_t kPeriphRows = 6;
inline constexpr std::int64_t kPeriphPitches = 4;

struct VariantBounds {
    int min_b = 8;
    int max_b = 64;
    int min_w = 8;
    int max_w = 64;
};

std::string variant_name(int B, int W);

// Deterministic analytic model of a B x W array. Throws BoundsError naming
// the dimension ("B" or "W") that is not a power of two within bounds.
BAPlusMacro generate_variant(int B, int W, const TechParams& tech, const VariantBounds& bounds = {});

// Throws ConstraintError when a macro breaks its invariants.
void validate_macro(const BAPlusMacro& m);

// The library is immutable once built; lookups are by variant name.
class Library {
  public:
    Library() = default;
    Library(TechParams tech, std::vector<BAPlusMacro> macros);

    const TechParams& tech() const { return tech_; }
    const std::vector<BAPlusMacro>& macros() const { return macros_; }
    bool empty() const { return macros_.empty(); }

    // Throws LookupError for an unknown name.
    const BAPlusMacro& at(const std::string& name) const;
    const BAPlusMacro* find(const std::string& name) const;

    bool operator==(const Library&) const = default;

  private:
    TechParams tech_;
    std::vector<BAPlusMacro> macros_; // sorted by name
};

// All (B, W) combinations of the given power-of-two values.
Library generate_library(const std::vector<int>& b_values, const std::vector<int>& w_values,
                         const TechParams& tech, const VariantBounds& bounds = {});

// The shipped default: B, W in {8, 16, 32, 64}.
Library default_library(const TechParams& tech = {});

std::string library_to_string(const Library& lib);
Library library_from_string(const std::string& text, const std::string& origin = "<string>");

void save_library(const Library& lib, const std::string& path);
Library load_library(const std::string& path);

} // namespace smemsynth
