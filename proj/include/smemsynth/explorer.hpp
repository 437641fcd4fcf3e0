#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smemsynth/baplus.hpp"
#include "smemsynth/memory_config.hpp"
#include "smemsynth/tech.hpp"

namespace smemsynth {

struct UserSpec {
    std::int64_t words = 0;
    std::int64_t bits = 0;
    std::optional<double> aspect_ratio_target; // height / width; unset = unconstrained
    double aspect_ratio_tol = 0.0;             // fraction of the target, in [0, 1)
    std::optional<double> t_max;               // ps
    std::optional<double> e_max;               // fJ per op

    // Throws ConstraintError on an invalid spec.
    void validate() const;
};

UserSpec spec_from_json(const nlohmann::json& j, const std::string& where = "spec");
UserSpec load_spec(const std::string& path);

struct PPAEstimate {
    double area_um2 = 0;
    double t_cycle_ps = 0;
    double e_op_fj = 0;
    double p_leak_nw = 0;
    double gops_per_watt = 0;

    bool operator==(const PPAEstimate&) const = default;
};

// GOPS/W at full utilization: 1e-9 / (E_op + P_leak * t_cycle), SI units.
double gops_per_watt(double e_op_fj, double p_leak_nw, double t_cycle_ps);

// Shared periphery terms of the composition model.
double decode_delay(const TechParams& tech, int global_bits);  // d0 + d1*bits
double decode_energy(const TechParams& tech, int address_bits); // e_dec0 + e_dec1*bits
double decoder_area(const TechParams& tech, int bits);          // 0 when bits == 0
double bitline_delay(const TechParams& tech, int drivers);      // 0 for a single driver
double column_mux_delay(const TechParams& tech, int ways);      // 0 when bypassed

// Upper limits on R, C, K, M; zero means "words".
struct EnumBounds {
    int max_R = 0, max_C = 0, max_K = 0, max_M = 0;
};

// Every config meeting the capacity constraints (and the aspect-ratio window
// when the spec sets one), sorted by (variant, R, C, K, M).
std::vector<MemoryConfig> enumerate_configs(const UserSpec& spec, const Library& lib, const EnumBounds& bounds = {});

// Throws LookupError for an unknown variant, ConstraintError for an invalid cfg.
PPAEstimate evaluate_ppa(const MemoryConfig& cfg, const Library& lib, const TechParams& tech);
inline PPAEstimate evaluate_ppa(const MemoryConfig& cfg, const Library& lib) {
    return evaluate_ppa(cfg, lib, lib.tech());
}

// Area of the standard-cell logic (decoders, muxes) that the floorplanner
// places in the periphery strips.
double logic_area(const MemoryConfig& cfg, const Library& lib, const TechParams& tech);

struct Candidate {
    MemoryConfig cfg;
    PPAEstimate ppa;

    bool operator==(const Candidate&) const = default;
};

std::vector<Candidate> evaluate_all(const std::vector<MemoryConfig>& cfgs, const Library& lib, const TechParams& tech);

// a dominates b under (area, t_cycle, e_op), all minimized.
bool dominates(const PPAEstimate& a, const PPAEstimate& b);

// Non-dominated subset, sorted by (area, t_cycle, e_op, cfg).
std::vector<Candidate> pareto_front(const std::vector<Candidate>& points);

struct Selection {
    Candidate choice;
    bool feasible = true;   // false: no point met t_max/e_max
    double violation = 0.0; // max over set limits of value/limit - 1
};

// Minimum area among points meeting t_max and e_max (ties: t_cycle, then
// config); otherwise the least-violating point, flagged infeasible.
Selection select_best(const std::vector<Candidate>& front, const UserSpec& spec);

// Constraint violation of one estimate under a spec (<= 0 when feasible).
double violation(const PPAEstimate& ppa, const UserSpec& spec);

// Monolithic compiled-SRAM baseline at the same capacity: one array of
// words/Mt rows, full-height bitlines, patterning-restricted periphery.
PPAEstimate traditional_ppa(std::int64_t words, std::int64_t bits, const TechParams& tech);

// CSV with header
// variant,R,C,K,M,area_um2,t_cycle_ps,e_op_fj,p_leak_nw,gops_per_watt,pareto
std::string explore_csv(const std::vector<Candidate>& all, const std::vector<Candidate>& front);
// Whitespace columns for gnuplot: area gops pareto t_cycle e_op.
std::string explore_plot_data(const std::vector<Candidate>& all, const std::vector<Candidate>& front);

nlohmann::ordered_json config_to_json(const MemoryConfig& cfg);
MemoryConfig config_from_json(const nlohmann::json& j, const std::string& where = "config");

} // namespace smemsynth
