#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "model.hpp"

namespace dtfl::oracle {

using model::BldProfile;
using model::GldProfile;
using model::SystemParams;

// Exhaustive-search grid over (y, t_up_g). Ranges start at the analytic
// lower bounds; upper ends default to 20x the lower bounds and are widened
// automatically when the minimum lands on the upper edge.
struct GridSpec {
    int y_points = 400;
    int t_points = 400;
    double y_lo = 0, y_hi = 0;  // zero hi means "derive from factor"
    double t_lo = 0, t_hi = 0;
    double range_factor = 20.0;
};

struct OracleResult {
    bool feasible = false;
    double objective = 0;  // y + t + t_agg_coord + t_up_coord
    double y = 0;
    double t_up_g = 0;
    int widenings = 0;
};

// Brute-force reference for the inner problem. A grid point (y, t) is
// feasible iff every GLD can afford some jamming level (cap >= 0) and the
// affordable aggregate covers Q; that collapses the jamming dimension to a
// closed-form test, so only (y, t) is scanned.
OracleResult grid_oracle_pgld(std::span<const GldProfile> glds,
                              std::span<const BldProfile> blds, double q_agg_w,
                              const SystemParams& sys, GridSpec grid);

struct ConvexityReport {
    int points = 0;
    double min_second_difference = 0;
    bool all_positive = false;
    bool degenerate = false;  // L == 0, identically zero curve
    double worst_t = 0;
};

// Second divided differences of f(t) = noma_power(t) * t on a log-spaced
// grid; positivity across the probe range backs the convexity of the
// upload-energy term.
ConvexityReport convexity_probe(const GldProfile& gld, const SystemParams& sys,
                                double t_lo, double t_hi, int points = 200);

struct PivotCounterexample {
    std::string instance_json;  // offending instance, serialized verbatim
    int feasible_pivots = 0;
};

struct PivotReport {
    int trials = 0;
    int skipped_duplicate_ratios = 0;
    std::vector<PivotCounterexample> counterexamples;
    bool passed() const { return counterexamples.empty(); }
};

// Random Sub-Q instances (2..8 GLDs); enumerates every pivot position and
// checks that exactly one satisfies the fractional-assignment bracketing.
PivotReport pivot_uniqueness_probe(std::uint64_t seed, int trials);

}  // namespace dtfl::oracle
