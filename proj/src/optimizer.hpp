#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "model.hpp"

namespace dtfl::opt {

using model::BldProfile;
using model::GldProfile;
using model::Solution;
using model::SystemParams;

// Lagrange multipliers for the per-GLD energy constraints plus the
// diminishing-step schedule alpha_n = alpha0 / sqrt(n).
struct DualState {
    std::vector<double> lambdas;
    double alpha0 = 1.0;
    int iteration = 0;  // completed updates; the next update uses n = iteration + 1
};

struct SolverConfig {
    // Outer linear-search step over the aggregate jamming power. Zero or
    // negative means "auto": (q_ub - max(q_lb, 0)) / 200.
    double q_step_w = 0.0;
    double dual_tol = 1e-4;        // stop when max_i |lambda_i - prev| falls below
    int max_dual_iters = 5000;
    double bisection_tol_s = 1e-9;
    int bisection_max_iters = 200;
    // Fault-injection hook for the verification suite: scales the returned y.
    double debug_y_scale = 1.0;
};

// y* = max((2 sum_i lambda_i kappa (eta iota D_i)^3)^(1/3), y_lower_bound)
double solve_sub_y(std::span<const GldProfile> glds, std::span<const double> lambdas,
                   const SystemParams& sys);

// Derivative of the upload-time objective t + sum_i lambda_i E_i^up(t).
double sub_t_derivative(std::span<const GldProfile> glds, std::span<const double> lambdas,
                        double t, const SystemParams& sys);

// t* = max(t_lower_bound, root of sub_t_derivative), root found by doubling
// then bisection. Throws ConvergenceError when no bracket is found.
double solve_sub_t(std::span<const GldProfile> glds, std::span<const double> lambdas,
                   const SystemParams& sys, const SolverConfig& cfg);

/// Jamming allocation for a fixed aggregate target. GLDs are ranked by
/// lambda_i * t_up_b / g_iE (descending, ties by ascending index) and loaded
/// with their caps from the cheap end; exactly one pivot gets the fractional
/// remainder, everything ranked above it gets zero.
std::vector<double> solve_sub_q(std::span<const GldProfile> glds,
                                std::span<const double> lambdas, double t_up_b,
                                double q_agg_w);

// One projected subgradient step on the energy constraints.
DualState dual_update(const DualState& state, std::span<const GldProfile> glds, double y,
                      double t_up_g, std::span<const double> jam, double t_up_b,
                      const SystemParams& sys);

struct PgldResult {
    Solution solution;      // best energy-feasible iterate
    DualState dual;
    double objective = 0;   // y + t_up_g + t_agg_coord + t_up_coord
    int iterations = 0;
    double residual = 0;    // last max_i |delta lambda_i|
};

// Per-iteration record for convergence diagnostics and trace output.
struct DualTracePoint {
    int iteration;
    double residual;
    std::vector<double> lambdas;
};
using DualTraceSink = std::function<void(const DualTracePoint&)>;

// Inner solver for a fixed aggregate jamming power: alternate the three
// subproblems with subgradient updates on the multipliers until the
// multipliers settle. Throws InfeasibleError when Q is outside the feasible
// interval or no energy-feasible iterate is ever produced, ConvergenceError
// when the multipliers fail to settle within the iteration cap.
PgldResult solve_pgld(std::span<const GldProfile> glds, std::span<const BldProfile> blds,
                      double q_agg_w, const SystemParams& sys, const SolverConfig& cfg,
                      const DualTraceSink& trace = nullptr);

// Runs the dual iteration for exactly `iters` steps with no early stop,
// recording every step. For Q at or above the jamming cap the allocation
// saturates at the per-GLD caps (the mu -> inf limit of the Sub-Q relaxation),
// which mirrors how convergence sweeps are plotted for out-of-range Q.
std::vector<DualTracePoint> dual_trace(std::span<const GldProfile> glds,
                                       std::span<const BldProfile> blds, double q_agg_w,
                                       const SystemParams& sys, const SolverConfig& cfg,
                                       int iters);

struct SweepRow {
    double q_agg_w = 0;
    double t_hat_b = 0;
    double t_gld = 0;     // y + t_up_g at this grid point
    double t_bld = 0;
    double t_total = 0;   // +inf when this grid point is infeasible
    bool feasible = false;
};

struct SolveResult {
    Solution best;
    std::vector<SweepRow> sweep;
    std::size_t best_index = 0;
    double q_step_w = 0;
};

// Outer linear search over the aggregate jamming power (the full algorithm).
// Throws InfeasibleError when every grid point is infeasible.
SolveResult solve_p(std::span<const GldProfile> glds, std::span<const BldProfile> blds,
                    const SystemParams& sys, const SolverConfig& cfg);

}  // namespace dtfl::opt
