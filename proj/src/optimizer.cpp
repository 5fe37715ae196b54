#include "optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "util.hpp"

namespace dtfl::opt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cube_term(const GldProfile& g, const SystemParams& sys) {
    const double d = sys.local_iters * sys.cycles_per_bit * g.data_bits;
    return sys.switch_cap * d * d * d;
}

// E_i^loc expressed through the latency bound y (CPU rate at its Eq.-17 value)
double local_energy_at_y(const GldProfile& g, double y, const SystemParams& sys) {
    return cube_term(g, sys) / (y * y);
}

std::vector<double> saturated_caps(std::span<const GldProfile> glds) {
    std::vector<double> q(glds.size());
    for (std::size_t i = 0; i < glds.size(); ++i) q[i] = glds[i].jam_power_max_w;
    return q;
}

}  // namespace

double solve_sub_y(std::span<const GldProfile> glds, std::span<const double> lambdas,
                   const SystemParams& sys) {
    double s = 0.0;
    for (std::size_t i = 0; i < glds.size(); ++i) s += lambdas[i] * cube_term(glds[i], sys);
    const double unconstrained = std::cbrt(2.0 * s);
    return std::max(unconstrained, model::y_lower_bound(glds, sys));
}

double sub_t_derivative(std::span<const GldProfile> glds, std::span<const double> lambdas,
                        double t, const SystemParams& sys) {
    const double u = sys.model_size_bits / (sys.bandwidth_hz * t);
    double v = 1.0;
    for (std::size_t i = 0; i < glds.size(); ++i) {
        if (lambdas[i] == 0.0) continue;
        const double k = static_cast<double>(glds[i].index - 1);
        const double p2u = std::exp2(u);
        const double a = lambdas[i] * sys.noise_coord_w / glds[i].gain_coord * std::exp2(k * u);
        v += a * ((p2u - 1.0) - (p2u * u + (p2u - 1.0) * k * u) * M_LN2);
    }
    return v;
}

double solve_sub_t(std::span<const GldProfile> glds, std::span<const double> lambdas,
                   const SystemParams& sys, const SolverConfig& cfg) {
    const double t_lb = model::t_up_g_lower_bound(glds, sys);
    if (t_lb == 0.0) return 0.0;  // nothing to send
    if (sub_t_derivative(glds, lambdas, t_lb, sys) >= 0.0) return t_lb;
    double hi = t_lb;
    int doublings = 0;
    while (sub_t_derivative(glds, lambdas, hi, sys) <= 0.0) {
        hi *= 2.0;
        if (++doublings > cfg.bisection_max_iters)
            throw ConvergenceError("solve_sub_t: no sign change while bracketing", hi);
    }
    double lo = hi * 0.5;
    if (lo < t_lb) lo = t_lb;
    for (int it = 0; it < cfg.bisection_max_iters && hi - lo > cfg.bisection_tol_s; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sub_t_derivative(glds, lambdas, mid, sys) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> solve_sub_q(std::span<const GldProfile> glds,
                                std::span<const double> lambdas, double t_up_b,
                                double q_agg_w) {
    const double q_ub = model::q_upper_bound(glds);
    if (q_agg_w > q_ub * (1.0 + 1e-12))
        throw InfeasibleError("solve_sub_q: requested aggregate jamming " + fmt9(q_agg_w) +
                              " exceeds the cap " + fmt9(q_ub));
    const std::size_t m = glds.size();
    // map(i): descending lambda_i*t_up_b/g_iE, ties by ascending device index
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> ratio(m);
    for (std::size_t i = 0; i < m; ++i) ratio[i] = lambdas[i] * t_up_b / glds[i].gain_eaves;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (ratio[a] != ratio[b]) return ratio[a] > ratio[b];
        return glds[a].index < glds[b].index;
    });

    std::vector<double> q(m, 0.0);
    double rem = q_agg_w;
    for (std::size_t k = m; k-- > 0;) {
        const std::size_t i = order[k];
        const double cap_contrib = glds[i].jam_power_max_w * glds[i].gain_eaves;
        if (rem <= cap_contrib) {
            q[i] = rem / glds[i].gain_eaves;
            return q;
        }
        q[i] = glds[i].jam_power_max_w;
        rem -= cap_contrib;
    }
    // only reachable through fp cancellation right at the cap
    return q;
}

DualState dual_update(const DualState& state, std::span<const GldProfile> glds, double y,
                      double t_up_g, std::span<const double> jam, double t_up_b,
                      const SystemParams& sys) {
    DualState out = state;
    out.iteration = state.iteration + 1;
    const double step = state.alpha0 / std::sqrt(static_cast<double>(out.iteration));
    for (std::size_t i = 0; i < glds.size(); ++i) {
        const double used = local_energy_at_y(glds[i], y, sys) +
                            model::upload_energy(glds[i], t_up_g, sys) +
                            model::jamming_energy(jam[i], t_up_b);
        const double g = used - glds[i].energy_max_j;
        out.lambdas[i] = std::max(0.0, state.lambdas[i] + step * g);
    }
    return out;
}

namespace {

struct DualLoopResult {
    Solution best;
    bool have_best = false;
    DualState dual;
    double residual = kInf;
    int iterations = 0;
    bool converged = false;
};

// Shared core of solve_pgld and dual_trace. `saturate` swaps the Sub-Q walk
// for the all-caps allocation (Q at or beyond the cap); `fixed_iters` > 0
// disables the early stop.
DualLoopResult run_dual_loop(std::span<const GldProfile> glds, double t_hat_b,
                             double q_agg_w, const SystemParams& sys,
                             const SolverConfig& cfg, bool saturate, int fixed_iters,
                             const DualTraceSink& trace) {
    DualLoopResult r;
    r.dual.lambdas.assign(glds.size(), 0.0);
    double e_cap = 0.0;
    for (const auto& g : glds) e_cap = std::max(e_cap, g.energy_max_j);
    r.dual.alpha0 = 1.0 / e_cap;

    const int total = fixed_iters > 0 ? fixed_iters : cfg.max_dual_iters;
    for (int n = 1; n <= total; ++n) {
        const double y = solve_sub_y(glds, r.dual.lambdas, sys);
        const double t = solve_sub_t(glds, r.dual.lambdas, sys, cfg);
        const std::vector<double> q = saturate
                                          ? saturated_caps(glds)
                                          : solve_sub_q(glds, r.dual.lambdas, t_hat_b, q_agg_w);

        bool feasible = true;
        for (std::size_t i = 0; i < glds.size() && feasible; ++i) {
            const double used = local_energy_at_y(glds[i], y, sys) +
                                model::upload_energy(glds[i], t, sys) + q[i] * t_hat_b;
            feasible = used <= glds[i].energy_max_j * (1.0 + 1e-9);
        }
        if (feasible && (!r.have_best || y + t < r.best.y + r.best.t_up_g)) {
            r.best.y = y;
            r.best.t_up_g = t;
            r.best.jam_w = q;
            r.have_best = true;
        }

        const DualState prev = r.dual;
        r.dual = dual_update(prev, glds, y, t, q, t_hat_b, sys);
        r.residual = 0.0;
        for (std::size_t i = 0; i < glds.size(); ++i)
            r.residual = std::max(r.residual, std::abs(r.dual.lambdas[i] - prev.lambdas[i]));
        r.iterations = n;
        if (trace) trace({n, r.residual, r.dual.lambdas});
        if (fixed_iters <= 0 && r.residual < cfg.dual_tol) {
            r.converged = true;
            break;
        }
    }
    if (fixed_iters > 0) r.converged = true;
    return r;
}

}  // namespace

PgldResult solve_pgld(std::span<const GldProfile> glds, std::span<const BldProfile> blds,
                      double q_agg_w, const SystemParams& sys, const SolverConfig& cfg,
                      const DualTraceSink& trace) {
    if (glds.empty()) throw ConfigError("solve_pgld: empty GLD set");
    if (!(q_agg_w > std::max(model::q_lower_bound(blds, sys), 0.0)))
        throw InfeasibleError("solve_pgld: Q=" + fmt9(q_agg_w) +
                              " is not above the secrecy lower bound");
    const double q_ub = model::q_upper_bound(glds);
    if (q_agg_w > q_ub * (1.0 + 1e-12))
        throw InfeasibleError("solve_pgld: Q=" + fmt9(q_agg_w) + " exceeds the jamming cap " +
                              fmt9(q_ub));

    const double t_hat_b = model::min_bld_upload_time(blds, q_agg_w, sys);

    // certificate: even with unbounded (y, t) the upload energy never drops
    // below n_C*L*ln2/(g*W), so the affordable aggregate jamming is capped
    double jam_sup = 0.0;
    for (const auto& g : glds) {
        const double floor =
            sys.noise_coord_w * sys.model_size_bits * M_LN2 / (g.gain_coord * sys.bandwidth_hz);
        const double headroom = std::max(0.0, g.energy_max_j - floor);
        jam_sup += g.gain_eaves * std::min(g.jam_power_max_w, headroom / t_hat_b);
    }
    if (jam_sup < q_agg_w)
        throw InfeasibleError("solve_pgld: no energy-feasible point at Q=" + fmt9(q_agg_w) +
                              " (affordable aggregate jamming tops out at " + fmt9(jam_sup) +
                              ")");

    DualLoopResult r =
        run_dual_loop(glds, t_hat_b, q_agg_w, sys, cfg, /*saturate=*/false, 0, trace);
    if (r.converged && !r.have_best)
        throw InfeasibleError("solve_pgld: no energy-feasible iterate at Q=" + fmt9(q_agg_w));
    if (!r.converged)
        throw ConvergenceError("solve_pgld: dual residual " + fmt9(r.residual) + " after " +
                                   std::to_string(r.iterations) + " iterations",
                               r.residual);

    PgldResult out;
    out.dual = r.dual;
    out.iterations = r.iterations;
    out.residual = r.residual;

    Solution& s = out.solution;
    s = r.best;
    s.y *= cfg.debug_y_scale;
    s.t_up_b = t_hat_b;
    s.q_agg_w = 0.0;
    for (std::size_t i = 0; i < glds.size(); ++i) s.q_agg_w += s.jam_w[i] * glds[i].gain_eaves;
    s.cpu_hz.resize(glds.size());
    s.tx_power_w.resize(glds.size());
    for (std::size_t i = 0; i < glds.size(); ++i) {
        s.cpu_hz[i] = sys.local_iters * sys.cycles_per_bit * glds[i].data_bits / s.y;
        s.tx_power_w[i] = model::noma_power(glds[i], s.t_up_g, sys);
    }
    s.t_gld = s.y + s.t_up_g;
    s.t_bld = s.t_up_b + model::dt_training_latency(blds, sys);
    s.t_total = model::total_delay(s.t_gld, s.t_bld, sys);
    out.objective = s.y + s.t_up_g + sys.t_agg_coord_s + sys.t_up_coord_s;
    return out;
}

std::vector<DualTracePoint> dual_trace(std::span<const GldProfile> glds,
                                       std::span<const BldProfile> blds, double q_agg_w,
                                       const SystemParams& sys, const SolverConfig& cfg,
                                       int iters) {
    if (iters < 1) throw ConfigError("dual_trace: iteration count must be >= 1");
    const double t_hat_b = model::min_bld_upload_time(blds, q_agg_w, sys);
    const bool saturate = q_agg_w >= model::q_upper_bound(glds);
    std::vector<DualTracePoint> points;
    points.reserve(static_cast<std::size_t>(iters));
    run_dual_loop(glds, t_hat_b, q_agg_w, sys, cfg, saturate, iters,
                  [&points](const DualTracePoint& p) { points.push_back(p); });
    return points;
}

SolveResult solve_p(std::span<const GldProfile> glds, std::span<const BldProfile> blds,
                    const SystemParams& sys, const SolverConfig& cfg) {
    if (glds.empty() || blds.empty())
        throw ConfigError("solve_p: needs at least one GLD and one BLD");
    const double q_lb = std::max(model::q_lower_bound(blds, sys), 0.0);
    const double q_ub = model::q_upper_bound(glds);
    if (!(q_ub > q_lb))
        throw InfeasibleError("solve_p: empty jamming search interval");
    const double step = cfg.q_step_w > 0 ? cfg.q_step_w : (q_ub - q_lb) / 200.0;

    SolveResult out;
    out.q_step_w = step;
    const double t_loc_b = model::dt_training_latency(blds, sys);
    bool any = false;
    for (int k = 1;; ++k) {
        const double q = q_lb + step * k;
        if (q > q_ub * (1.0 + 1e-12)) break;
        SweepRow row;
        row.q_agg_w = q;
        try {
            PgldResult r = solve_pgld(glds, blds, q, sys, cfg);
            row.t_hat_b = r.solution.t_up_b;
            row.t_gld = r.solution.t_gld;
            row.t_bld = r.solution.t_bld;
            row.t_total = r.solution.t_total;
            row.feasible = true;
            if (!any || row.t_total < out.best.t_total) {
                out.best = r.solution;
                out.best_index = out.sweep.size();
                any = true;
            }
        } catch (const InfeasibleError&) {
            row.t_hat_b = [&] {
                try {
                    return model::min_bld_upload_time(blds, q, sys);
                } catch (const InfeasibleError&) {
                    return kInf;
                }
            }();
            row.t_bld = row.t_hat_b + t_loc_b;
            row.t_gld = kInf;
            row.t_total = kInf;
        } catch (const ConvergenceError&) {
            row.t_hat_b = model::min_bld_upload_time(blds, q, sys);
            row.t_bld = row.t_hat_b + t_loc_b;
            row.t_gld = kInf;
            row.t_total = kInf;
        }
        out.sweep.push_back(row);
    }
    if (!any)
        throw InfeasibleError("solve_p: every grid point in (" + fmt9(q_lb) + ", " +
                              fmt9(q_ub) + "] is infeasible");
    return out;
}

}  // namespace dtfl::opt
