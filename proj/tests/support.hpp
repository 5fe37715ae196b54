#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "model.hpp"

namespace testsup {

// The six-GLD / four-BLD instance used throughout the docs and configs,
// with the desk-scale system defaults.
inline dtfl::model::SystemParams instance_sys() {
    dtfl::model::SystemParams s;
    s.bandwidth_hz = 1e6;
    s.noise_coord_w = 1e-10;
    s.noise_eaves_w = 1e-10;
    s.local_iters = 2;
    s.cycles_per_bit = 100;
    s.switch_cap = 1e-28;
    s.model_size_bits = 3e6;
    s.coord_cpu_hz = 2e9;
    s.t_agg_coord_s = 1.0;
    s.t_up_coord_s = 1.0;
    s.t_main_coord_s = 0.01;
    return s;
}

inline std::vector<dtfl::model::GldProfile> instance_glds() {
    const double d[] = {30e6, 45e6, 40e6, 50e6, 55e6, 35e6};
    const double gc[] = {2.3e-8, 2.5e-8, 2.4e-8, 2.2e-8, 2.7e-8, 2.6e-8};
    const double ge[] = {1.6e-8, 1.3e-8, 1.7e-8, 1.4e-8, 1.2e-8, 1.5e-8};
    const double v[] = {1.0e9, 1.2e9, 1.4e9, 1.6e9, 1.8e9, 2.0e9};
    const double p[] = {1.9, 2.1, 1.8, 2.0, 2.2, 1.7};
    const double q[] = {1.1, 0.8, 0.9, 1.2, 0.7, 1.0};
    const double e[] = {3.8, 4.0, 3.4, 3.6, 3.8, 3.2};
    std::vector<dtfl::model::GldProfile> out(6);
    for (int i = 0; i < 6; ++i) {
        out[i].index = i + 1;
        out[i].data_bits = d[i];
        out[i].gain_coord = gc[i];
        out[i].gain_eaves = ge[i];
        out[i].cpu_max_hz = v[i];
        out[i].tx_power_max_w = p[i];
        out[i].jam_power_max_w = q[i];
        out[i].energy_max_j = e[i];
    }
    return out;
}

inline std::vector<dtfl::model::BldProfile> instance_blds() {
    const double d[] = {2.0e6, 3.5e6, 3.0e6, 2.5e6};
    const double hc[] = {1.0e-8, 0.8e-8, 1.1e-8, 0.9e-8};
    const double he[] = {0.95e-9, 0.85e-9, 1.15e-9, 1.05e-9};
    const double p[] = {1.6, 1.4, 1.3, 1.5};
    std::vector<dtfl::model::BldProfile> out(4);
    for (int j = 0; j < 4; ++j) {
        out[j].index = j + 1;
        out[j].data_bits = d[j];
        out[j].gain_coord = hc[j];
        out[j].gain_eaves = he[j];
        out[j].tx_power_w = p[j];
        out[j].noise_w = 1e-10;  // defaults to the coordinator noise
    }
    return out;
}

inline std::vector<double> median3(const std::vector<double>& xs) {
    std::vector<double> out = xs;
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
        double a = xs[i - 1], b = xs[i], c = xs[i + 1];
        out[i] = std::max(std::min(a, b), std::min(std::max(a, b), c));
    }
    return out;
}

// Sign changes of the first differences after 3-point median smoothing.
// Differences below a noise floor of 1e-3 of the curve's range are treated
// as zero: the inner solver stops at a finite multiplier tolerance, which
// leaves jitter well under that floor on flat stretches.
inline int smoothed_sign_changes(const std::vector<double>& curve) {
    if (curve.size() < 3) return 0;
    const std::vector<double> sm = median3(curve);
    const double lo = *std::min_element(sm.begin(), sm.end());
    const double hi = *std::max_element(sm.begin(), sm.end());
    const double floor = 1e-3 * (hi - lo);
    int changes = 0;
    int last = 0;
    for (std::size_t i = 0; i + 1 < sm.size(); ++i) {
        const double d = sm[i + 1] - sm[i];
        const int sign = std::fabs(d) <= floor ? 0 : (d > 0 ? 1 : -1);
        if (sign != 0) {
            if (last != 0 && sign != last) ++changes;
            last = sign;
        }
    }
    return changes;
}

}  // namespace testsup
