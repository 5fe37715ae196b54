#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "util.hpp"

namespace dtfl::model {

void SystemParams::validate() const {
    const struct { double v; const char* name; } fields[] = {
        {bandwidth_hz, "bandwidth_hz"},   {noise_coord_w, "noise_coord_w"},
        {noise_eaves_w, "noise_eaves_w"}, {local_iters, "local_iters"},
        {cycles_per_bit, "cycles_per_bit"}, {switch_cap, "switch_cap"},
        {model_size_bits, "model_size_bits"}, {coord_cpu_hz, "coord_cpu_hz"},
        {t_agg_coord_s, "t_agg_coord_s"}, {t_up_coord_s, "t_up_coord_s"},
        {t_main_coord_s, "t_main_coord_s"},
    };
    for (const auto& f : fields) {
        if (!(f.v > 0) || !std::isfinite(f.v))
            throw ConfigError(std::string("system.") + f.name + " must be strictly positive");
    }
}

double local_training_latency(const GldProfile& gld, double cpu_rate_hz,
                              const SystemParams& sys) {
    if (!(cpu_rate_hz > 0))
        throw std::domain_error("local_training_latency: cpu rate must be > 0");
    return sys.local_iters * sys.cycles_per_bit * gld.data_bits / cpu_rate_hz;
}

double local_training_energy(const GldProfile& gld, double cpu_rate_hz,
                             const SystemParams& sys) {
    if (!(cpu_rate_hz > 0))
        throw std::domain_error("local_training_energy: cpu rate must be > 0");
    return sys.switch_cap * sys.local_iters * sys.cycles_per_bit * gld.data_bits *
           cpu_rate_hz * cpu_rate_hz;
}

double dt_training_latency(std::span<const BldProfile> blds, const SystemParams& sys) {
    double bits = 0;
    for (const auto& b : blds) bits += b.data_bits;
    return sys.local_iters * sys.cycles_per_bit * bits / sys.coord_cpu_hz;
}

double noma_power(const GldProfile& gld, double t_up_g, const SystemParams& sys) {
    if (!(t_up_g > 0))
        throw std::domain_error("noma_power: upload duration must be > 0");
    if (sys.model_size_bits == 0) return 0.0;
    const double u = sys.model_size_bits / (sys.bandwidth_hz * t_up_g);
    // overflow to inf is fine for bound searches; exp2 saturates gracefully
    return sys.noise_coord_w / gld.gain_coord * (std::exp2(u) - 1.0) *
           std::exp2(static_cast<double>(gld.index - 1) * u);
}

double upload_energy(const GldProfile& gld, double t_up_g, const SystemParams& sys) {
    return noma_power(gld, t_up_g, sys) * t_up_g;
}

double secrecy_rate(const BldProfile& bld, double q_agg_w, const SystemParams& sys) {
    const double legit = std::log2(1.0 + bld.tx_power_w * bld.gain_coord / bld.noise_w);
    const double eaves =
        std::log2(1.0 + bld.tx_power_w * bld.gain_eaves / (sys.noise_eaves_w + q_agg_w));
    return sys.bandwidth_hz * std::max(0.0, legit - eaves);
}

double jamming_energy(double jam_w, double t_up_b) {
    return jam_w * t_up_b;
}

double q_lower_bound(std::span<const BldProfile> blds, const SystemParams& sys) {
    double worst = 0.0;
    for (const auto& b : blds)
        worst = std::max(worst, b.noise_w * b.gain_eaves / b.gain_coord);
    return worst - sys.noise_eaves_w;
}

double q_upper_bound(std::span<const GldProfile> glds) {
    double sum = 0.0;
    for (const auto& g : glds) sum += g.jam_power_max_w * g.gain_eaves;
    return sum;
}

double min_bld_upload_time(std::span<const BldProfile> blds, double q_agg_w,
                           const SystemParams& sys) {
    double worst = 0.0;
    for (const auto& b : blds) {
        const double r = secrecy_rate(b, q_agg_w, sys);
        if (r <= 0.0)
            throw InfeasibleError("zero secrecy rate for BLD " + std::to_string(b.index) +
                                  " at Q=" + fmt9(q_agg_w));
        worst = std::max(worst, b.data_bits / r);
    }
    return worst;
}

double y_lower_bound(std::span<const GldProfile> glds, const SystemParams& sys) {
    double worst = 0.0;
    for (const auto& g : glds)
        worst = std::max(worst, sys.local_iters * sys.cycles_per_bit * g.data_bits / g.cpu_max_hz);
    return worst;
}

double t_up_g_lower_bound(std::span<const GldProfile> glds, const SystemParams& sys) {
    if (sys.model_size_bits == 0) return 0.0;
    double worst = 0.0;
    for (const auto& g : glds) {
        // bracket the power cap crossing, then bisect
        double hi = std::max(sys.model_size_bits / sys.bandwidth_hz, 1e-6);
        while (noma_power(g, hi, sys) > g.tx_power_max_w) hi *= 2.0;
        double lo = hi * 0.5;
        while (lo > std::numeric_limits<double>::min() &&
               noma_power(g, lo, sys) <= g.tx_power_max_w)
            lo *= 0.5;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (noma_power(g, mid, sys) > g.tx_power_max_w)
                lo = mid;
            else
                hi = mid;
        }
        worst = std::max(worst, hi);
    }
    return worst;
}

double total_delay(double t_gld, double t_bld, const SystemParams& sys) {
    if (t_gld < 0 || t_bld < 0)
        throw std::domain_error("total_delay: component delays must be nonnegative");
    return std::max(t_gld, t_bld) + sys.t_agg_coord_s + sys.t_up_coord_s + sys.t_main_coord_s;
}

}  // namespace dtfl::model
