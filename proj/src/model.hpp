#pragma once

#include <span>
#include <string>
#include <vector>

namespace dtfl::model {

// Shared constants of one cluster. All SI units (bits, Hz, W, J, s).
struct SystemParams {
    double bandwidth_hz = 1e6;        // W
    double noise_coord_w = 1e-10;     // n_C, receiver noise at the coordinator
    double noise_eaves_w = 1e-10;     // n_E, receiver noise at the eavesdropper
    double local_iters = 2;           // eta, local training passes per round
    double cycles_per_bit = 100;      // iota
    double switch_cap = 1e-28;        // kappa, effective switched capacitance
    double model_size_bits = 3e6;     // L, uploaded model size
    double coord_cpu_hz = 2e9;        // v_c, coordinator CPU rate for DT training
    double t_agg_coord_s = 1.0;       // fixed aggregation delay at the coordinator
    double t_up_coord_s = 1.0;        // fixed coordinator upload delay
    double t_main_coord_s = 0.01;     // small positive main-coordinator delay

    void validate() const;  // throws ConfigError when any field is not positive
};

// Resource-rich local device: trains locally, uploads over NOMA, jams.
struct GldProfile {
    int index = 1;              // 1-based; decoding order is reverse of index
    double data_bits = 0;       // D_iG
    double gain_coord = 0;      // power gain to the coordinator
    double gain_eaves = 0;      // power gain to the eavesdropper
    double cpu_max_hz = 0;      // V_i^max
    double tx_power_max_w = 0;  // P_i^max
    double jam_power_max_w = 0; // Q_i^max
    double energy_max_j = 0;    // E_i^max
};

// Resource-constrained device whose training runs on a coordinator-side DT.
struct BldProfile {
    int index = 1;
    double data_bits = 0;       // D_jB, DT synchronization payload
    double gain_coord = 0;      // h_jC
    double gain_eaves = 0;      // h_jE
    double tx_power_w = 0;      // p_j^B
    double noise_w = 0;         // n_j; scenario loader defaults this to n_C
};

// Optimizer output for one cluster schedule.
struct Solution {
    double y = 0;                    // bound on all GLD local-training latencies (s)
    double t_up_g = 0;               // NOMA upload duration (s)
    double t_up_b = 0;               // BLD sync window (s)
    std::vector<double> jam_w;       // q_i per GLD (W)
    double q_agg_w = 0;              // aggregate jamming power at the eavesdropper
    std::vector<double> cpu_hz;      // v_i = eta*iota*D_i/y
    std::vector<double> tx_power_w;  // p_i^G at t_up_g
    double t_gld = 0;                // y + t_up_g
    double t_bld = 0;                // t_up_b + DT training latency
    double t_total = 0;              // max(t_gld, t_bld) + fixed delays
};

// ---- latency / energy ----

// eta*iota*D / v
double local_training_latency(const GldProfile& gld, double cpu_rate_hz,
                              const SystemParams& sys);

// kappa*eta*iota*D*v^2; equals kappa*(eta*iota*D)^3/y^2 at v = eta*iota*D/y
double local_training_energy(const GldProfile& gld, double cpu_rate_hz,
                             const SystemParams& sys);

// eta*iota*sum_j D_jB / v_c
double dt_training_latency(std::span<const BldProfile> blds, const SystemParams& sys);

/// Transmit power needed by GLD i to push L bits in t seconds through the
/// NOMA uplink. With decoding order {I, ..., 1}, user i sees i-1 undecoded
/// interferers, giving the (i-1) exponent in the interference factor.
double noma_power(const GldProfile& gld, double t_up_g, const SystemParams& sys);

// noma_power * t; for i=1 decreasing in t with limit n_C*L*ln2/(g*W)
double upload_energy(const GldProfile& gld, double t_up_g, const SystemParams& sys);

// W*[log2(1 + p*hC/n_j) - log2(1 + p*hE/(n_E + Q))]^+
double secrecy_rate(const BldProfile& bld, double q_agg_w, const SystemParams& sys);

double jamming_energy(double jam_w, double t_up_b);

// ---- feasibility bounds ----

// max_j(n_j*hE/hC) - n_E; may be negative, callers clamp at 0 (exclusive)
double q_lower_bound(std::span<const BldProfile> blds, const SystemParams& sys);

// sum_i Q_i^max * g_iE, the largest achievable aggregate jamming power
double q_upper_bound(std::span<const GldProfile> glds);

// max_j D_jB / R_j^sec; throws InfeasibleError naming the first BLD whose
// secrecy rate is zero at this Q
double min_bld_upload_time(std::span<const BldProfile> blds, double q_agg_w,
                           const SystemParams& sys);

// max_i eta*iota*D_i / V_i^max
double y_lower_bound(std::span<const GldProfile> glds, const SystemParams& sys);

// Smallest t with noma_power(i, t) <= P_i^max for every i. Bisection on the
// per-GLD power curve (strictly decreasing in t), then max over devices.
double t_up_g_lower_bound(std::span<const GldProfile> glds, const SystemParams& sys);

// max(t_gld, t_bld) + t_agg_coord + t_up_coord + t_main_coord
double total_delay(double t_gld, double t_bld, const SystemParams& sys);

}  // namespace dtfl::model
