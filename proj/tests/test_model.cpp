#include <doctest.h>

#include <cmath>

#include "model.hpp"
#include "support.hpp"
#include "util.hpp"

using namespace dtfl;
using namespace dtfl::model;
using doctest::Approx;

namespace {
GldProfile simple_gld(int index, double data_bits, double gain_coord) {
    GldProfile g;
    g.index = index;
    g.data_bits = data_bits;
    g.gain_coord = gain_coord;
    g.gain_eaves = 1e-8;
    g.cpu_max_hz = 1e9;
    g.tx_power_max_w = 2.0;
    g.jam_power_max_w = 1.0;
    g.energy_max_j = 4.0;
    return g;
}
}  // namespace

TEST_CASE("local training latency") {
    SystemParams s;
    s.local_iters = 1;
    s.cycles_per_bit = 1;
    CHECK(local_training_latency(simple_gld(1, 10, 1e-8), 10.0, s) == Approx(1.0));

    s.local_iters = 2;
    s.cycles_per_bit = 100;
    CHECK(local_training_latency(simple_gld(1, 30e6, 1e-8), 1e9, s) == Approx(6.0));

    CHECK(local_training_latency(simple_gld(1, 0, 1e-8), 1e9, s) == 0.0);
    CHECK_THROWS_AS(local_training_latency(simple_gld(1, 1, 1e-8), 0.0, s),
                    std::domain_error);
}

TEST_CASE("local training energy and the y-substituted form") {
    SystemParams s;
    s.switch_cap = 1e-28;
    s.local_iters = 2;
    s.cycles_per_bit = 100;
    const GldProfile g = simple_gld(1, 30e6, 1e-8);
    CHECK(local_training_energy(g, 1e9, s) == Approx(0.6));
    CHECK(local_training_energy(simple_gld(1, 0, 1e-8), 1e9, s) == 0.0);

    // v = eta*iota*D/y makes the energy kappa*(eta*iota*D)^3/y^2
    const double y = 6.0;
    const double d = s.local_iters * s.cycles_per_bit * g.data_bits;
    const double direct = local_training_energy(g, d / y, s);
    const double substituted = s.switch_cap * d * d * d / (y * y);
    CHECK(direct == Approx(substituted).epsilon(1e-12));
    CHECK(substituted == Approx(0.6).epsilon(1e-12));

    // consistency holds across random (D, y) draws
    Rng rng(99);
    for (int k = 0; k < 200; ++k) {
        const double data = rng.uniform(1e5, 1e8);
        const double yy = rng.uniform(0.1, 50.0);
        const GldProfile gg = simple_gld(1, data, 1e-8);
        const double dd = s.local_iters * s.cycles_per_bit * data;
        CHECK(local_training_energy(gg, dd / yy, s) ==
              Approx(s.switch_cap * dd * dd * dd / (yy * yy)).epsilon(1e-12));
    }
}

TEST_CASE("DT training latency") {
    SystemParams s;
    s.local_iters = 1;
    s.cycles_per_bit = 1;
    s.coord_cpu_hz = 10.0;
    BldProfile b;
    b.data_bits = 10.0;
    CHECK(dt_training_latency(std::vector<BldProfile>{b}, s) == Approx(1.0));

    CHECK(dt_training_latency(testsup::instance_blds(), testsup::instance_sys()) ==
          Approx(1.1).epsilon(1e-12));
    CHECK(dt_training_latency(std::vector<BldProfile>{}, s) == 0.0);
}

TEST_CASE("NOMA power examples and monotonicity") {
    SystemParams s;
    s.bandwidth_hz = 1e6;
    s.model_size_bits = 1e6;
    s.noise_coord_w = 1e-10;
    CHECK(noma_power(simple_gld(1, 1, 2.3e-8), 1.0, s) ==
          Approx(0.004347826086956522).epsilon(1e-12));
    CHECK(noma_power(simple_gld(2, 1, 2.5e-8), 1.0, s) == Approx(8.0e-3).epsilon(1e-12));

    SystemParams zero = s;
    zero.model_size_bits = 0;
    for (int i = 1; i <= 6; ++i) CHECK(noma_power(simple_gld(i, 1, 2e-8), 1.0, zero) == 0.0);
    CHECK_THROWS_AS(noma_power(simple_gld(1, 1, 2e-8), 0.0, s), std::domain_error);

    // strictly decreasing in t on a 100-point grid for each instance GLD
    const auto sys = testsup::instance_sys();
    for (const auto& g : testsup::instance_glds()) {
        double prev = noma_power(g, 0.5, sys);
        for (int k = 1; k < 100; ++k) {
            const double t = 0.5 + 0.25 * k;
            const double p = noma_power(g, t, sys);
            CHECK(p < prev);
            prev = p;
        }
    }
}

TEST_CASE("upload energy: product, decay, analytic floor") {
    SystemParams s;
    s.bandwidth_hz = 1e6;
    s.model_size_bits = 1e6;
    s.noise_coord_w = 1e-10;
    const GldProfile g1 = simple_gld(1, 1, 2.3e-8);
    CHECK(upload_energy(g1, 1.0, s) == Approx(0.004347826086956522).epsilon(1e-12));

    SystemParams zero = s;
    zero.model_size_bits = 0;
    CHECK(upload_energy(g1, 1.0, zero) == 0.0);

    CHECK(upload_energy(g1, 2.0, s) < upload_energy(g1, 1.0, s));

    // floor n_C*L*ln2/(g*W), approached within 1% at t = 1e4 * t_lb
    const double floor = s.noise_coord_w * s.model_size_bits * M_LN2 /
                         (g1.gain_coord * s.bandwidth_hz);
    const double t_lb = t_up_g_lower_bound(std::vector<GldProfile>{g1}, s);
    double prev = upload_energy(g1, t_lb, s);
    for (int k = 1; k <= 40; ++k) {
        const double t = t_lb * std::pow(10.0, 4.0 * k / 40.0);
        const double e = upload_energy(g1, t, s);
        CHECK(e <= prev);
        CHECK(e >= floor);
        prev = e;
    }
    CHECK(prev == Approx(floor).epsilon(0.01));
}

TEST_CASE("secrecy rate") {
    SystemParams s;
    s.bandwidth_hz = 1e6;
    s.noise_eaves_w = 1e-10;
    BldProfile b;
    b.index = 1;
    b.tx_power_w = 1.6;
    b.gain_coord = 1.0e-8;
    b.gain_eaves = 0.95e-9;
    b.noise_w = 1e-10;

    CHECK(secrecy_rate(b, 3e-8, s) == Approx(7259842.99740331).epsilon(1e-9));

    // degenerate: equal effective channels clamp to zero
    BldProfile deg = b;
    deg.gain_eaves = deg.gain_coord;  // with n_j = n_E and Q = 0
    CHECK(secrecy_rate(deg, 0.0, s) == 0.0);

    // strong jamming suppresses the eavesdropper entirely
    const double cap = s.bandwidth_hz * std::log2(1.0 + b.tx_power_w * b.gain_coord / b.noise_w);
    CHECK(secrecy_rate(b, 1e6, s) == Approx(cap).epsilon(1e-6));

    // nondecreasing in Q, never negative
    Rng rng(7);
    for (int k = 0; k < 1000; ++k) {
        BldProfile r;
        r.tx_power_w = rng.uniform(0.1, 3.0);
        r.gain_coord = rng.uniform(0.1, 10.0) * 1e-8;
        r.gain_eaves = rng.uniform(0.1, 10.0) * 1e-8;
        r.noise_w = rng.uniform(0.1, 10.0) * 1e-10;
        const double q1 = rng.uniform(0.0, 1e-7);
        const double q2 = q1 + rng.uniform(0.0, 1e-7);
        const double r1 = secrecy_rate(r, q1, s);
        const double r2 = secrecy_rate(r, q2, s);
        CHECK(r1 >= 0.0);
        CHECK(r2 >= r1);
    }
}

TEST_CASE("jamming energy") {
    CHECK(jamming_energy(0.0, 2.0) == 0.0);
    CHECK(jamming_energy(1.1, 0.5) == Approx(0.55));
    CHECK(jamming_energy(1.1, 0.0) == 0.0);
}

TEST_CASE("jamming interval bounds") {
    const auto sys = testsup::instance_sys();
    const auto blds = testsup::instance_blds();
    const auto glds = testsup::instance_glds();

    CHECK(q_lower_bound(blds, sys) == Approx(-8.833333333333334e-11).epsilon(1e-12));
    CHECK(q_upper_bound(glds) == Approx(8.35e-8).epsilon(1e-12));

    BldProfile sym;
    sym.gain_coord = 1e-8;
    sym.gain_eaves = 1e-8;
    sym.noise_w = 1e-10;
    SystemParams s = sys;
    CHECK(q_lower_bound(std::vector<BldProfile>{sym}, s) == 0.0);

    BldProfile strong = sym;
    strong.gain_eaves = 10.0 * strong.gain_coord;
    CHECK(q_lower_bound(std::vector<BldProfile>{strong}, s) == Approx(9e-10).epsilon(1e-12));

    GldProfile one = simple_gld(1, 1, 2e-8);
    one.jam_power_max_w = 1.0;
    one.gain_eaves = 1.0;
    CHECK(q_upper_bound(std::vector<GldProfile>{one}) == Approx(1.0));
    CHECK(q_upper_bound(std::vector<GldProfile>{}) == 0.0);
}

TEST_CASE("minimum BLD upload window") {
    const auto sys = testsup::instance_sys();
    const auto blds = testsup::instance_blds();

    // single-BLD instance, jamming strong enough to silence the eavesdropper
    std::vector<BldProfile> one{blds[0]};
    const double limit = 2e6 / (1e6 * std::log2(161.0));
    CHECK(min_bld_upload_time(one, 1.0, sys) == Approx(limit).epsilon(1e-5));
    CHECK(limit == Approx(0.27281717051938054).epsilon(1e-12));

    // at or below the secrecy bound the window is undefined
    BldProfile strong = blds[0];
    strong.gain_eaves = 2.0 * strong.gain_coord;
    const double bound =
        q_lower_bound(std::vector<BldProfile>{strong}, sys);
    CHECK(bound > 0.0);
    CHECK_THROWS_WITH_AS(
        (void)min_bld_upload_time(std::vector<BldProfile>{strong}, bound * 0.5, sys),
        doctest::Contains("BLD"), InfeasibleError);

    CHECK(min_bld_upload_time(blds, 6e-8, sys) < min_bld_upload_time(blds, 3e-8, sys));
}

TEST_CASE("y lower bound") {
    const auto sys = testsup::instance_sys();
    CHECK(y_lower_bound(testsup::instance_glds(), sys) == Approx(7.5).epsilon(1e-12));

    SystemParams unit;
    unit.local_iters = 1;
    unit.cycles_per_bit = 1;
    GldProfile g = simple_gld(1, 5.0, 2e-8);
    g.cpu_max_hz = 5.0;
    CHECK(y_lower_bound(std::vector<GldProfile>{g}, unit) == Approx(1.0));
    CHECK(y_lower_bound(std::vector<GldProfile>{}, unit) == 0.0);
}

TEST_CASE("upload-time lower bound") {
    SystemParams s;
    s.bandwidth_hz = 1e6;
    s.model_size_bits = 1e6;
    s.noise_coord_w = 1e-10;
    GldProfile g1 = simple_gld(1, 1, 2.3e-8);
    g1.tx_power_max_w = 1.9;
    const double closed = 1e6 / (1e6 * std::log2(1.0 + 1.9 * 2.3e-8 / 1e-10));
    CHECK(t_up_g_lower_bound(std::vector<GldProfile>{g1}, s) ==
          Approx(closed).epsilon(1e-9));
    CHECK(closed == Approx(0.11396287946450195).epsilon(1e-12));

    SystemParams zero = s;
    zero.model_size_bits = 0;
    CHECK(t_up_g_lower_bound(std::vector<GldProfile>{g1}, zero) == 0.0);

    // two devices: overall bound is the max of the individual ones, and a
    // dense grid confirms it is the first grid time where both caps hold
    GldProfile g2 = simple_gld(2, 1, 2.5e-8);
    g2.tx_power_max_w = 2.1;
    std::vector<GldProfile> both{g1, g2};
    const double t1 = t_up_g_lower_bound(std::vector<GldProfile>{g1}, s);
    const double t2 = t_up_g_lower_bound(std::vector<GldProfile>{g2}, s);
    const double tb = t_up_g_lower_bound(both, s);
    CHECK(tb == Approx(std::max(t1, t2)).epsilon(1e-12));
    double first_ok = 0.0;
    for (int k = 2000; k >= 1; --k) {
        const double t = 1e-3 * k;
        const bool ok = noma_power(g1, t, s) <= g1.tx_power_max_w &&
                        noma_power(g2, t, s) <= g2.tx_power_max_w;
        if (ok) first_ok = t;
        if (!ok) break;
    }
    CHECK(std::fabs(first_ok - tb) <= 1e-3 + 1e-12);
}

TEST_CASE("total delay") {
    SystemParams s;
    s.t_agg_coord_s = 1.0;
    s.t_up_coord_s = 1.0;
    s.t_main_coord_s = 0.01;
    CHECK(total_delay(5.0, 3.0, s) == Approx(7.01).epsilon(1e-12));
    CHECK(total_delay(4.0, 4.0, s) == Approx(6.01).epsilon(1e-12));

    SystemParams z;
    z.t_agg_coord_s = 0.0;
    z.t_up_coord_s = 0.0;
    z.t_main_coord_s = 0.0;
    CHECK(total_delay(0.0, 0.0, z) == 0.0);
    CHECK_THROWS_AS(total_delay(-1.0, 0.0, s), std::domain_error);
}

TEST_CASE("system params validation") {
    SystemParams s = testsup::instance_sys();
    CHECK_NOTHROW(s.validate());
    s.bandwidth_hz = 0.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
}
