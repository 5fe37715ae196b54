#include <doctest.h>

#include <cmath>

#include "digest.hpp"
#include "fedsim.hpp"
#include "support.hpp"
#include "util.hpp"

using namespace dtfl;
using namespace dtfl::fedsim;
using doctest::Approx;

namespace {

ScoringTables sim_tables(int clusters, int gld_devices, int bld_devices) {
    ScoringTables t;
    t.threshold = 0.5;
    for (int c = 0; c < clusters; ++c) {
        CoordinatorEntry e;
        e.id = c;
        e.reputation.cap_enc = 0.7;
        e.reputation.cap_rou = 0.7;
        e.reputation.prop = 0.3;
        e.reputation.hist = c == 0 ? 0.9 : 0.7;  // coordinator 0 wins
        t.coordinators.push_back(e);
    }
    int id = 1;
    for (int k = 0; k < gld_devices; ++k) {
        DeviceEntry d;
        d.id = id++;
        d.score.cap_proc = d.score.cap_store = d.score.cap_com = d.score.energy = 0.8;
        t.devices.push_back(d);
    }
    for (int k = 0; k < bld_devices; ++k) {
        DeviceEntry d;
        d.id = id++;
        d.score.cap_proc = d.score.cap_store = d.score.cap_com = d.score.energy = 0.3;
        t.devices.push_back(d);
    }
    return t;
}

SimParams sim_params(int clusters, int rounds, std::uint64_t seed) {
    SimParams p;
    p.clusters = clusters;
    p.rounds = rounds;
    p.seed = seed;
    p.train_per_cluster = 400;
    p.test_per_cluster = 200;
    return p;
}

Simulation make_sim(int clusters, int rounds, std::uint64_t seed, SimParams* tweak = nullptr) {
    SimParams p = tweak ? *tweak : sim_params(clusters, rounds, seed);
    return Simulation(testsup::instance_sys(), testsup::instance_glds(),
                      testsup::instance_blds(), opt::SolverConfig{}, sim_tables(clusters, 6, 4),
                      p);
}

}  // namespace

TEST_CASE("dt_sync outcomes") {
    model::BldProfile b;
    b.index = 1;
    b.data_bits = 2e6;
    b.tx_power_w = 1.0;
    b.gain_coord = 1e-8;
    b.gain_eaves = 1e-9;
    b.noise_w = 1e-10;

    DtRecord rec;
    rec = dt_sync(rec, b, 1e6, 3.0);  // 3e6 >= 2e6
    CHECK(rec.state == DtState::synced);
    CHECK(rec.deviation == 0.0);

    rec = dt_sync(rec, b, 0.0, 3.0);  // no secrecy throughput
    CHECK(rec.state == DtState::stale);
    CHECK(rec.deviation == Approx(1.0));
    rec = dt_sync(rec, b, 0.0, 3.0);
    CHECK(rec.deviation == Approx(1.5));

    model::BldProfile empty = b;
    empty.data_bits = 0;
    rec = dt_sync(rec, empty, 0.0, 0.0);  // nothing to send always fits
    CHECK(rec.state == DtState::synced);
    CHECK(rec.deviation == 0.0);
}

TEST_CASE("fedavg") {
    ClusterModel a{{0.0, 0.0, 0.0}, 10, 0, 0};
    ClusterModel b{{2.0, 2.0, 2.0}, 10, 0, 0};
    const auto mean = fedavg(std::vector<ClusterModel>{a, b});
    for (double w : mean.weights) CHECK(w == Approx(1.0));
    CHECK(mean.sample_count == 20);

    ClusterModel c{{0.0}, 1, 0, 0};
    ClusterModel d{{4.0}, 3, 0, 0};
    CHECK(fedavg(std::vector<ClusterModel>{c, d}).weights[0] == Approx(3.0));

    const auto self = fedavg(std::vector<ClusterModel>{b});
    CHECK(self.weights == b.weights);

    ClusterModel bad{{1.0, 2.0}, 1, 0, 0};
    CHECK_THROWS_AS((void)fedavg(std::vector<ClusterModel>{c, bad}), ConfigError);
    CHECK_THROWS_AS((void)fedavg(std::vector<ClusterModel>{}), ConfigError);
}

TEST_CASE("block verification") {
    ClusterModel m{{0.25, -1.5, 0.75}, 100, 3, 7};
    const std::string payload = serialize_model(m);
    LedgerBlock blk;
    blk.round = 7;
    blk.cluster_id = 3;
    blk.payload_digest = sha256_hex(payload);
    blk.validator_id = 0;

    const std::vector<int> registered{0, 1, 2, 3};
    CHECK(verify_block(blk, payload, registered));

    std::string flipped = payload;
    flipped[flipped.size() / 2] ^= 1;
    CHECK(!verify_block(blk, flipped, registered));

    const std::vector<int> others{0, 1, 2};
    CHECK(!verify_block(blk, payload, others));
}

TEST_CASE("ledger is append-only with nondecreasing rounds") {
    Ledger led;
    LedgerBlock b;
    b.round = 1;
    led.append(b);
    b.round = 1;
    led.append(b);
    b.round = 2;
    led.append(b);
    b.round = 1;
    CHECK_THROWS_AS(led.append(b), ConfigError);
    CHECK(led.blocks().size() == 3);
}

TEST_CASE("malicious mode parsing and injection") {
    CHECK(malicious_mode_from_string("label_flip") == MaliciousMode::label_flip);
    CHECK(malicious_mode_from_string("model_scale") == MaliciousMode::model_scale);
    CHECK(malicious_mode_from_string("tamper_payload") == MaliciousMode::tamper_payload);
    CHECK_THROWS_AS((void)malicious_mode_from_string("gradient_ascent"), ConfigError);

    ClusterState st;
    st.train.x = {{1, 1}, {2, 2}};
    st.train.y = {0, 1};
    const auto flipped = inject_malicious(st, MaliciousMode::label_flip, 9);
    CHECK(flipped.train.y == std::vector<int>{1, 0});
    CHECK(flipped.labels_flipped);
    const auto tampered = inject_malicious(st, MaliciousMode::tamper_payload, 9);
    CHECK(tampered.tamper_payload);
    CHECK(tampered.train.y == st.train.y);
}

TEST_CASE("single clean cluster: the final model is the cluster model") {
    auto sim = make_sim(1, 1, 42);
    const auto rep = sim.run_round();
    CHECK(rep.blocks_appended == 2);  // one cluster block + the final block
    CHECK(rep.verified_count == 2);
    CHECK(rep.clusters[0].verified);
    CHECK(rep.global_accuracy == Approx(rep.clusters[0].accuracy));
}

TEST_CASE("ten clusters append eleven blocks per round") {
    auto sim = make_sim(10, 3, 42);
    for (const auto& rep : sim.run()) {
        CHECK(rep.blocks_appended == 11);
        CHECK(rep.baseline_blocks == 100);
        CHECK(rep.proposed_bytes < rep.baseline_bytes);
    }
}

TEST_CASE("tampered payload is excluded from aggregation") {
    SimParams p = sim_params(1, 1, 42);
    p.malicious_clusters = {0};
    p.malicious_mode = MaliciousMode::tamper_payload;
    auto sim = make_sim(1, 1, 42, &p);
    const auto rep = sim.run_round();
    CHECK(!rep.clusters[0].verified);
    CHECK(rep.verified_count == 1);  // only the final block
    // nothing verified, so the global model stays at its initial zeros
    for (double w : sim.global_weights()) CHECK(w == 0.0);
}

TEST_CASE("label flip poisons the flipped cluster only") {
    SimParams p = sim_params(2, 1, 42);
    p.malicious_clusters = {0};
    p.malicious_mode = MaliciousMode::label_flip;
    auto sim = make_sim(2, 1, 42, &p);
    const auto rep = sim.run_round();
    CHECK(rep.clusters[0].verified);  // integrity checks cannot see data poisoning
    CHECK(rep.clusters[0].accuracy < rep.clusters[1].accuracy);
}

TEST_CASE("determinism: same seed, same ledger") {
    auto a = make_sim(3, 5, 77);
    auto b = make_sim(3, 5, 77);
    a.run();
    b.run();
    REQUIRE(a.ledger().blocks().size() == b.ledger().blocks().size());
    for (std::size_t k = 0; k < a.ledger().blocks().size(); ++k) {
        CHECK(a.ledger().blocks()[k].payload_digest == b.ledger().blocks()[k].payload_digest);
        CHECK(a.ledger().blocks()[k].size_bytes == b.ledger().blocks()[k].size_bytes);
    }
}

TEST_CASE("block accounting") {
    SUBCASE("ten by ten") {
        auto sim = make_sim(10, 2, 42);
        sim.run();
        const auto rep = block_accounting(sim.ledger(), sim.baseline());
        REQUIRE(rep.rows.size() == 2);
        for (const auto& row : rep.rows) {
            CHECK(row.proposed_blocks == 11);
            CHECK(row.baseline_blocks == 100);
        }
        CHECK(rep.proposed_total_bytes < rep.baseline_total_bytes);
    }
    SUBCASE("tiny scale shows the crossover, reported as-is") {
        SimParams p = sim_params(1, 1, 42);
        p.run_solver = false;  // a single device has no BLDs to schedule for
        auto sim = Simulation(testsup::instance_sys(),
                              {testsup::instance_glds().front()}, {}, opt::SolverConfig{},
                              sim_tables(1, 1, 0), p);
        sim.run();
        const auto rep = block_accounting(sim.ledger(), sim.baseline());
        REQUIRE(rep.rows.size() == 1);
        CHECK(rep.rows[0].proposed_blocks == 2);  // cluster + final beats one participant
        CHECK(rep.rows[0].baseline_blocks == 1);
    }
    SUBCASE("zero rounds, empty report") {
        auto sim = make_sim(2, 0, 42);
        sim.run();
        const auto rep = block_accounting(sim.ledger(), sim.baseline());
        CHECK(rep.rows.empty());
        CHECK(rep.proposed_total_bytes == 0);
    }
}

TEST_CASE("training improves and verification preserves accuracy") {
    auto sim = make_sim(4, 12, 101);
    const auto reports = sim.run();
    CHECK(reports.back().global_accuracy > 0.85);
    // replaying under the same seed is bit-identical on digests (Algorithm-1
    // determinism; the tamper A/B comparison lives in the acceptance suite)
}

TEST_CASE("held-out accuracy is nondecreasing over late 5-round windows") {
    SimParams p = sim_params(10, 25, 2025);
    auto sim = make_sim(10, 25, 2025, &p);
    std::vector<double> acc;
    for (const auto& rep : sim.run()) acc.push_back(rep.global_accuracy);
    const auto sm = testsup::median3(acc);
    // accuracy is quantized in steps of one test point; allow a one-point dip
    const double quantum = 1.0 / (p.test_per_cluster * p.clusters);
    for (std::size_t r = 10; r + 5 < sm.size(); ++r)
        CHECK(sm[r + 5] >= sm[r] - quantum - 1e-12);
}

TEST_CASE("scheduler infeasibility propagates out of the simulation") {
    auto poor = testsup::instance_glds();
    for (auto& g : poor) g.energy_max_j = 1e-6;
    CHECK_THROWS_AS(Simulation(testsup::instance_sys(), poor, testsup::instance_blds(),
                               opt::SolverConfig{}, sim_tables(1, 6, 4), sim_params(1, 1, 1)),
                    InfeasibleError);
}

TEST_CASE("the optimizer's schedule synchronizes every twin") {
    auto sim = make_sim(2, 1, 42);
    const auto rep = sim.run_round();
    // a stale twin would shrink the aggregated sample mass and show up as a
    // verified-but-different digest; probe via the schedule directly instead
    const auto& sched = sim.schedule();
    for (const auto& b : testsup::instance_blds()) {
        const double r = model::secrecy_rate(b, sched.q_agg_w, testsup::instance_sys());
        CHECK(b.data_bits <= r * sched.t_up_b * (1.0 + 1e-12));
    }
    CHECK(rep.verified_count == rep.blocks_appended);
}
