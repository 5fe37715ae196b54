#include "fedsim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "digest.hpp"

namespace dtfl::fedsim {

DtRecord dt_sync(const DtRecord& prev, const model::BldProfile& bld, double secrecy_rate,
                 double t_up_b) {
    if (t_up_b < 0) throw std::domain_error("dt_sync: negative sync window");
    DtRecord out = prev;
    out.bld_index = bld.index;
    // 1e-12 relative slack: the schedule's window is defined by D/R round-trips
    if (bld.data_bits <= secrecy_rate * t_up_b * (1.0 + 1e-12)) {
        out.state = DtState::synced;
        out.deviation = 0.0;
        out.resource_cpu_hz = 0.0;  // BLDs delegate compute; snapshot carries link state
        out.resource_tx_w = bld.tx_power_w;
        out.static_data = "bld-" + std::to_string(bld.index);
    } else {
        out.state = DtState::stale;
        out.deviation = prev.deviation * 0.5 + 1.0;  // decayed staleness counter
    }
    return out;
}

ClusterModel fedavg(std::span<const ClusterModel> models) {
    if (models.empty()) throw ConfigError("fedavg: no models to aggregate");
    const std::size_t dim = models.front().weights.size();
    ClusterModel out;
    out.weights.assign(dim, 0.0);
    out.cluster_id = models.front().cluster_id;
    out.round = models.front().round;
    std::int64_t total = 0;
    for (const auto& m : models) {
        if (m.weights.size() != dim)
            throw ConfigError("fedavg: weight vector length mismatch (" +
                              std::to_string(m.weights.size()) + " vs " + std::to_string(dim) +
                              ")");
        if (m.sample_count <= 0) throw ConfigError("fedavg: sample_count must be positive");
        total += m.sample_count;
    }
    for (const auto& m : models) {
        const double w = static_cast<double>(m.sample_count) / static_cast<double>(total);
        for (std::size_t k = 0; k < dim; ++k) out.weights[k] += w * m.weights[k];
    }
    out.sample_count = total;
    return out;
}

std::string serialize_model(const ClusterModel& m) {
    std::ostringstream os;
    os << "{\"cluster_id\":" << m.cluster_id << ",\"round\":" << m.round
       << ",\"sample_count\":" << m.sample_count << ",\"weights\":[";
    for (std::size_t k = 0; k < m.weights.size(); ++k)
        os << (k ? "," : "") << fmt9(m.weights[k]);
    os << "]}";
    return os.str();
}

bool verify_block(const LedgerBlock& block, const std::string& payload,
                  std::span<const int> registered_coordinators) {
    if (block.cluster_id != -1) {
        const bool registered =
            std::find(registered_coordinators.begin(), registered_coordinators.end(),
                      block.cluster_id) != registered_coordinators.end();
        if (!registered) return false;
    }
    return sha256_hex(payload) == block.payload_digest;
}

void Ledger::append(LedgerBlock block) {
    if (!blocks_.empty() && block.round < blocks_.back().round)
        throw ConfigError("ledger: rounds must be nondecreasing");
    blocks_.push_back(std::move(block));
}

MaliciousMode malicious_mode_from_string(const std::string& s) {
    if (s == "label_flip") return MaliciousMode::label_flip;
    if (s == "model_scale") return MaliciousMode::model_scale;
    if (s == "tamper_payload") return MaliciousMode::tamper_payload;
    throw ConfigError("unknown malicious mode: " + s);
}

const char* to_string(MaliciousMode m) {
    switch (m) {
        case MaliciousMode::label_flip: return "label_flip";
        case MaliciousMode::model_scale: return "model_scale";
        case MaliciousMode::tamper_payload: return "tamper_payload";
    }
    return "?";
}

ClusterState inject_malicious(ClusterState cluster, MaliciousMode mode,
                              std::uint64_t rng_seed) {
    cluster.attack_seed = rng_seed;
    switch (mode) {
        case MaliciousMode::label_flip:
            for (auto& y : cluster.train.y) y = 1 - y;
            cluster.labels_flipped = true;
            break;
        case MaliciousMode::model_scale:
            cluster.scale_model = true;
            break;
        case MaliciousMode::tamper_payload:
            cluster.tamper_payload = true;
            break;
    }
    return cluster;
}

std::vector<double> train_logistic(std::span<const double> w_init, const Dataset& data,
                                   std::size_t first, std::size_t count, int epochs,
                                   double learn_rate) {
    std::vector<double> w(w_init.begin(), w_init.end());
    if (w.size() != 3) throw ConfigError("train_logistic: expected 2 weights + bias");
    if (count == 0 || first + count > data.x.size())
        throw ConfigError("train_logistic: bad shard bounds");
    for (int e = 0; e < epochs; ++e) {
        double g0 = 0, g1 = 0, g2 = 0;
        for (std::size_t k = first; k < first + count; ++k) {
            const double z = w[0] * data.x[k][0] + w[1] * data.x[k][1] + w[2];
            const double p = 1.0 / (1.0 + std::exp(-std::clamp(z, -30.0, 30.0)));
            const double err = p - data.y[k];
            g0 += err * data.x[k][0];
            g1 += err * data.x[k][1];
            g2 += err;
        }
        const double scale = learn_rate / static_cast<double>(count);
        w[0] -= scale * g0;
        w[1] -= scale * g1;
        w[2] -= scale * g2;
    }
    return w;
}

double accuracy(std::span<const double> w, const Dataset& data) {
    if (data.x.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t k = 0; k < data.x.size(); ++k) {
        const double z = w[0] * data.x[k][0] + w[1] * data.x[k][1] + w[2];
        hits += ((z > 0.0) ? 1 : 0) == data.y[k];
    }
    return static_cast<double>(hits) / static_cast<double>(data.x.size());
}

ComparisonReport block_accounting(const Ledger& ledger,
                                  std::span<const BaselineRound> baseline) {
    ComparisonReport rep;
    for (const auto& b : baseline) {
        AccountingRow row;
        row.round = b.round;
        row.baseline_blocks = b.blocks;
        row.baseline_bytes = b.bytes;
        for (const auto& blk : ledger.blocks()) {
            if (blk.round != b.round) continue;
            ++row.proposed_blocks;
            row.proposed_bytes += blk.size_bytes;
        }
        rep.proposed_total_bytes += row.proposed_bytes;
        rep.baseline_total_bytes += row.baseline_bytes;
        rep.rows.push_back(row);
    }
    return rep;
}

// ---- simulation ----

namespace {

Dataset make_blobs(Rng& rng, int n, double mean, double sigma) {
    Dataset d;
    d.x.resize(n);
    d.y.resize(n);
    for (int k = 0; k < n; ++k) {
        const int label = k % 2;
        const double mu = label ? mean : -mean;
        d.x[k] = {mu + sigma * rng.gauss(), mu + sigma * rng.gauss()};
        d.y[k] = label;
    }
    return d;
}

}  // namespace

Simulation::Simulation(model::SystemParams sys, std::vector<model::GldProfile> glds,
                       std::vector<model::BldProfile> blds, opt::SolverConfig solver,
                       ScoringTables scoring_tables, SimParams params)
    : sys_(sys),
      glds_(std::move(glds)),
      blds_(std::move(blds)),
      solver_(solver),
      scoring_(std::move(scoring_tables)),
      params_(std::move(params)) {
    if (params_.clusters < 1) throw ConfigError("simulation: needs at least one cluster");
    if (static_cast<int>(scoring_.coordinators.size()) != params_.clusters)
        throw ConfigError("simulation: reputation table must list one coordinator per cluster");
    for (const auto& c : scoring_.coordinators)
        if (c.id < 0 || c.id >= params_.clusters)
            throw ConfigError("simulation: coordinator ids must match cluster ids 0.." +
                              std::to_string(params_.clusters - 1));

    // validator selection (Algorithm 1 steps 2-5)
    std::vector<std::pair<int, double>> rep;
    rep.reserve(scoring_.coordinators.size());
    for (const auto& c : scoring_.coordinators)
        rep.emplace_back(c.id, scoring::reputation_score(c.reputation));
    validator_id_ = scoring::select_validator(rep);

    // device classification, shared template across clusters
    std::vector<std::pair<int, double>> dev_scores;
    for (const auto& d : scoring_.devices)
        dev_scores.emplace_back(d.id, scoring::device_score(d.score));
    const auto cls = scoring::classify_devices(dev_scores, scoring_.threshold);
    if (cls.gld_ids.size() != glds_.size())
        throw ConfigError("simulation: classification yields " +
                          std::to_string(cls.gld_ids.size()) + " GLDs but " +
                          std::to_string(glds_.size()) + " GLD profiles are configured");
    if (cls.bld_ids.size() != blds_.size())
        throw ConfigError("simulation: classification yields " +
                          std::to_string(cls.bld_ids.size()) + " BLDs but " +
                          std::to_string(blds_.size()) + " BLD profiles are configured");

    // one delay schedule; the cluster physics are static across rounds
    if (params_.run_solver) {
        schedule_ = opt::solve_p(glds_, blds_, sys_, solver_).best;
    } else {
        const double q = model::q_upper_bound(glds_);
        schedule_.q_agg_w = q;
        schedule_.y = model::y_lower_bound(glds_, sys_);
        schedule_.t_up_g = model::t_up_g_lower_bound(glds_, sys_);
        schedule_.t_up_b = model::min_bld_upload_time(blds_, q, sys_);
        schedule_.t_gld = schedule_.y + schedule_.t_up_g;
        schedule_.t_bld = schedule_.t_up_b + model::dt_training_latency(blds_, sys_);
        schedule_.t_total = model::total_delay(schedule_.t_gld, schedule_.t_bld, sys_);
    }

    clusters_.reserve(params_.clusters);
    for (int c = 0; c < params_.clusters; ++c) {
        ClusterState st;
        st.cluster_id = c;
        Rng rng(mix_seed(params_.seed, 0xD474ULL + static_cast<std::uint64_t>(c)));
        st.train = make_blobs(rng, params_.train_per_cluster, params_.blob_mean,
                              params_.blob_sigma);
        st.test = make_blobs(rng, params_.test_per_cluster, params_.blob_mean,
                             params_.blob_sigma);
        st.gld_device_ids = cls.gld_ids;
        st.bld_device_ids = cls.bld_ids;
        st.twins.resize(blds_.size());
        st.attack_scale = params_.attack_scale;
        const bool evil = params_.malicious_mode &&
                          std::find(params_.malicious_clusters.begin(),
                                    params_.malicious_clusters.end(),
                                    c) != params_.malicious_clusters.end();
        if (evil)
            st = inject_malicious(std::move(st), *params_.malicious_mode,
                                  mix_seed(params_.seed, 0xEE71ULL + c));
        clusters_.push_back(std::move(st));
    }
    global_.assign(3, 0.0);
}

RoundReport Simulation::run_round() {
    const int round = round_++;
    RoundReport rep;
    rep.round = round;
    rep.validator_id = validator_id_;

    std::vector<int> registered;
    registered.reserve(scoring_.coordinators.size());
    for (const auto& c : scoring_.coordinators) registered.push_back(c.id);

    // the validator re-checks the chain's prior global block before reuse
    rep.prior_global_verified =
        !prior_global_block_ ||
        verify_block(*prior_global_block_, prior_global_payload_, registered);

    const int devices_total = static_cast<int>(scoring_.devices.size());
    std::vector<ClusterModel> verified_models;
    std::vector<std::pair<LedgerBlock, std::string>> pending;

    for (auto& st : clusters_) {
        // DT synchronization for this round's schedule
        for (std::size_t b = 0; b < blds_.size(); ++b) {
            const double r = model::secrecy_rate(blds_[b], schedule_.q_agg_w, sys_);
            st.twins[b] = dt_sync(st.twins[b], blds_[b], r, schedule_.t_up_b);
        }

        // device shards: equal contiguous slices over the device template
        const std::size_t per =
            st.train.x.size() / static_cast<std::size_t>(devices_total);
        std::vector<ClusterModel> device_models;
        std::uint64_t round_baseline_bytes = 0;
        int slot = 0;
        auto train_slot = [&](bool include) {
            const std::size_t first = static_cast<std::size_t>(slot) * per;
            ++slot;
            ClusterModel dm;
            dm.cluster_id = st.cluster_id;
            dm.round = round;
            dm.sample_count = static_cast<std::int64_t>(per);
            if (include) {
                dm.weights = train_logistic(global_, st.train, first, per,
                                            static_cast<int>(sys_.local_iters),
                                            params_.learn_rate);
            } else {
                dm.weights = global_;  // stale twin: last broadcast state stands in
            }
            round_baseline_bytes += serialize_model(dm).size();
            if (include) device_models.push_back(dm);
        };
        for (std::size_t g = 0; g < st.gld_device_ids.size(); ++g) train_slot(true);
        for (std::size_t b = 0; b < st.bld_device_ids.size(); ++b)
            train_slot(st.twins[b].state == DtState::synced);

        ClusterModel cluster_model = fedavg(device_models);
        if (st.scale_model)
            for (auto& w : cluster_model.weights) w *= st.attack_scale;

        std::string payload = serialize_model(cluster_model);
        LedgerBlock block;
        block.round = round;
        block.cluster_id = st.cluster_id;
        block.validator_id = validator_id_;
        block.payload_digest = sha256_hex(payload);
        if (st.tamper_payload) {  // altered in flight, after digest creation
            for (auto& w : cluster_model.weights) w *= st.attack_scale;
            payload = serialize_model(cluster_model);
        }
        block.size_bytes = payload.size();
        block.verified = params_.verification
                             ? verify_block(block, payload, registered)
                             : true;  // verification disabled: accept everything

        RoundClusterReport cr;
        cr.cluster_id = st.cluster_id;
        cr.t_total = schedule_.t_total;
        cr.accuracy = accuracy(cluster_model.weights, st.test);
        cr.verified = block.verified;
        rep.clusters.push_back(cr);

        if (block.verified) verified_models.push_back(cluster_model);
        pending.emplace_back(std::move(block), std::move(payload));

        rep.baseline_blocks += devices_total;
        rep.baseline_bytes += round_baseline_bytes;
    }

    // main coordinator: aggregate only what survived verification
    if (!verified_models.empty()) global_ = fedavg(verified_models).weights;

    ClusterModel final_model;
    final_model.cluster_id = -1;
    final_model.round = round;
    final_model.sample_count = 1;
    final_model.weights = global_;
    std::string final_payload = serialize_model(final_model);
    LedgerBlock final_block;
    final_block.round = round;
    final_block.cluster_id = -1;
    final_block.validator_id = validator_id_;
    final_block.payload_digest = sha256_hex(final_payload);
    final_block.size_bytes = final_payload.size();
    final_block.verified = true;
    pending.emplace_back(final_block, final_payload);

    for (auto& [blk, payload] : pending) {
        rep.verified_count += blk.verified ? 1 : 0;
        rep.proposed_bytes += blk.size_bytes;
        ledger_.append(blk);
    }
    rep.blocks_appended = static_cast<int>(pending.size());
    prior_global_block_ = final_block;
    prior_global_payload_ = std::move(final_payload);

    double acc = 0.0;
    for (const auto& st : clusters_) acc += accuracy(global_, st.test);
    rep.global_accuracy = acc / static_cast<double>(clusters_.size());

    baseline_.push_back({round, rep.baseline_blocks, rep.baseline_bytes});
    return rep;
}

std::vector<RoundReport> Simulation::run() {
    std::vector<RoundReport> out;
    out.reserve(params_.rounds);
    for (int r = 0; r < params_.rounds; ++r) out.push_back(run_round());
    return out;
}

}  // namespace dtfl::fedsim
