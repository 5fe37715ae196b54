#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "model.hpp"
#include "optimizer.hpp"
#include "scoring.hpp"
#include "util.hpp"

namespace dtfl::fedsim {

// ---- digital twin records ----

enum class DtState { fresh, synced, stale };

struct DtRecord {
    int bld_index = 0;
    DtState state = DtState::fresh;
    std::string static_data;      // opaque device snapshot
    double resource_cpu_hz = 0;   // snapshot of the mapped BLD's resources
    double resource_tx_w = 0;
    double deviation = 0;         // staleness; reset to 0 on every successful sync
};

// One synchronization attempt. Succeeds iff the sync payload fits through the
// secrecy channel within the window (D <= R * t); failure marks the twin
// stale and bumps the decayed staleness counter.
DtRecord dt_sync(const DtRecord& prev, const model::BldProfile& bld, double secrecy_rate,
                 double t_up_b);

// ---- models, ledger ----

struct ClusterModel {
    std::vector<double> weights;
    std::int64_t sample_count = 0;
    int cluster_id = 0;
    int round = 0;
};

// Sample-count-weighted mean. Weight vectors must agree in length.
ClusterModel fedavg(std::span<const ClusterModel> models);

// Canonical payload serialization (keys sorted, values quantized to 9
// significant digits) — the bytes that get digested and counted.
std::string serialize_model(const ClusterModel& m);

struct LedgerBlock {
    int round = 0;
    int cluster_id = 0;  // -1 marks the final global-model block
    std::string payload_digest;
    int validator_id = 0;
    bool verified = false;
    std::uint64_t size_bytes = 0;
};

// true iff the payload digests to the recorded value and the submitter is a
// registered coordinator.
bool verify_block(const LedgerBlock& block, const std::string& payload,
                  std::span<const int> registered_coordinators);

class Ledger {
public:
    void append(LedgerBlock block);  // rounds must be nondecreasing
    const std::vector<LedgerBlock>& blocks() const { return blocks_; }

private:
    std::vector<LedgerBlock> blocks_;
};

// ---- malicious behaviour ----

enum class MaliciousMode { label_flip, model_scale, tamper_payload };

MaliciousMode malicious_mode_from_string(const std::string& s);
const char* to_string(MaliciousMode m);

// ---- synthetic learning task ----

struct Dataset {
    std::vector<std::array<double, 2>> x;
    std::vector<int> y;  // binary labels
};

// Per-cluster working state: seeded data, classified devices, attack flags.
struct ClusterState {
    int cluster_id = 0;
    Dataset train;
    Dataset test;
    std::vector<int> gld_device_ids;
    std::vector<int> bld_device_ids;
    std::vector<DtRecord> twins;  // one per BLD device, by classification order
    bool labels_flipped = false;
    bool scale_model = false;     // scaled before digesting (poisoning)
    bool tamper_payload = false;  // corrupted after digesting (integrity attack)
    double attack_scale = -5.0;
    std::uint64_t attack_seed = 0;
};

// Applies the seeded corruption for one mode; the returned state drives the
// submission path of every subsequent round.
ClusterState inject_malicious(ClusterState cluster, MaliciousMode mode,
                              std::uint64_t rng_seed);

// Binary logistic regression, full-batch gradient descent.
std::vector<double> train_logistic(std::span<const double> w_init, const Dataset& data,
                                   std::size_t first, std::size_t count, int epochs,
                                   double learn_rate);
double accuracy(std::span<const double> w, const Dataset& data);

// ---- round orchestration ----

struct CoordinatorEntry {
    int id = 0;
    scoring::ReputationInputs reputation;
};

struct DeviceEntry {
    int id = 0;
    scoring::DeviceScoreInputs score;
};

struct ScoringTables {
    std::vector<CoordinatorEntry> coordinators;  // one per cluster
    std::vector<DeviceEntry> devices;            // device template, shared by clusters
    double threshold = 0.5;
};

struct SimParams {
    int clusters = 1;
    int rounds = 0;
    std::uint64_t seed = 0;
    bool verification = true;
    bool run_solver = true;  // schedule via the delay optimizer; else saturated jamming
    int train_per_cluster = 2000;
    int test_per_cluster = 500;
    double blob_mean = 1.2;
    double blob_sigma = 1.0;
    double learn_rate = 0.5;
    std::vector<int> malicious_clusters;
    std::optional<MaliciousMode> malicious_mode;
    double attack_scale = -5.0;
};

struct RoundClusterReport {
    int cluster_id = 0;
    double t_total = 0;
    double accuracy = 0;  // this cluster model on its own held-out set
    bool verified = false;
};

struct RoundReport {
    int round = 0;
    int validator_id = 0;
    bool prior_global_verified = true;
    std::vector<RoundClusterReport> clusters;
    int blocks_appended = 0;
    int verified_count = 0;      // verified blocks among this round's appends
    double global_accuracy = 0;  // final model on the pooled held-out sets
    std::uint64_t proposed_bytes = 0;
    int baseline_blocks = 0;     // one block per participating device
    std::uint64_t baseline_bytes = 0;
};

struct BaselineRound {
    int round = 0;
    int blocks = 0;
    std::uint64_t bytes = 0;
};

struct AccountingRow {
    int round = 0;
    int proposed_blocks = 0;
    int baseline_blocks = 0;
    std::uint64_t proposed_bytes = 0;
    std::uint64_t baseline_bytes = 0;
};

struct ComparisonReport {
    std::vector<AccountingRow> rows;
    std::uint64_t proposed_total_bytes = 0;
    std::uint64_t baseline_total_bytes = 0;
};

// Per-round block/byte tally of the ledger against a flat one-block-per-
// participant baseline.
ComparisonReport block_accounting(const Ledger& ledger,
                                  std::span<const BaselineRound> baseline);

class Simulation {
public:
    Simulation(model::SystemParams sys, std::vector<model::GldProfile> glds,
               std::vector<model::BldProfile> blds, opt::SolverConfig solver,
               ScoringTables scoring, SimParams params);

    RoundReport run_round();
    std::vector<RoundReport> run();  // params.rounds rounds

    const Ledger& ledger() const { return ledger_; }
    std::span<const BaselineRound> baseline() const { return baseline_; }
    std::span<const double> global_weights() const { return global_; }
    const model::Solution& schedule() const { return schedule_; }
    int validator_id() const { return validator_id_; }

private:
    model::SystemParams sys_;
    std::vector<model::GldProfile> glds_;
    std::vector<model::BldProfile> blds_;
    opt::SolverConfig solver_;
    ScoringTables scoring_;
    SimParams params_;

    model::Solution schedule_;
    int validator_id_ = 0;
    std::vector<ClusterState> clusters_;
    std::vector<double> global_;
    std::string prior_global_payload_;
    std::optional<LedgerBlock> prior_global_block_;
    Ledger ledger_;
    std::vector<BaselineRound> baseline_;
    int round_ = 0;
};

}  // namespace dtfl::fedsim
