#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

namespace dtfl::scoring {

// Inputs to the coordinator reputation score. `prop` is the fraction of
// devices the coordinator generates DTs for; fewer DTs score higher, so it
// enters the weighted sum as (1 - prop).
struct ReputationInputs {
    double cap_enc = 0;   // encryption capability, [0, 1]
    double cap_rou = 0;   // secure-routing capability, [0, 1]
    double prop = 0;      // DT-generation fraction, [0, 1]
    double hist = 0;      // historical behaviour, [0, 1]
    std::array<double, 4> weights{0.25, 0.25, 0.25, 0.25};
};

struct DeviceScoreInputs {
    double cap_proc = 0;
    double cap_store = 0;
    double cap_com = 0;
    double energy = 0;
    std::array<double, 4> weights{0.25, 0.25, 0.25, 0.25};
};

double reputation_score(const ReputationInputs& in);
double device_score(const DeviceScoreInputs& in);

// Highest score wins; ties break to the lowest id. Empty input is an error.
int select_validator(std::span<const std::pair<int, double>> scores);

struct Classification {
    std::vector<int> gld_ids;  // score above threshold: trains locally
    std::vector<int> bld_ids;  // score at or below threshold: gets a DT
};

Classification classify_devices(std::span<const std::pair<int, double>> device_scores,
                                double threshold);

}  // namespace dtfl::scoring
