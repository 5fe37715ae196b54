#include "scoring.hpp"

#include <cmath>
#include <string>

#include "util.hpp"

namespace dtfl::scoring {

namespace {

void check_component(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
        throw ConfigError(std::string(name) + " must lie in [0, 1], got " + fmt9(v));
}

void check_weights(const std::array<double, 4>& w) {
    double sum = 0.0;
    for (double x : w) {
        if (!(x >= 0.0) || !std::isfinite(x))
            throw ConfigError("score weights must be nonnegative");
        sum += x;
    }
    if (!(sum > 0.0)) throw ConfigError("score weights must not all be zero");
}

}  // namespace

double reputation_score(const ReputationInputs& in) {
    check_component(in.cap_enc, "cap_enc");
    check_component(in.cap_rou, "cap_rou");
    check_component(in.prop, "prop");
    check_component(in.hist, "hist");
    check_weights(in.weights);
    return in.weights[0] * in.cap_enc + in.weights[1] * in.cap_rou +
           in.weights[2] * (1.0 - in.prop) + in.weights[3] * in.hist;
}

double device_score(const DeviceScoreInputs& in) {
    check_component(in.cap_proc, "cap_proc");
    check_component(in.cap_store, "cap_store");
    check_component(in.cap_com, "cap_com");
    check_component(in.energy, "energy");
    check_weights(in.weights);
    return in.weights[0] * in.cap_proc + in.weights[1] * in.cap_store +
           in.weights[2] * in.cap_com + in.weights[3] * in.energy;
}

int select_validator(std::span<const std::pair<int, double>> scores) {
    if (scores.empty()) throw ConfigError("select_validator: no candidates");
    int best_id = scores.front().first;
    double best = scores.front().second;
    for (const auto& [id, s] : scores.subspan(1)) {
        if (s > best || (s == best && id < best_id)) {
            best = s;
            best_id = id;
        }
    }
    return best_id;
}

Classification classify_devices(std::span<const std::pair<int, double>> device_scores,
                                double threshold) {
    Classification out;
    for (const auto& [id, score] : device_scores) {
        if (score <= threshold)
            out.bld_ids.push_back(id);
        else
            out.gld_ids.push_back(id);
    }
    return out;
}

}  // namespace dtfl::scoring
