#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedsim.hpp"
#include "model.hpp"
#include "optimizer.hpp"

namespace dtfl {

// Parsed, validated scenario. Every run is a pure function of this plus the
// seed it carries.
struct ScenarioConfig {
    model::SystemParams sys;
    std::vector<model::GldProfile> glds;
    std::vector<model::BldProfile> blds;
    int clusters = 1;
    opt::SolverConfig solver;
    fedsim::ScoringTables scoring;
    fedsim::SimParams sim;  // clusters/seed duplicated here for the simulator
    int rounds = 0;
    std::uint64_t seed = 0;
    int verify_trials = 1000;  // pivot-uniqueness trials for the verify command

    static ScenarioConfig from_json_text(const std::string& text);
    static ScenarioConfig from_file(const std::string& path);

    fedsim::SimParams sim_params() const;
};

}  // namespace dtfl
