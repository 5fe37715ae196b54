#pragma once

#include <string>

#include "scenario.hpp"

namespace dtfl::driver {

// Writes q_sweep.csv, lambda_trace.csv and summary.json under out_dir.
// File contents are fully assembled before anything touches disk, so a
// failing solve leaves no partial outputs.
void run_solve(const ScenarioConfig& cfg, const std::string& out_dir);

// Writes rounds.ndjson, ledger.ndjson, blocks.csv and accuracy.csv.
void run_sim(const ScenarioConfig& cfg, const std::string& out_dir);

struct ProbeResult {
    std::string name;
    bool passed = false;
    std::string details_json;  // machine-readable, includes any counterexample
};

struct VerifyReport {
    std::vector<ProbeResult> probes;
    bool all_passed = false;
    std::string to_json() const;
};

// Oracle-equivalence, convexity and pivot-uniqueness probes on the scenario.
VerifyReport run_verify(const ScenarioConfig& cfg);

}  // namespace dtfl::driver
