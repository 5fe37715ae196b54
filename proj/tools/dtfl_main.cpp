// Command-line front end. Links only the public C API.

#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dtfl/dtfl.h"

namespace {

// 0 ok, 1 probe failure, 2 config error, 3 infeasible, 4 other
int exit_code(dtfl_status st) {
    switch (st) {
        case DTFL_OK: return 0;
        case DTFL_ERR_CONFIG: return 2;
        case DTFL_ERR_INVALID_ARG: return 2;
        case DTFL_ERR_INFEASIBLE: return 3;
        default: return 4;
    }
}

int report_failure(dtfl_status st) {
    std::fprintf(stderr, "{\"error\":\"%s\",\"message\":\"%s\"}\n", dtfl_status_name(st),
                 dtfl_last_error());
    return exit_code(st);
}

struct CommonOpts {
    std::string config;
    std::string out = "out";
    unsigned long long seed = 0;
    bool seed_set = false;
    double q_step = 0;
    unsigned rounds = 0;
    bool rounds_set = false;
    bool no_verify = false;
};

dtfl_status load_scenario(const CommonOpts& o, dtfl_scenario** s) {
    dtfl_status st = dtfl_scenario_load_file(o.config.c_str(), s);
    if (st != DTFL_OK) return st;
    if (o.seed_set) dtfl_scenario_set_seed(*s, o.seed);
    if (o.rounds_set) dtfl_scenario_set_rounds(*s, o.rounds);
    if (o.q_step > 0) {
        st = dtfl_scenario_set_q_step(*s, o.q_step);
        if (st != DTFL_OK) return st;
    }
    if (o.no_verify) dtfl_scenario_set_verification(*s, 0);
    return DTFL_OK;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_out) {
    cmd->add_option("--config", o.config, "scenario JSON file")->required();
    if (with_out) cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--seed", o.seed, "override the scenario seed")
        ->each([&o](const std::string&) { o.seed_set = true; });
    cmd->add_option("--q-step", o.q_step, "override the jamming search step (W)");
    cmd->add_option("--rounds", o.rounds, "override the simulated round count")
        ->each([&o](const std::string&) { o.rounds_set = true; });
    cmd->add_flag("--no-verify", o.no_verify, "disable blockchain verification (A/B runs)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"delay-optimized DT federated learning: solver, simulator, probes"};
    app.require_subcommand(1);

    CommonOpts solve_opts, sim_opts, verify_opts;
    CLI::App* solve = app.add_subcommand("solve", "run the delay-minimization solver");
    add_common(solve, solve_opts, true);
    CLI::App* sim = app.add_subcommand("sim", "run the federated-learning round simulator");
    add_common(sim, sim_opts, true);
    CLI::App* verify = app.add_subcommand("verify", "run the verification probes");
    add_common(verify, verify_opts, false);

    CLI11_PARSE(app, argc, argv);

    if (solve->parsed()) {
        dtfl_scenario* s = nullptr;
        dtfl_status st = load_scenario(solve_opts, &s);
        if (st == DTFL_OK) st = dtfl_run_solve(s, solve_opts.out.c_str());
        dtfl_scenario_free(s);
        if (st != DTFL_OK) return report_failure(st);
        std::printf("solve: outputs written to %s\n", solve_opts.out.c_str());
        return 0;
    }
    if (sim->parsed()) {
        dtfl_scenario* s = nullptr;
        dtfl_status st = load_scenario(sim_opts, &s);
        if (st == DTFL_OK) st = dtfl_run_sim(s, sim_opts.out.c_str());
        dtfl_scenario_free(s);
        if (st != DTFL_OK) return report_failure(st);
        std::printf("sim: outputs written to %s\n", sim_opts.out.c_str());
        return 0;
    }
    // verify
    dtfl_scenario* s = nullptr;
    dtfl_status st = load_scenario(verify_opts, &s);
    if (st != DTFL_OK) {
        dtfl_scenario_free(s);
        return report_failure(st);
    }
    char* report = nullptr;
    int all_passed = 0;
    st = dtfl_run_verify(s, &report, &all_passed);
    dtfl_scenario_free(s);
    if (st != DTFL_OK) return report_failure(st);
    const auto parsed = nlohmann::json::parse(report);
    for (const auto& probe : parsed.at("probes"))
        std::printf("%-18s %s\n", probe.at("name").get<std::string>().c_str(),
                    probe.at("passed").get<bool>() ? "PASS" : "FAIL");
    if (!all_passed) std::printf("%s\n", report);  // counterexamples, serialized
    dtfl_string_free(report);
    return all_passed ? 0 : 1;
}
