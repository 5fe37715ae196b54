#include "dtfl/dtfl.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include <json.hpp>

#include "driver.hpp"
#include "optimizer.hpp"
#include "scenario.hpp"
#include "util.hpp"

struct dtfl_scenario {
    dtfl::ScenarioConfig cfg;
};

struct dtfl_solution {
    dtfl::model::Solution sol;
};

namespace {

thread_local std::string g_last_error;

dtfl_status set_error(dtfl_status st, const std::string& msg) {
    g_last_error = msg;
    return st;
}

template <typename Fn>
dtfl_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const dtfl::ConfigError& e) {
        return set_error(DTFL_ERR_CONFIG, e.what());
    } catch (const dtfl::InfeasibleError& e) {
        return set_error(DTFL_ERR_INFEASIBLE, e.what());
    } catch (const dtfl::ConvergenceError& e) {
        return set_error(DTFL_ERR_NO_CONVERGENCE, e.what());
    } catch (const std::invalid_argument& e) {
        return set_error(DTFL_ERR_INVALID_ARG, e.what());
    } catch (const std::domain_error& e) {
        return set_error(DTFL_ERR_INVALID_ARG, e.what());
    } catch (const std::exception& e) {
        return set_error(DTFL_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(DTFL_ERR_INTERNAL, "unknown error");
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* dtfl_version(void) { return "1.0.0"; }

const char* dtfl_status_name(dtfl_status status) {
    switch (status) {
        case DTFL_OK: return "ok";
        case DTFL_ERR_INVALID_ARG: return "invalid_argument";
        case DTFL_ERR_CONFIG: return "config_error";
        case DTFL_ERR_INFEASIBLE: return "infeasible";
        case DTFL_ERR_NO_CONVERGENCE: return "no_convergence";
        case DTFL_ERR_IO: return "io_error";
        case DTFL_ERR_INTERNAL: return "internal_error";
    }
    return "unknown";
}

const char* dtfl_last_error(void) { return g_last_error.c_str(); }

dtfl_status dtfl_scenario_load_file(const char* path, dtfl_scenario** out) {
    if (!path || !out) return set_error(DTFL_ERR_INVALID_ARG, "null argument");
    *out = nullptr;
    return guarded([&] {
        auto* s = new dtfl_scenario{dtfl::ScenarioConfig::from_file(path)};
        *out = s;
        return DTFL_OK;
    });
}

dtfl_status dtfl_scenario_load_json(const char* json_text, dtfl_scenario** out) {
    if (!json_text || !out) return set_error(DTFL_ERR_INVALID_ARG, "null argument");
    *out = nullptr;
    return guarded([&] {
        auto* s = new dtfl_scenario{dtfl::ScenarioConfig::from_json_text(json_text)};
        *out = s;
        return DTFL_OK;
    });
}

void dtfl_scenario_free(dtfl_scenario* s) { delete s; }

dtfl_status dtfl_scenario_set_seed(dtfl_scenario* s, unsigned long long seed) {
    if (!s) return set_error(DTFL_ERR_INVALID_ARG, "null scenario");
    s->cfg.seed = seed;
    s->cfg.sim.seed = seed;
    return DTFL_OK;
}

dtfl_status dtfl_scenario_set_rounds(dtfl_scenario* s, unsigned rounds) {
    if (!s) return set_error(DTFL_ERR_INVALID_ARG, "null scenario");
    s->cfg.rounds = static_cast<int>(rounds);
    s->cfg.sim.rounds = static_cast<int>(rounds);
    return DTFL_OK;
}

dtfl_status dtfl_scenario_set_q_step(dtfl_scenario* s, double q_step_w) {
    if (!s) return set_error(DTFL_ERR_INVALID_ARG, "null scenario");
    if (!(q_step_w > 0)) return set_error(DTFL_ERR_INVALID_ARG, "q_step must be > 0");
    s->cfg.solver.q_step_w = q_step_w;
    return DTFL_OK;
}

dtfl_status dtfl_scenario_set_verification(dtfl_scenario* s, int enabled) {
    if (!s) return set_error(DTFL_ERR_INVALID_ARG, "null scenario");
    s->cfg.sim.verification = enabled != 0;
    return DTFL_OK;
}

dtfl_status dtfl_solve(const dtfl_scenario* s, dtfl_solution** out) {
    if (!s || !out) return set_error(DTFL_ERR_INVALID_ARG, "null argument");
    *out = nullptr;
    return guarded([&] {
        auto res = dtfl::opt::solve_p(s->cfg.glds, s->cfg.blds, s->cfg.sys, s->cfg.solver);
        *out = new dtfl_solution{std::move(res.best)};
        return DTFL_OK;
    });
}

void dtfl_solution_free(dtfl_solution* sol) { delete sol; }

double dtfl_solution_total_delay(const dtfl_solution* sol) {
    return sol ? sol->sol.t_total : 0.0;
}
double dtfl_solution_q_star(const dtfl_solution* sol) { return sol ? sol->sol.q_agg_w : 0.0; }
double dtfl_solution_y(const dtfl_solution* sol) { return sol ? sol->sol.y : 0.0; }
double dtfl_solution_t_up_g(const dtfl_solution* sol) { return sol ? sol->sol.t_up_g : 0.0; }
double dtfl_solution_t_up_b(const dtfl_solution* sol) { return sol ? sol->sol.t_up_b : 0.0; }

size_t dtfl_solution_gld_count(const dtfl_solution* sol) {
    return sol ? sol->sol.jam_w.size() : 0;
}

size_t dtfl_solution_jamming(const dtfl_solution* sol, double* out, size_t cap) {
    if (!sol || !out) return 0;
    const size_t n = sol->sol.jam_w.size() < cap ? sol->sol.jam_w.size() : cap;
    for (size_t i = 0; i < n; ++i) out[i] = sol->sol.jam_w[i];
    return n;
}

dtfl_status dtfl_solution_summary_json(const dtfl_solution* sol, char** out) {
    if (!sol || !out) return set_error(DTFL_ERR_INVALID_ARG, "null argument");
    return guarded([&] {
        nlohmann::json j;
        j["T_star"] = dtfl::quantize9(sol->sol.t_total);
        j["Q_star"] = dtfl::quantize9(sol->sol.q_agg_w);
        j["y"] = dtfl::quantize9(sol->sol.y);
        j["t_up_G"] = dtfl::quantize9(sol->sol.t_up_g);
        j["t_up_B"] = dtfl::quantize9(sol->sol.t_up_b);
        nlohmann::json q = nlohmann::json::array();
        for (double x : sol->sol.jam_w) q.push_back(dtfl::quantize9(x));
        j["q"] = q;
        *out = dup_string(j.dump());
        return *out ? DTFL_OK : set_error(DTFL_ERR_INTERNAL, "allocation failed");
    });
}

void dtfl_string_free(char* s) { std::free(s); }

dtfl_status dtfl_run_solve(const dtfl_scenario* s, const char* out_dir) {
    if (!s || !out_dir) return set_error(DTFL_ERR_INVALID_ARG, "null argument");
    return guarded([&] {
        dtfl::driver::run_solve(s->cfg, out_dir);
        return DTFL_OK;
    });
}

dtfl_status dtfl_run_sim(const dtfl_scenario* s, const char* out_dir) {
    if (!s || !out_dir) return set_error(DTFL_ERR_INVALID_ARG, "null argument");
    return guarded([&] {
        dtfl::driver::run_sim(s->cfg, out_dir);
        return DTFL_OK;
    });
}

dtfl_status dtfl_run_verify(const dtfl_scenario* s, char** report_json, int* all_passed) {
    if (!s) return set_error(DTFL_ERR_INVALID_ARG, "null scenario");
    return guarded([&] {
        const auto rep = dtfl::driver::run_verify(s->cfg);
        if (report_json) {
            *report_json = dup_string(rep.to_json());
            if (!*report_json) return set_error(DTFL_ERR_INTERNAL, "allocation failed");
        }
        if (all_passed) *all_passed = rep.all_passed ? 1 : 0;
        return DTFL_OK;
    });
}

}  // extern "C"
