/*
 * dtfl - delay-optimized digital-twin federated learning toolkit.
 *
 * C interface to the scheduling solver, the round simulator and the
 * verification probes. All objects are opaque handles; every call that can
 * fail returns a dtfl_status, with a human-readable message available from
 * dtfl_last_error() until the next failing call on the same thread.
 */
#ifndef DTFL_H
#define DTFL_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dtfl_status {
    DTFL_OK = 0,
    DTFL_ERR_INVALID_ARG = 1,
    DTFL_ERR_CONFIG = 2,      /* unreadable or schema-invalid scenario */
    DTFL_ERR_INFEASIBLE = 3,  /* no feasible schedule for the instance */
    DTFL_ERR_NO_CONVERGENCE = 4,
    DTFL_ERR_IO = 5,
    DTFL_ERR_INTERNAL = 6
} dtfl_status;

typedef struct dtfl_scenario dtfl_scenario;
typedef struct dtfl_solution dtfl_solution;

const char* dtfl_version(void);
const char* dtfl_status_name(dtfl_status status);
const char* dtfl_last_error(void);

/* ---- scenario lifecycle ---- */

dtfl_status dtfl_scenario_load_file(const char* path, dtfl_scenario** out);
dtfl_status dtfl_scenario_load_json(const char* json_text, dtfl_scenario** out);
void dtfl_scenario_free(dtfl_scenario* s);

/* Overrides applied on top of the loaded configuration. */
dtfl_status dtfl_scenario_set_seed(dtfl_scenario* s, unsigned long long seed);
dtfl_status dtfl_scenario_set_rounds(dtfl_scenario* s, unsigned rounds);
dtfl_status dtfl_scenario_set_q_step(dtfl_scenario* s, double q_step_w);
dtfl_status dtfl_scenario_set_verification(dtfl_scenario* s, int enabled);

/* ---- delay optimization ---- */

dtfl_status dtfl_solve(const dtfl_scenario* s, dtfl_solution** out);
void dtfl_solution_free(dtfl_solution* sol);

double dtfl_solution_total_delay(const dtfl_solution* sol);
double dtfl_solution_q_star(const dtfl_solution* sol);
double dtfl_solution_y(const dtfl_solution* sol);
double dtfl_solution_t_up_g(const dtfl_solution* sol);
double dtfl_solution_t_up_b(const dtfl_solution* sol);
size_t dtfl_solution_gld_count(const dtfl_solution* sol);
/* Copies up to cap jamming powers (W, device order); returns count copied. */
size_t dtfl_solution_jamming(const dtfl_solution* sol, double* out, size_t cap);
/* Serialized summary; free with dtfl_string_free. */
dtfl_status dtfl_solution_summary_json(const dtfl_solution* sol, char** out);

void dtfl_string_free(char* s);

/* ---- command drivers (write the documented output files) ---- */

dtfl_status dtfl_run_solve(const dtfl_scenario* s, const char* out_dir);
dtfl_status dtfl_run_sim(const dtfl_scenario* s, const char* out_dir);
/* report_json (optional) receives the probe table; all_passed is 0/1. */
dtfl_status dtfl_run_verify(const dtfl_scenario* s, char** report_json, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif /* DTFL_H */
