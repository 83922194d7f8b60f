/* C API for the banditlab shared library: censored-bandit simulation,
 * UCB policies, and effective-dimension analytics.
 *
 * Conventions: functions return BL_OK (0) on success and a nonzero status
 * otherwise; bl_last_error() describes the most recent failure on the calling
 * thread. Strings returned through char** are owned by the caller and must be
 * released with bl_string_free().
 */
#ifndef BANDITLAB_H
#define BANDITLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define BL_OK 0
#define BL_E_BOUND 1    /* experiment ran but an internal bound check failed */
#define BL_E_CONFIG 2   /* invalid configuration */
#define BL_E_INVALID 3  /* invalid argument */
#define BL_E_INTERNAL 4 /* unexpected internal error */

const char* bl_version(void);

/* Thread-local message for the last failing call on this thread. */
const char* bl_last_error(void);

void bl_string_free(char* s);

/* ------------------------------------------------------------------ *
 * Experiment harness. Configs are JSON documents; see the README for the
 * schema. `kind` may be NULL (taken from the config) and must match the
 * config when both are given. Artifacts are written under the resolved
 * output directory; the summary JSON is returned on request.
 * ------------------------------------------------------------------ */
int bl_validate(const char* config_json, char** out_report_json);
int bl_run(const char* config_json, const char* kind, const char* out_dir,
           int has_seed_override, uint64_t seed_override, int jobs,
           char** out_summary_json);

/* ------------------------------------------------------------------ *
 * Effective-dimension analytics.
 * ------------------------------------------------------------------ */
int bl_deff_mab(const double* p, int d, const double* per_arm_sigma_or_null, double* out);
int bl_gamma_alpha(const double* p, int d, double alpha, double* out);
int bl_water_filling(const double* p, const double* lambdas, int d, double budget,
                     double alpha, double* out_tau, double* out_level, double* out_value);

/* model_json: {"angles": [...], "probs": [...], "u": [...]} or the censorship
 * JSON form with "kind": "multi_threshold". Returns the trajectory report. */
int bl_mt_trajectory(const char* model_json, double lambda, char** out_json);

/* ------------------------------------------------------------------ *
 * Online policy handles.
 * ------------------------------------------------------------------ */
typedef struct bl_mab_ucb bl_mab_ucb;

bl_mab_ucb* bl_mab_ucb_create(int d, double lambda, double sigma, long long horizon,
                              double theta_inf_bound);
void bl_mab_ucb_free(bl_mab_ucb* h);
int bl_mab_ucb_index(const bl_mab_ucb* h, int arm, double* out);
int bl_mab_ucb_select(const bl_mab_ucb* h, const int32_t* available, int n_available,
                      int32_t* out_arm);
int bl_mab_ucb_update(bl_mab_ucb* h, int arm, double reward, int realized);

typedef struct bl_lcb_ucb bl_lcb_ucb;

bl_lcb_ucb* bl_lcb_ucb_create(int d, double lambda, double sigma, double delta,
                              double theta_l2_bound);
void bl_lcb_ucb_free(bl_lcb_ucb* h);
int bl_lcb_ucb_beta(const bl_lcb_ucb* h, double* out);
/* actions: m rows of d coordinates, row-major. Writes the selected row index. */
int bl_lcb_ucb_select(const bl_lcb_ucb* h, const double* actions, int m, int d,
                      int32_t* out_index);
int bl_lcb_ucb_update(bl_lcb_ucb* h, const double* action, int d, double reward,
                      int realized);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BANDITLAB_H */
