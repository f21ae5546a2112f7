/* C API for the heteronet simulator and trainer.
 *
 * All functions return hn_status; HN_OK means success. On failure,
 * hn_last_error() returns a thread-local human-readable message describing
 * the most recent error on the calling thread. Objects are opaque handles
 * created by hn_*_create/load functions and released with the matching
 * hn_*_destroy; destroy functions accept NULL.
 */
#ifndef HETERONET_H_
#define HETERONET_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HN_API __declspec(dllexport)
#else
#define HN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hn_status {
  HN_OK = 0,
  HN_ERR_INVALID_ARGUMENT = 1, /* bad parameter or config invariant violated */
  HN_ERR_STATE = 2,            /* call not valid in the current state */
  HN_ERR_IO = 3,               /* file not found / unreadable / unwritable */
  HN_ERR_INTERNAL = 4
} hn_status;

HN_API const char* hn_status_string(hn_status status);
HN_API const char* hn_last_error(void);

/* Strings returned through char** outputs are heap-allocated; release them
 * with hn_string_free. */
HN_API void hn_string_free(char* s);

/* ---- scenario configuration ------------------------------------------- */

typedef struct hn_config hn_config;

/* Reference parameter set (2 km x 2 km, 4 clusters x 20 devices, 868 MHz). */
HN_API hn_status hn_config_create(hn_config** out);
HN_API hn_status hn_config_from_json(const char* json, hn_config** out);
HN_API hn_status hn_config_load(const char* path, hn_config** out);
HN_API hn_status hn_config_to_json(const hn_config* cfg, char** json_out);
HN_API hn_status hn_config_save(const hn_config* cfg, const char* path);
HN_API void hn_config_destroy(hn_config* cfg);

/* ---- scenario ----------------------------------------------------------*/

typedef struct hn_scenario hn_scenario;

HN_API hn_status hn_scenario_generate(const hn_config* cfg, uint64_t seed,
                                      hn_scenario** out);
HN_API hn_status hn_scenario_load(const char* path, hn_scenario** out);
HN_API hn_status hn_scenario_save(const hn_scenario* s, const char* path);
HN_API hn_status hn_scenario_counts(const hn_scenario* s, int* num_devices,
                                    int* num_uavs);
HN_API void hn_scenario_destroy(hn_scenario* s);

/* ---- environment ------------------------------------------------------ */

typedef struct hn_env hn_env;

HN_API hn_status hn_env_create(const hn_scenario* s, hn_env** out);
HN_API void hn_env_destroy(hn_env* env);

HN_API hn_status hn_env_num_agents(const hn_env* env, int* out);
/* Number of devices served by one agent. */
HN_API hn_status hn_env_cluster_size(const hn_env* env, int agent, size_t* out);
/* Observation length for one agent: 3 + 4 * cluster_size. */
HN_API hn_status hn_env_obs_dim(const hn_env* env, int agent, size_t* out);

HN_API hn_status hn_env_reset(hn_env* env, uint64_t seed);

/* Copies the current normalized observation of one agent into buf (len must
 * equal hn_env_obs_dim). Valid after reset/step. */
HN_API hn_status hn_env_observation(const hn_env* env, int agent, double* buf,
                                    size_t len);

/* One synchronized step. move_deltas has 3 doubles per agent in [-1,1];
 * sf_choices / power_choices hold one index per device, agents concatenated
 * in order (lengths = sum of cluster sizes). Outputs may be NULL except
 * done_out. rewards_out needs one slot per agent. */
HN_API hn_status hn_env_step(hn_env* env, const double* move_deltas,
                             const int* sf_choices, const int* power_choices,
                             double* rewards_out, double* global_ee_out,
                             int* done_out);

/* ---- training configuration ------------------------------------------- */

typedef struct hn_train_config hn_train_config;

HN_API hn_status hn_train_config_create(hn_train_config** out);
HN_API hn_status hn_train_config_from_json(const char* json,
                                           hn_train_config** out);
HN_API hn_status hn_train_config_load(const char* path, hn_train_config** out);
HN_API hn_status hn_train_config_to_json(const hn_train_config* cfg,
                                         char** json_out);
HN_API void hn_train_config_destroy(hn_train_config* cfg);

/* ---- experiments ------------------------------------------------------ */

/* Presets: "hetero", "ug_only", "g_only" (trained), "random",
 * "fixed_heuristic" (baselines). Writes per-seed artifacts under
 * out_root/<preset>/<seed>/ and a cross-seed summary. mean_ee_out (optional)
 * receives the cross-seed mean energy efficiency in bits/joule. */
HN_API hn_status hn_run_experiment(const hn_config* cfg,
                                   const hn_train_config* train_cfg,
                                   const char* preset, const uint64_t* seeds,
                                   size_t num_seeds, const char* out_root,
                                   int eval_episodes, double* mean_ee_out);

/* Greedy evaluation of a stored checkpoint on the scenario regenerated from
 * (cfg, preset, seed). trace_path may be NULL. */
HN_API hn_status hn_evaluate_checkpoint(const hn_config* cfg,
                                        const hn_train_config* train_cfg,
                                        const char* checkpoint_path,
                                        const char* preset, uint64_t seed,
                                        int episodes, const char* trace_path,
                                        double* mean_ee_out);

/* kind is "random" or "heuristic". */
HN_API hn_status hn_baseline_eval(const hn_config* cfg, const char* kind,
                                  uint64_t seed, int episodes,
                                  const char* trace_path, double* mean_ee_out);

/* Splits a step trace into uav_paths.tsv, devices.tsv, associations.tsv. */
HN_API hn_status hn_export_trace(const char* trace_path, const char* out_dir);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* HETERONET_H_ */
