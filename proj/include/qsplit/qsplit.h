#ifndef QSPLIT_QSPLIT_H
#define QSPLIT_QSPLIT_H

/* C interface to the qsplit solver. Every call returns a status; on failure
 * qsplit_last_error() holds a message for the calling thread until its next
 * call into the library. Handles are opaque and owned by the caller. */

#if defined(_WIN32)
#  if defined(QSPLIT_BUILDING)
#    define QSPLIT_API __declspec(dllexport)
#  else
#    define QSPLIT_API __declspec(dllimport)
#  endif
#else
#  define QSPLIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qsplit_status {
    QSPLIT_OK = 0,
    QSPLIT_INVALID_ARGUMENT = 1,
    QSPLIT_UNSUPPORTED_SIZE = 2,
    QSPLIT_INTEGRATION_FAILURE = 3,
    QSPLIT_NONCONVERGENCE = 4,
    QSPLIT_SINGULARITY_CONTACT = 5,
    QSPLIT_STRUCTURE_VIOLATION = 6,
    QSPLIT_INVALID_BRACKET = 7,
    QSPLIT_INCONCLUSIVE = 8,
    QSPLIT_IO = 9,
    QSPLIT_INTERNAL = 10
} qsplit_status;

typedef struct qsplit_config qsplit_config;
typedef struct qsplit_trajectory qsplit_trajectory;

typedef struct qsplit_run_summary {
    int quenched;
    double quench_time;      /* accumulated sum of tau */
    int steps;
    double tau0;
    double bound_sigma_tau;
    int violations;
    int hard_violations;
} qsplit_run_summary;

QSPLIT_API const char* qsplit_status_name(qsplit_status status);
QSPLIT_API const char* qsplit_last_error(void);

/* Configuration: the JSON document described in the README. */
QSPLIT_API qsplit_status qsplit_config_default(qsplit_config** out);
QSPLIT_API qsplit_status qsplit_config_parse(const char* json_text, qsplit_config** out);
QSPLIT_API qsplit_status qsplit_config_load(const char* path, qsplit_config** out);
QSPLIT_API void qsplit_config_free(qsplit_config* cfg);
/* Builds the problem and runs the admissibility checks without solving. */
QSPLIT_API qsplit_status qsplit_config_check(const qsplit_config* cfg);
QSPLIT_API int qsplit_config_size(const qsplit_config* cfg);

/* One splitting step from u (length n) on the configured grid; writes the
 * next state and the step used. */
QSPLIT_API qsplit_status qsplit_step(const qsplit_config* cfg, const double* u, int n, double* u_next,
                                     double* tau_used);

/* Full run to quench with the config's run section. A hard monitor failure
 * still yields a trajectory and returns QSPLIT_STRUCTURE_VIOLATION. */
QSPLIT_API qsplit_status qsplit_run(const qsplit_config* cfg, qsplit_trajectory** out);
QSPLIT_API void qsplit_trajectory_free(qsplit_trajectory* traj);
QSPLIT_API qsplit_status qsplit_trajectory_summary(const qsplit_trajectory* traj, qsplit_run_summary* out);
/* Copies the final state; *n receives its length even when capacity is too small. */
QSPLIT_API qsplit_status qsplit_trajectory_final_state(const qsplit_trajectory* traj, double* out, int capacity,
                                                       int* n);
QSPLIT_API qsplit_status qsplit_trajectory_write_csv(const qsplit_trajectory* traj, const char* path);
QSPLIT_API qsplit_status qsplit_trajectory_write_summary(const qsplit_trajectory* traj, const char* path);

/* Modes. Each writes its files under out_dir (created when missing). */
QSPLIT_API qsplit_status qsplit_mode_run(const qsplit_config* cfg, const char* out_dir);
QSPLIT_API qsplit_status qsplit_mode_converge_time(const qsplit_config* cfg, const char* out_dir, double* order);
QSPLIT_API qsplit_status qsplit_mode_converge_space(const qsplit_config* cfg, const char* out_dir, double* order);
QSPLIT_API qsplit_status qsplit_mode_critical_a(const qsplit_config* cfg, const char* out_dir, double* a_star);
QSPLIT_API qsplit_status qsplit_mode_validate(const qsplit_config* cfg, const char* out_dir, int* all_pass);

#ifdef __cplusplus
}
#endif

#endif
