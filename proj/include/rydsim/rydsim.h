/* C interface to the rydsim simulator. Every call returns a status code; on
 * failure rydsim_last_error() describes the problem (per calling thread).
 * Strings handed out by the library are released with rydsim_string_free. */
#ifndef RYDSIM_H
#define RYDSIM_H

#include <stddef.h>

#if defined(_WIN32)
#define RYDSIM_API __declspec(dllexport)
#else
#define RYDSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rydsim_status {
  RYDSIM_OK = 0,
  RYDSIM_ERR_INVALID_ARGUMENT = 1,
  RYDSIM_ERR_DOMAIN = 2,
  RYDSIM_ERR_INFEASIBLE = 3,
  RYDSIM_ERR_DEGENERATE = 4,
  RYDSIM_ERR_NUMERIC = 5,
  RYDSIM_ERR_INTEGRATION = 6,
  RYDSIM_ERR_CONTRACT = 7,
  RYDSIM_ERR_PARSE = 8,
  RYDSIM_ERR_INTERNAL = 9
} rydsim_status;

typedef enum rydsim_scheme {
  RYDSIM_SCHEME_STA = 0,
  RYDSIM_SCHEME_ADIABATIC = 1,
  RYDSIM_SCHEME_NONADIABATIC = 2
} rydsim_scheme;

typedef enum rydsim_axis {
  RYDSIM_AXIS_OMEGA_REL = 0,
  RYDSIM_AXIS_DELTA_REL = 1,
  RYDSIM_AXIS_DELTA_ABS = 2
} rydsim_axis;

#define RYDSIM_MAX_TARGETS 4

/* Frequencies in rad/us, times in us. */
typedef struct rydsim_scheme_params {
  int scheme;          /* rydsim_scheme */
  int n_qubits;        /* 2..5 (STA), 2 otherwise */
  int n_thetas;        /* 0: pi on every target */
  double thetas[RYDSIM_MAX_TARGETS];
  double t_f;
  double omega0;
  double delta0;
  double tau;
  double omega_n;      /* 0: STA peak Rabi frequency at t_f */
  double t_step;
  double V;
  double V1;
} rydsim_scheme_params;

typedef struct rydsim_integrator {
  int adaptive;            /* 0: fixed-step RK4, 1: adaptive DP5(4) */
  int steps_per_segment;
  double max_step_phase;
  double tolerance;
  int sample_count;        /* > 0 records a trajectory */
} rydsim_integrator;

typedef struct rydsim_noise {
  double gamma_r0;
  double gamma_r1;
} rydsim_noise;

typedef struct rydsim_sweep_config {
  rydsim_scheme_params physics;
  int axis;                /* rydsim_axis */
  double min;
  double max;
  int count;
  int noisy;               /* 0: closed system */
  rydsim_noise noise;
  rydsim_integrator integrator;
  int threads;             /* 0: automatic */
} rydsim_sweep_config;

typedef struct rydsim_tau_series {
  int scheme;
  double V;
} rydsim_tau_series;

typedef struct rydsim_tau_scan_config {
  rydsim_scheme_params physics;
  const rydsim_tau_series* series;
  size_t n_series;
  const double* step_times;
  size_t n_step_times;
  int noisy;
  rydsim_noise noise;
  rydsim_integrator integrator;
  int threads;
} rydsim_tau_scan_config;

typedef struct rydsim_schedule rydsim_schedule;
typedef struct rydsim_gate_result rydsim_gate_result;
typedef struct rydsim_table rydsim_table;

RYDSIM_API const char* rydsim_version(void);
RYDSIM_API const char* rydsim_last_error(void);
RYDSIM_API const char* rydsim_status_name(rydsim_status status);
RYDSIM_API void rydsim_string_free(char* text);

/* Accepts plain rad/us ("251.33") or "<f>x2piMHz" ("40x2piMHz"). */
RYDSIM_API rydsim_status rydsim_parse_frequency(const char* text, double* out);
/* Accepts plain radians or multiples of pi: "pi", "-pi/2", "0.25pi". */
RYDSIM_API rydsim_status rydsim_parse_angle(const char* text, double* out);

RYDSIM_API void rydsim_scheme_params_default(rydsim_scheme_params* params);
RYDSIM_API void rydsim_integrator_default(rydsim_integrator* integrator);
RYDSIM_API rydsim_status rydsim_scheme_from_name(const char* name, int* scheme);
RYDSIM_API rydsim_status rydsim_axis_from_name(const char* name, int* axis);
/* On input the counts are buffer capacities; on output the full sizes. Either
 * buffer may be NULL to query sizes only. */
RYDSIM_API rydsim_status rydsim_tau_scan_defaults(rydsim_tau_series* series,
                                                  size_t* n_series,
                                                  double* step_times,
                                                  size_t* n_step_times);

/* Schedules */
RYDSIM_API rydsim_status rydsim_schedule_build(const rydsim_scheme_params* params,
                                               rydsim_schedule** out);
RYDSIM_API rydsim_status rydsim_schedule_from_json(const char* json,
                                                   rydsim_schedule** out);
RYDSIM_API rydsim_status rydsim_schedule_to_json(const rydsim_schedule* schedule,
                                                 char** out);
RYDSIM_API rydsim_status rydsim_schedule_perturb(const rydsim_schedule* schedule,
                                                 double omega_rel, double delta_rel,
                                                 double delta_abs,
                                                 rydsim_schedule** out);
RYDSIM_API double rydsim_schedule_duration(const rydsim_schedule* schedule);
RYDSIM_API int rydsim_schedule_segment_count(const rydsim_schedule* schedule);
/* Pulse table of one segment: t_us,omega_rad_per_us,delta_rad_per_us,phi_rad. */
RYDSIM_API rydsim_status rydsim_schedule_pulse_csv(const rydsim_schedule* schedule,
                                                   int segment, int points,
                                                   char** out);
/* Full Hamiltonian at time t as a CSV matrix of "re+imj" cells. */
RYDSIM_API rydsim_status rydsim_schedule_hamiltonian_csv(
    const rydsim_schedule* schedule, double t, char** out);
RYDSIM_API void rydsim_schedule_free(rydsim_schedule* schedule);

/* Gate execution on the uniform computational superposition. `noise` may be
 * NULL for a closed system. */
RYDSIM_API rydsim_status rydsim_gate_run(const rydsim_schedule* schedule,
                                         const rydsim_noise* noise,
                                         const rydsim_integrator* integrator,
                                         rydsim_gate_result** out);
RYDSIM_API double rydsim_gate_result_fidelity(const rydsim_gate_result* result);
RYDSIM_API double rydsim_gate_result_leakage(const rydsim_gate_result* result);
/* {fidelity, leakage, duration_us, phases_rad, ideal_phases_rad,
 *  basis_fidelities, worst_basis_fidelity, max_column_leakage, ...} */
RYDSIM_API rydsim_status rydsim_gate_result_json(const rydsim_gate_result* result,
                                                 char** out);
RYDSIM_API rydsim_status rydsim_gate_result_trajectory_csv(
    const rydsim_gate_result* result, int populations, char** out);
RYDSIM_API void rydsim_gate_result_free(rydsim_gate_result* result);

/* Sweeps. Failed points are NaN and counted in rydsim_table_failures. */
RYDSIM_API rydsim_status rydsim_sweep_run(const rydsim_sweep_config* config,
                                          rydsim_table** out);
RYDSIM_API rydsim_status rydsim_tau_scan_run(const rydsim_tau_scan_config* config,
                                             rydsim_table** out);
RYDSIM_API rydsim_status rydsim_table_csv(const rydsim_table* table, char** out);
RYDSIM_API size_t rydsim_table_rows(const rydsim_table* table);
RYDSIM_API double rydsim_table_value(const rydsim_table* table, size_t row);
RYDSIM_API double rydsim_table_runtime(const rydsim_table* table, size_t row);
RYDSIM_API int rydsim_table_failures(const rydsim_table* table);
RYDSIM_API size_t rydsim_table_warning_count(const rydsim_table* table);
RYDSIM_API const char* rydsim_table_warning(const rydsim_table* table, size_t index);
RYDSIM_API void rydsim_table_free(rydsim_table* table);

#ifdef __cplusplus
}
#endif

#endif /* RYDSIM_H */
