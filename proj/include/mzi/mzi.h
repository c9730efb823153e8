#ifndef MZI_MZI_H
#define MZI_MZI_H

/* C interface to the nested interferometer simulator.
 *
 * Every call returns an mzi_status; on failure mzi_last_error() describes the
 * most recent error on the calling thread. Strings returned through out
 * parameters are owned by the caller and released with mzi_string_free. */

#include <stddef.h>

#if defined(MZI_BUILDING_LIBRARY)
#define MZI_API __attribute__((visibility("default")))
#else
#define MZI_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mzi_status {
  MZI_OK = 0,
  MZI_INVALID_PARAMETER = 1,
  MZI_POST_SELECTION_SINGULAR = 2,
  MZI_RAMP_UNRESOLVED = 3,
  MZI_FREQ_OUT_OF_RANGE = 4,
  MZI_DEGENERATE_SWEEP = 5,
  MZI_UNKNOWN_SCENARIO = 6,
  MZI_INVALID_OVERRIDE = 7,
  MZI_INVALID_PARAM_PATH = 8,
  MZI_CONFIG_ERROR = 9,
  MZI_IO_ERROR = 10,
  MZI_INTERNAL_ERROR = 99
} mzi_status;

typedef struct mzi_scenario mzi_scenario;
typedef struct mzi_report mzi_report;

typedef enum mzi_port { MZI_PORT_E = 0, MZI_PORT_A, MZI_PORT_B, MZI_PORT_C, MZI_PORT_F } mzi_port;

MZI_API const char* mzi_last_error(void);
MZI_API const char* mzi_status_name(mzi_status status);
MZI_API void mzi_string_free(char* s);

/* Scenarios */
MZI_API size_t mzi_builtin_count(void);
MZI_API const char* mzi_builtin_name(size_t i);
MZI_API mzi_status mzi_scenario_builtin(const char* name, mzi_scenario** out);
MZI_API mzi_status mzi_scenario_parse(const char* json_text, mzi_scenario** out);
MZI_API mzi_status mzi_scenario_load(const char* path, mzi_scenario** out);
MZI_API mzi_status mzi_scenario_set(mzi_scenario* s, const char* param, double value);
MZI_API mzi_status mzi_scenario_get(const mzi_scenario* s, const char* param, double* out);
MZI_API mzi_status mzi_scenario_emit(const mzi_scenario* s, char** json_out);
/* Sweep stored in the scenario document, if any; count is 0 without one. */
MZI_API mzi_status mzi_scenario_sweep_spec(const mzi_scenario* s, const char** param, const double** values,
                                           size_t* count);
MZI_API void mzi_scenario_free(mzi_scenario* s);

/* Weak values */
MZI_API mzi_status mzi_weak_value(const mzi_scenario* s, mzi_port port, double* re, double* im);
MZI_API mzi_status mzi_joint_weak_value(const mzi_scenario* s, mzi_port p1, mzi_port p2, double* re,
                                        double* im);
MZI_API mzi_status mzi_weak_values_json(const mzi_scenario* s, char** json_out);

/* Experiments */
MZI_API mzi_status mzi_run(const mzi_scenario* s, mzi_report** out);
MZI_API mzi_status mzi_sweep(const mzi_scenario* s, const char* param, const double* values, size_t count,
                             mzi_report** out);
MZI_API int mzi_report_all_pass(const mzi_report* r);
MZI_API size_t mzi_report_verdict_count(const mzi_report* r);
MZI_API mzi_status mzi_report_verdict(const mzi_report* r, size_t i, const char** claim, int* pass,
                                      double* measured, double* limit);
MZI_API mzi_status mzi_report_json(const mzi_report* r, char** json_out);
MZI_API mzi_status mzi_report_write(const mzi_report* r, const char* dir, int dump_timeseries);
MZI_API void mzi_report_free(mzi_report* r);

#ifdef __cplusplus
}
#endif

#endif
