#ifndef FFDIRAC_H
#define FFDIRAC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible call.
typedef enum FfdStatus {
  FFD_STATUS_OK = 0,
  FFD_STATUS_NULL_POINTER = 1,
  FFD_STATUS_INVALID_UTF8 = 2,
  FFD_STATUS_INVALID_CONFIG = 3,
  FFD_STATUS_SIMULATION = 4,
  FFD_STATUS_IO = 5,
  FFD_STATUS_PANIC = 6,
} FfdStatus;

// Validated run configuration.
typedef struct FfdConfig FfdConfig;

// Result of a completed run.
typedef struct FfdReport FfdReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses and validates a TOML configuration.
//
// # Safety
// `toml` must be a NUL-terminated string and `out` a valid pointer.
enum FfdStatus ffd_config_from_toml(const char *toml, struct FfdConfig **out);

// Configuration of a named preset (`"fig1"` or `"fig2"`).
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum FfdStatus ffd_config_preset(const char *name, struct FfdConfig **out);

// Sets the directory [`ffd_report_write`] uses when given `NULL`.
//
// # Safety
// `config` must come from this library; `dir` must be NUL-terminated.
enum FfdStatus ffd_config_set_output_dir(struct FfdConfig *config, const char *dir);

// # Safety
// `config` must come from this library or be null.
void ffd_config_free(struct FfdConfig *config);

// Runs the unperturbed and fast-forward evolutions.
//
// # Safety
// `config` must come from this library and `out` be a valid pointer.
enum FfdStatus ffd_run(const struct FfdConfig *config, struct FfdReport **out);

// Whether every threshold check passed.
//
// # Safety
// `report` must come from this library.
enum FfdStatus ffd_report_passed(const struct FfdReport *report, bool *out);

// Final fast-forward and unperturbed fidelities.
//
// # Safety
// `report` must come from this library; both outputs must be valid.
enum FfdStatus ffd_report_fidelities(const struct FfdReport *report,
                                     double *ff,
                                     double *unperturbed);

// Negative-branch populations; NaN when the field is not homogeneous.
//
// # Safety
// `report` must come from this library; both outputs must be valid.
enum FfdStatus ffd_report_pair_production(const struct FfdReport *report,
                                          double *ff,
                                          double *unperturbed);

// Summary as a JSON string; release it with [`ffd_string_free`].
//
// # Safety
// `report` must come from this library and `out` be a valid pointer.
enum FfdStatus ffd_report_summary_json(const struct FfdReport *report, char **out);

// Writes the output files to `dir`, or to the configured directory when
// `dir` is null.
//
// # Safety
// `report` must come from this library; `dir` must be null or NUL-terminated.
enum FfdStatus ffd_report_write(const struct FfdReport *report, const char *dir);

// # Safety
// `report` must come from this library or be null.
void ffd_report_free(struct FfdReport *report);

// # Safety
// `s` must come from this library or be null.
void ffd_string_free(char *s);

// Message of the last failure on this thread, or null. Valid until the next
// call into the library from the same thread.
const char *ffd_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FFDIRAC_H */
