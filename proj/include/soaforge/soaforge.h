#ifndef SOAFORGE_H
#define SOAFORGE_H

/* C interface to the packed-layout benchmark library.  All entry points
 * return sf_status; on SF_ERROR the thread-local message from
 * sf_last_error() describes the failure.  Handles are opaque and must be
 * released with their matching destroy function. */

#include <stddef.h>
#include <stdint.h>

#ifdef _WIN32
#define SF_API __declspec(dllexport)
#else
#define SF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sf_status {
    SF_OK = 0,
    SF_ERROR = 1,         /* generic failure; see sf_last_error() */
    SF_INVALID_ARG = 2,   /* bad handle, key, or value */
    SF_PARSE_ERROR = 3,   /* schema text rejected */
    SF_CHECK_FAILED = 4   /* validate ran but at least one check failed */
} sf_status;

SF_API const char* sf_version(void);
SF_API const char* sf_last_error(void);

/* ---- precision formats ------------------------------------------------ */

/* Splits a total storage width (7..64) into sign/exponent/mantissa bits. */
SF_API sf_status sf_layout_for(int total_bits, int* sign_bits, int* exponent_bits,
                               int* mantissa_bits);

/* Rounds a binary64 value to the given total storage width and back. */
SF_API sf_status sf_quantize(double value, int total_bits, double* out);

/* ---- schemas ---------------------------------------------------------- */

typedef struct sf_schema sf_schema;

/* Parses schema text (a schema block plus optional kernel lines). */
SF_API sf_status sf_schema_parse(const char* text, sf_schema** out);
SF_API void sf_schema_destroy(sf_schema* schema);

SF_API sf_status sf_schema_record_bits(const sf_schema* schema, uint64_t* out);
SF_API sf_status sf_schema_field_count(const sf_schema* schema, int* out);
/* Canonical pretty-printed form; the returned buffer lives until the next
 * call on the same schema handle. */
SF_API sf_status sf_schema_print(sf_schema* schema, const char** out);

/* ---- run configuration ------------------------------------------------ */

typedef struct sf_config sf_config;

SF_API sf_status sf_config_create(sf_config** out);
SF_API void sf_config_destroy(sf_config* config);

/* String keys: schema (path), ic-csv (path), variants (comma list),
 * modes (comma list), kernels (comma list), writeback (deferred|per-access),
 * precision (comma list of widths), out (path). */
SF_API sf_status sf_config_set_string(sf_config* config, const char* key, const char* value);
/* Integer keys: particles, buffer-size, seed, threads, fault (0/1), dump (0/1). */
SF_API sf_status sf_config_set_int(sf_config* config, const char* key, int64_t value);
/* Real keys: dt, latency, bandwidth. */
SF_API sf_status sf_config_set_double(sf_config* config, const char* key, double value);

/* ---- commands --------------------------------------------------------- */

/* Each command writes its CSV (or validate report) to the configured output
 * path when `out` is set, and returns the text through *out_text.  The
 * buffer lives until the next command on the same config handle. */
SF_API sf_status sf_run_bench_transform(sf_config* config, const char** out_text);
SF_API sf_status sf_run_bench_kernels(sf_config* config, const char** out_text);
SF_API sf_status sf_run_bench_pipeline(sf_config* config, const char** out_text);
SF_API sf_status sf_run_study_truncation(sf_config* config, const char** out_text);
/* Returns SF_CHECK_FAILED when any PASS/FAIL line reports FAIL. */
SF_API sf_status sf_run_validate(sf_config* config, const char** out_text);

#ifdef __cplusplus
}
#endif

#endif /* SOAFORGE_H */
