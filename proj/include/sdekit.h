#ifndef SDEKIT_H
#define SDEKIT_H

/*
 * C interface to the sdekit shared library: experiment configs, the built-in
 * preset catalog, experiment execution, and coupled Brownian increment grids.
 *
 * All handles are opaque and owned by the caller through the matching
 * _destroy function. Functions that can fail return sdekit_status and, when
 * given a buffer, copy a NUL-terminated error message into it (truncated to
 * the buffer length). Returned const char* pointers stay valid until the
 * handle they came from is mutated or destroyed.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SDEKIT_API
#else
#define SDEKIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sdekit_status {
  SDEKIT_OK = 0,
  SDEKIT_ERR_CONFIG = 2,
  SDEKIT_ERR_DIVERGENCE = 3,
  SDEKIT_ERR_IO = 4,
} sdekit_status;

typedef struct sdekit_config sdekit_config;
typedef struct sdekit_result sdekit_result;
typedef struct sdekit_grid sdekit_grid;

SDEKIT_API const char* sdekit_version(void);

/* ---- experiment configs ---- */

SDEKIT_API sdekit_status sdekit_config_parse(const char* text, sdekit_config** out,
                                  char* errbuf, size_t errlen);
SDEKIT_API sdekit_status sdekit_config_load(const char* path, sdekit_config** out,
                                 char* errbuf, size_t errlen);

/* Replaces (or appends) one `section.key` and re-validates the whole config;
 * on failure the config is left unchanged. */
SDEKIT_API sdekit_status sdekit_config_set(sdekit_config* cfg, const char* key,
                                const char* value, char* errbuf,
                                size_t errlen);

/* Canonical flat text form. */
SDEKIT_API const char* sdekit_config_render(sdekit_config* cfg);

SDEKIT_API void sdekit_config_destroy(sdekit_config* cfg);

/* ---- preset catalog ---- */

SDEKIT_API int sdekit_preset_count(void);
SDEKIT_API const char* sdekit_preset_name(int index);  /* NULL when out of range */
SDEKIT_API const char* sdekit_preset_brief(int index);
SDEKIT_API sdekit_status sdekit_preset_config(const char* name, sdekit_config** out,
                                   char* errbuf, size_t errlen);

/* ---- running experiments ---- */

/*
 * Executes the configured experiment with `threads` workers, writing CSV
 * artifacts (plus an SVG rate plot when write_svg is nonzero) into the
 * config's output directory. A result handle is produced even when the
 * experiment fails; the status mirrors the process exit code contract
 * (0 ok, 2 config, 3 divergence, 4 I/O).
 */
SDEKIT_API sdekit_status sdekit_run(const sdekit_config* cfg, int threads, int write_svg,
                         sdekit_result** out, char* errbuf, size_t errlen);

SDEKIT_API int sdekit_result_exit_code(const sdekit_result* res);
SDEKIT_API const char* sdekit_result_failure(const sdekit_result* res); /* "" when ok */
SDEKIT_API int sdekit_result_metric_count(const sdekit_result* res);
SDEKIT_API const char* sdekit_result_metric_name(const sdekit_result* res, int index);
SDEKIT_API double sdekit_result_metric_value(const sdekit_result* res, int index);
/* 1 and *value filled when the metric exists, else 0. */
SDEKIT_API int sdekit_result_metric_find(const sdekit_result* res, const char* name,
                              double* value);
SDEKIT_API int sdekit_result_artifact_count(const sdekit_result* res);
SDEKIT_API const char* sdekit_result_artifact(const sdekit_result* res, int index);
SDEKIT_API void sdekit_result_destroy(sdekit_result* res);

/* ---- Brownian increment grids ---- */

SDEKIT_API sdekit_status sdekit_grid_generate(uint64_t seed, uint64_t path_id,
                                   int noise_dim, double horizon, int level,
                                   sdekit_grid** out, char* errbuf,
                                   size_t errlen);

/* Sums blocks of 2^by increments; partial sums are preserved bit for bit. */
SDEKIT_API sdekit_status sdekit_grid_coarsen(const sdekit_grid* fine, int by,
                                  sdekit_grid** out, char* errbuf,
                                  size_t errlen);

SDEKIT_API int64_t sdekit_grid_steps(const sdekit_grid* grid);
SDEKIT_API int sdekit_grid_noise_dim(const sdekit_grid* grid);
SDEKIT_API int sdekit_grid_level(const sdekit_grid* grid);
SDEKIT_API double sdekit_grid_h(const sdekit_grid* grid);
/* steps x noise_dim increments, row-major; valid until destroy */
SDEKIT_API const double* sdekit_grid_data(const sdekit_grid* grid);

/* Binary dump / replay ("SDEW" header + little-endian f64 payload). */
SDEKIT_API sdekit_status sdekit_grid_write(const sdekit_grid* grid, const char* path,
                                char* errbuf, size_t errlen);
SDEKIT_API sdekit_status sdekit_grid_read(const char* path, sdekit_grid** out,
                               char* errbuf, size_t errlen);

SDEKIT_API void sdekit_grid_destroy(sdekit_grid* grid);

#ifdef __cplusplus
}
#endif

#endif /* SDEKIT_H */
