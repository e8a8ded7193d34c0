/* C interface to the relhyp library: opaque handles and status codes. */
#ifndef RELHYP_RELHYP_H
#define RELHYP_RELHYP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RELHYP_BUILDING)
#    define RELHYP_API __declspec(dllexport)
#  else
#    define RELHYP_API __declspec(dllimport)
#  endif
#else
#  define RELHYP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as CLI exit codes for 1 to 3. */
typedef enum relhyp_status {
    RELHYP_OK = 0,
    RELHYP_ERR_PARSE = 1,
    RELHYP_ERR_CAP = 2,
    RELHYP_ERR_ASSERTION = 3,
    RELHYP_ERR_INVALID = 4,
    RELHYP_ERR_IO = 5,
    RELHYP_ERR_INTERNAL = 6
} relhyp_status;

typedef struct relhyp_config relhyp_config;
typedef struct relhyp_result relhyp_result;
typedef struct relhyp_graph relhyp_graph;

RELHYP_API const char* relhyp_version(void);
RELHYP_API const char* relhyp_report_format_version(void);
RELHYP_API const char* relhyp_graph_format_version(void);

/* Message of the last failing call on this thread; empty after a success. */
RELHYP_API const char* relhyp_last_error(void);

/* Run configuration. Keys: spec, radius, depth, cutoff-L, threshold-K, seed.
   Values are text as given on the command line; bad values give RELHYP_ERR_PARSE. */
RELHYP_API relhyp_status relhyp_config_new(relhyp_config** out);
RELHYP_API relhyp_status relhyp_config_set(relhyp_config* config, const char* key, const char* value);
RELHYP_API void relhyp_config_free(relhyp_config* config);

RELHYP_API size_t relhyp_suite_count(void);
/* NULL when index is out of range. */
RELHYP_API const char* relhyp_suite_name(size_t index);

/* Each command returns RELHYP_OK with a result, which may itself report a failed
   or cap-blocked check, or an error status with no result. The group spec file named
   in the config is read at call time. */
RELHYP_API relhyp_status relhyp_verify(const relhyp_config* config, const char* suite, relhyp_result** out);
RELHYP_API relhyp_status relhyp_build_space(const relhyp_config* config, relhyp_result** out);
RELHYP_API relhyp_status relhyp_embed(const relhyp_config* config, relhyp_result** out);
RELHYP_API relhyp_status relhyp_report_bundle(const relhyp_config* config, relhyp_result** out);

/* 0 when every check passed, 3 after a failed check, 2 when only cap-blocked checks remain. */
RELHYP_API int relhyp_result_exit_code(const relhyp_result* result);
/* The JSON report; owned by the result. */
RELHYP_API const char* relhyp_result_json(const relhyp_result* result);
RELHYP_API size_t relhyp_result_artifact_count(const relhyp_result* result);
RELHYP_API const char* relhyp_result_artifact_name(const relhyp_result* result, size_t index);
RELHYP_API const char* relhyp_result_artifact_data(const relhyp_result* result, size_t index, size_t* size);
/* Writes <stem>.json and every artifact into out_dir, creating it if needed. */
RELHYP_API relhyp_status relhyp_result_write(const relhyp_result* result, const char* out_dir, const char* stem);
RELHYP_API void relhyp_result_free(relhyp_result* result);

/* Graph files: "V E" header, then "u v length" lines. */
RELHYP_API relhyp_status relhyp_graph_read(const char* path, relhyp_graph** out);
RELHYP_API size_t relhyp_graph_num_vertices(const relhyp_graph* graph);
RELHYP_API size_t relhyp_graph_num_edges(const relhyp_graph* graph);
/* Shortest-path distance; infinity when disconnected. */
RELHYP_API relhyp_status relhyp_graph_distance(const relhyp_graph* graph, uint32_t u, uint32_t v, double* out);
/* Four-point delta over all quadruples when they fit in budget, otherwise over
   budget quadruples drawn with the seed. */
RELHYP_API relhyp_status relhyp_graph_four_point_delta(const relhyp_graph* graph, uint64_t budget, uint64_t seed,
                                                       double* out);
RELHYP_API void relhyp_graph_free(relhyp_graph* graph);

#ifdef __cplusplus
}
#endif

#endif /* RELHYP_RELHYP_H */
