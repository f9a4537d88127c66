/* C interface to the lsnet library. All functions return an lsnet_status;
 * on failure lsnet_last_error() describes the problem (thread-local, valid
 * until the next call on the same thread). Status values double as process
 * exit codes for the command functions. */
#ifndef LSNET_H
#define LSNET_H

#include <stddef.h>
#include <stdint.h>

#if defined(LSNET_BUILDING)
#define LSNET_API __attribute__((visibility("default")))
#else
#define LSNET_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lsnet_status {
  LSNET_OK = 0,
  LSNET_ERR_INTERNAL = 1,
  LSNET_ERR_CONFIG = 2,
  LSNET_ERR_DATA = 3,
  LSNET_ERR_NUMERIC = 4,
  LSNET_ERR_ARGUMENT = 5
} lsnet_status;

typedef struct lsnet_config lsnet_config;
typedef struct lsnet_tree lsnet_tree;

LSNET_API const char* lsnet_version(void);
LSNET_API const char* lsnet_last_error(void);

/* Run configuration (flat key = value settings). */
LSNET_API lsnet_status lsnet_config_create(lsnet_config** out);
LSNET_API void lsnet_config_destroy(lsnet_config* config);
/* Applies every key of a config file on top of the current settings. */
LSNET_API lsnet_status lsnet_config_load(lsnet_config* config, const char* path);
LSNET_API lsnet_status lsnet_config_set(lsnet_config* config, const char* key, const char* value);
/* Copies the current value (NUL-terminated) into buf; *needed receives the
 * length including the terminator. */
LSNET_API lsnet_status lsnet_config_get(const lsnet_config* config, const char* key, char* buf, size_t len,
                                        size_t* needed);

/* Commands. Output directory comes from the "out" key. */
LSNET_API lsnet_status lsnet_cmd_fit(const lsnet_config* config);
LSNET_API lsnet_status lsnet_cmd_crossval(const lsnet_config* config);
LSNET_API lsnet_status lsnet_cmd_scan(const lsnet_config* config);
LSNET_API lsnet_status lsnet_cmd_simulate(const lsnet_config* config);
LSNET_API lsnet_status lsnet_cmd_report(const lsnet_config* config);

/* Phylogenies. */
LSNET_API lsnet_status lsnet_tree_parse(const char* newick, lsnet_tree** out);
LSNET_API lsnet_status lsnet_tree_read(const char* path, lsnet_tree** out);
LSNET_API void lsnet_tree_destroy(lsnet_tree* tree);
LSNET_API lsnet_status lsnet_tree_tip_count(const lsnet_tree* tree, size_t* out);
LSNET_API lsnet_status lsnet_tree_patristic(const lsnet_tree* tree, const char* a, const char* b, double* out);
/* Early-burst transformed distance between two tips, depths normalized by
 * the tree depth. */
LSNET_API lsnet_status lsnet_tree_eb_distance(const lsnet_tree* tree, const char* a, const char* b, double eta,
                                              double* out);

/* Scoring. */
LSNET_API lsnet_status lsnet_auc(const double* prob, const uint8_t* truth, size_t n, double* out);
LSNET_API lsnet_status lsnet_elementary_score(double x, int y, double theta, double* out);
LSNET_API lsnet_status lsnet_wilcoxon_greater(const double* a, const double* b, size_t n, double* p_value);

#ifdef __cplusplus
}
#endif

#endif /* LSNET_H */
