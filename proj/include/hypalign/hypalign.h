#ifndef HYPALIGN_H
#define HYPALIGN_H

#include <stddef.h>
#include <stdint.h>

#if defined(HYPALIGN_BUILDING_LIBRARY)
#define HYP_API __attribute__((visibility("default")))
#else
#define HYP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; the CLI uses the first four as its exit codes. */
typedef enum {
  HYP_OK = 0,
  HYP_ERR_USAGE = 1,
  HYP_ERR_DATA = 2,
  HYP_ERR_NUMERICAL = 3,
  HYP_ERR_INTERNAL = 4
} hyp_status;

typedef struct hyp_network hyp_network;
typedef struct hyp_pair hyp_pair;
typedef struct hyp_config hyp_config;
typedef struct hyp_model hyp_model;
typedef struct hyp_report hyp_report;

typedef enum { HYP_SOURCE = 0, HYP_TARGET = 1 } hyp_side;

HYP_API const char* hyp_version(void);
/* Message of the last failed call on this thread; "" if none. */
HYP_API const char* hyp_last_error(void);
/* Frees strings returned through char** out-parameters. */
HYP_API void hyp_string_free(char* s);

/* ---- networks and delta-hyperbolicity ---- */
/* label_path may be NULL. */
HYP_API hyp_status hyp_network_load(const char* edge_path, const char* label_path, hyp_network** out);
HYP_API void hyp_network_free(hyp_network* net);
HYP_API size_t hyp_network_size(const hyp_network* net);
HYP_API size_t hyp_network_edge_count(const hyp_network* net);

/* exact != 0 enumerates all quadruples (capped at exact_cap nodes, 0 = default);
 * otherwise `samples` random quadruples are drawn. */
HYP_API hyp_status hyp_graph_delta(const hyp_network* net, int exact, size_t exact_cap, uint64_t samples,
                                   uint64_t seed, double* delta, uint64_t* quadruples);

/* ---- training configuration (flat key=value) ---- */
HYP_API hyp_status hyp_config_create(hyp_config** out);
HYP_API void hyp_config_free(hyp_config* cfg);
HYP_API hyp_status hyp_config_set(hyp_config* cfg, const char* key, const char* value);
HYP_API hyp_status hyp_config_load_file(hyp_config* cfg, const char* path);
/* "key = value" lines of every effective option. */
HYP_API hyp_status hyp_config_describe(const hyp_config* cfg, char** out);

/* ---- network pairs ---- */
/* Optional paths may be NULL. */
HYP_API hyp_status hyp_pair_load(const char* source_edges, const char* target_edges, const char* train_anchors,
                                 const char* test_anchors, const char* source_labels, const char* target_labels,
                                 const char* community_truth, hyp_pair** out);
/* Reads the file set written by hyp_pair_write_dir. */
HYP_API hyp_status hyp_pair_load_dir(const char* dir, hyp_pair** out);
HYP_API hyp_status hyp_pair_write_dir(const hyp_pair* pair, const char* dir);
HYP_API void hyp_pair_free(hyp_pair* pair);
HYP_API double hyp_pair_overlap_rate(const hyp_pair* pair);
/* Node counts and anchor counts (train, test). */
HYP_API void hyp_pair_counts(const hyp_pair* pair, size_t* n_source, size_t* n_target, size_t* n_train,
                             size_t* n_test);

typedef struct {
  int n;
  int communities;
  double p_in;
  double p_out;
  double edge_keep;
  double eta;
  double train_fraction;
  uint64_t seed;
  int balance_communities; /* nonzero: keep every community pair at or above eta */
} hyp_synth_spec;

/* Fills the documented defaults. */
HYP_API void hyp_synth_spec_default(hyp_synth_spec* spec);
HYP_API hyp_status hyp_synth_generate(const hyp_synth_spec* spec, hyp_pair** out);

/* ---- training and checkpoints ---- */
/* log_path may be NULL; otherwise one line per J1 checkpoint is written. */
HYP_API hyp_status hyp_train(const hyp_pair* pair, const hyp_config* cfg, const char* log_path, hyp_model** out);
HYP_API hyp_status hyp_model_save(const hyp_model* model, const char* path);
HYP_API hyp_status hyp_model_load(const char* path, hyp_model** out);
HYP_API void hyp_model_free(hyp_model* model);
HYP_API int hyp_model_dim(const hyp_model* model);
/* Copies user embedding of node i (dim doubles). */
HYP_API hyp_status hyp_model_embedding(const hyp_model* model, hyp_side side, size_t i, double* out);

/* Per-node CSV: token, community, degree, coordinates. */
HYP_API hyp_status hyp_emit_plot(const hyp_model* model, hyp_side side, const char* path);

/* ---- alignment ---- */
HYP_API hyp_status hyp_align(const hyp_model* model, const hyp_pair* pair, double tau, const int* ks, size_t n_ks,
                             hyp_report** out);
HYP_API void hyp_report_free(hyp_report* report);
/* name: "precision@K", "map@K", "accuracy", "quality", "candidates", "queries".
 * HYP_ERR_USAGE for unknown names, HYP_ERR_DATA when the metric is unavailable. */
HYP_API hyp_status hyp_report_metric(const hyp_report* report, const char* name, double* out);
HYP_API hyp_status hyp_report_write_text(const hyp_report* report, const char* path);
HYP_API hyp_status hyp_report_write_json(const hyp_report* report, const char* path);
/* limit ranks per query, 0 = all. */
HYP_API hyp_status hyp_report_write_ranked(const hyp_report* report, const char* path, size_t limit);

#ifdef __cplusplus
}
#endif

#endif
