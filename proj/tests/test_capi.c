/* Exercises the shared library through its C header only. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "hypalign/hypalign.h"

static int failures = 0;

#define CHECK(cond)                                                    \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                      \
    }                                                                  \
  } while (0)

#define CHECK_OK(call)                                                          \
  do {                                                                          \
    hyp_status st_ = (call);                                                    \
    if (st_ != HYP_OK) {                                                        \
      fprintf(stderr, "%s:%d: %s -> %d (%s)\n", __FILE__, __LINE__, #call, (int)st_, \
              hyp_last_error());                                                \
      ++failures;                                                               \
    }                                                                           \
  } while (0)

static int count_lines(const char* path) {
  FILE* f = fopen(path, "r");
  if (f == NULL) return -1;
  int n = 0, c;
  while ((c = fgetc(f)) != EOF) n += c == '\n';
  fclose(f);
  return n;
}

int main(int argc, char** argv) {
  const char* tmp = argc > 1 ? argv[1] : ".";
  char dir[512], model_path[512], plot_path[512], report_path[512], json_path[512], ranked_path[512];
  snprintf(dir, sizeof dir, "%s/capi_pair", tmp);
  snprintf(model_path, sizeof model_path, "%s/capi_model.tsv", tmp);
  snprintf(plot_path, sizeof plot_path, "%s/capi_plot.csv", tmp);
  snprintf(report_path, sizeof report_path, "%s/capi_report.txt", tmp);
  snprintf(json_path, sizeof json_path, "%s/capi_report.json", tmp);
  snprintf(ranked_path, sizeof ranked_path, "%s/capi_ranked.tsv", tmp);

  CHECK(strlen(hyp_version()) > 0);

  /* Errors: codes plus a message naming the problem. */
  hyp_network* net = NULL;
  CHECK(hyp_network_load("/nonexistent/edges.txt", NULL, &net) == HYP_ERR_DATA);
  CHECK(strstr(hyp_last_error(), "/nonexistent/edges.txt") != NULL);
  CHECK(net == NULL);
  CHECK(hyp_network_load(NULL, NULL, &net) == HYP_ERR_USAGE);

  hyp_config* cfg = NULL;
  CHECK_OK(hyp_config_create(&cfg));
  CHECK(hyp_config_set(cfg, "no_such_key", "1") == HYP_ERR_USAGE);
  CHECK(strstr(hyp_last_error(), "no_such_key") != NULL);
  CHECK(hyp_config_set(cfg, "dim", "x") == HYP_ERR_USAGE);
  CHECK_OK(hyp_config_set(cfg, "dim", "2"));
  CHECK_OK(hyp_config_set(cfg, "walks_per_node", "2"));
  CHECK_OK(hyp_config_set(cfg, "walk_length", "10"));
  CHECK_OK(hyp_config_set(cfg, "warmup_epochs", "2"));
  CHECK_OK(hyp_config_set(cfg, "burnin_epochs", "1"));
  CHECK_OK(hyp_config_set(cfg, "outer_iters", "2"));
  CHECK_OK(hyp_last_error()[0] == '\0' ? HYP_OK : HYP_ERR_INTERNAL);
  char* desc = NULL;
  CHECK_OK(hyp_config_describe(cfg, &desc));
  CHECK(desc != NULL && strstr(desc, "dim = 2") != NULL);
  hyp_string_free(desc);

  /* Synthetic pair, written and re-read. */
  hyp_synth_spec spec;
  hyp_synth_spec_default(&spec);
  spec.n = 60;
  spec.communities = 2;
  spec.p_in = 0.25;
  spec.seed = 3;
  hyp_pair* pair = NULL;
  CHECK_OK(hyp_synth_generate(&spec, &pair));
  CHECK_OK(hyp_pair_write_dir(pair, dir));
  hyp_pair* loaded = NULL;
  CHECK_OK(hyp_pair_load_dir(dir, &loaded));
  size_t ns = 0, nt = 0, ntrain = 0, ntest = 0;
  hyp_pair_counts(loaded, &ns, &nt, &ntrain, &ntest);
  CHECK(ns > 0 && nt > 0 && ntrain > 0 && ntest > 0);
  CHECK(fabs(hyp_pair_overlap_rate(loaded) - hyp_pair_overlap_rate(pair)) == 0.0);
  spec.eta = 2.0;
  hyp_pair* bad = NULL;
  CHECK(hyp_synth_generate(&spec, &bad) == HYP_ERR_USAGE);

  /* Delta-hyperbolicity of a tree is 0. */
  char edges_path[512];
  snprintf(edges_path, sizeof edges_path, "%s/capi_tree.edges", tmp);
  FILE* f = fopen(edges_path, "w");
  fputs("a b\nb c\nb d\nd e\n", f);
  fclose(f);
  CHECK_OK(hyp_network_load(edges_path, NULL, &net));
  CHECK(hyp_network_size(net) == 5);
  CHECK(hyp_network_edge_count(net) == 4);
  double delta = -1.0;
  uint64_t quads = 0;
  CHECK_OK(hyp_graph_delta(net, 1, 0, 0, 1, &delta, &quads));
  CHECK(delta == 0.0);
  CHECK(quads == 5);
  hyp_network_free(net);

  /* Train, persist, align. */
  hyp_model* model = NULL;
  CHECK_OK(hyp_train(loaded, cfg, NULL, &model));
  CHECK(hyp_model_dim(model) == 2);
  double xy[2];
  CHECK_OK(hyp_model_embedding(model, HYP_SOURCE, 0, xy));
  CHECK(xy[0] * xy[0] + xy[1] * xy[1] < 1.0);
  CHECK(hyp_model_embedding(model, HYP_SOURCE, ns, xy) == HYP_ERR_USAGE);
  CHECK_OK(hyp_model_save(model, model_path));
  hyp_model* reloaded = NULL;
  CHECK_OK(hyp_model_load(model_path, &reloaded));
  CHECK(hyp_model_load("/nonexistent/model.tsv", &reloaded) == HYP_ERR_DATA);

  CHECK_OK(hyp_emit_plot(reloaded, HYP_TARGET, plot_path));
  CHECK(count_lines(plot_path) == (int)nt + 1);

  const int ks[] = {1, 5};
  hyp_report* a = NULL;
  hyp_report* b = NULL;
  CHECK_OK(hyp_align(model, loaded, 0.6, ks, 2, &a));
  CHECK_OK(hyp_align(reloaded, loaded, 0.6, ks, 2, &b));
  double pa = -1, pb = -2, cand = 0, ma = -1;
  CHECK_OK(hyp_report_metric(a, "precision@5", &pa));
  CHECK_OK(hyp_report_metric(b, "precision@5", &pb));
  CHECK_OK(hyp_report_metric(a, "map@5", &ma));
  CHECK_OK(hyp_report_metric(a, "candidates", &cand));
  CHECK(pa == pb);
  CHECK(pa >= 0.0 && pa <= 1.0 && ma <= pa);
  CHECK(cand == (double)(ns - ntrain));
  CHECK(hyp_report_metric(a, "precision@7", &pa) == HYP_ERR_DATA);
  CHECK(hyp_report_metric(a, "bogus", &pa) == HYP_ERR_USAGE);
  CHECK_OK(hyp_report_write_text(a, report_path));
  CHECK_OK(hyp_report_write_json(a, json_path));
  CHECK_OK(hyp_report_write_ranked(a, ranked_path, 3));
  CHECK(count_lines(ranked_path) >= 3 * (int)ntest);
  CHECK(hyp_align(model, loaded, 0.6, NULL, 0, &a) == HYP_ERR_USAGE);

  hyp_report_free(a);
  hyp_report_free(b);
  hyp_model_free(model);
  hyp_model_free(reloaded);
  hyp_pair_free(pair);
  hyp_pair_free(loaded);
  hyp_config_free(cfg);
  /* Null handles are accepted by the free functions. */
  hyp_model_free(NULL);
  hyp_pair_free(NULL);

  if (failures == 0) printf("capi: all checks passed\n");
  return failures == 0 ? 0 : 1;
}
