#include "hypalign/hypalign.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "hypalign/alignment.hpp"
#include "hypalign/benchgen.hpp"
#include "hypalign/checkpoint.hpp"
#include "hypalign/config.hpp"
#include "hypalign/error.hpp"
#include "hypalign/hyperbolicity.hpp"
#include "hypalign/trainer.hpp"

struct hyp_network {
  hypalign::Network net;
};
struct hyp_pair {
  hypalign::NetworkPair pair;
  // Set for generated pairs so the identity file can be written.
  std::optional<hypalign::SynthPair> synth;
};
struct hyp_config {
  hypalign::TrainConfig cfg;
};
struct hyp_model {
  hypalign::JointModel model;
};
struct hyp_report {
  hypalign::AlignmentReport report;
};

namespace {

thread_local std::string last_error;

hyp_status fail(hyp_status code, const std::string& what) {
  last_error = what;
  return code;
}

// Runs fn, translating exceptions into status codes.
template <class F>
hyp_status guarded(F&& fn) {
  try {
    last_error.clear();
    fn();
    return HYP_OK;
  } catch (const hypalign::Error& e) {
    switch (e.kind()) {
      case hypalign::ErrorKind::Usage: return fail(HYP_ERR_USAGE, e.what());
      case hypalign::ErrorKind::Data: return fail(HYP_ERR_DATA, e.what());
      case hypalign::ErrorKind::Numerical: return fail(HYP_ERR_NUMERICAL, e.what());
    }
    return fail(HYP_ERR_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(HYP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(HYP_ERR_INTERNAL, e.what());
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw hypalign::UsageError(std::string(what) + " is NULL");
}

std::string opt(const char* path) { return path != nullptr ? path : ""; }

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

hypalign::Side to_side(hyp_side s) {
  if (s != HYP_SOURCE && s != HYP_TARGET) throw hypalign::UsageError("side must be HYP_SOURCE or HYP_TARGET");
  return s == HYP_SOURCE ? hypalign::Side::Source : hypalign::Side::Target;
}

}  // namespace

extern "C" {

const char* hyp_version(void) { return HYPALIGN_VERSION; }
const char* hyp_last_error(void) { return last_error.c_str(); }
void hyp_string_free(char* s) { std::free(s); }

hyp_status hyp_network_load(const char* edge_path, const char* label_path, hyp_network** out) {
  return guarded([&] {
    require(edge_path, "edge_path");
    require(out, "out");
    auto h = std::make_unique<hyp_network>();
    const std::string path = edge_path;
    try {
      h->net = hypalign::load_edge_list(hypalign::read_text_file(path));
      if (label_path != nullptr) hypalign::load_labels(h->net, hypalign::read_text_file(label_path));
    } catch (const hypalign::DataError& e) {
      const std::string what = e.what();
      if (what.find(path) != std::string::npos) throw;
      throw hypalign::DataError(path + ": " + what);
    }
    *out = h.release();
  });
}

void hyp_network_free(hyp_network* net) { delete net; }
size_t hyp_network_size(const hyp_network* net) { return net != nullptr ? net->net.size() : 0; }
size_t hyp_network_edge_count(const hyp_network* net) { return net != nullptr ? net->net.edge_count() : 0; }

hyp_status hyp_graph_delta(const hyp_network* net, int exact, size_t exact_cap, uint64_t samples, uint64_t seed,
                           double* delta, uint64_t* quadruples) {
  return guarded([&] {
    require(net, "net");
    require(delta, "delta");
    hypalign::DeltaOptions o;
    o.exact = exact != 0;
    if (exact_cap != 0) o.exact_cap = exact_cap;
    o.samples = samples;
    o.seed = seed;
    const auto r = hypalign::graph_delta(net->net, o);
    *delta = r.delta;
    if (quadruples != nullptr) *quadruples = r.quadruples;
  });
}

hyp_status hyp_config_create(hyp_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new hyp_config();
  });
}

void hyp_config_free(hyp_config* cfg) { delete cfg; }

hyp_status hyp_config_set(hyp_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg, "cfg");
    require(key, "key");
    require(value, "value");
    hypalign::set_option(cfg->cfg, key, value);
  });
}

hyp_status hyp_config_load_file(hyp_config* cfg, const char* path) {
  return guarded([&] {
    require(cfg, "cfg");
    require(path, "path");
    const auto kv = hypalign::parse_config_text(hypalign::read_text_file(path));
    hypalign::TrainConfig next = cfg->cfg;
    for (const auto& [k, v] : kv) {
      try {
        hypalign::set_option(next, k, v);
      } catch (const hypalign::UsageError& e) {
        throw hypalign::UsageError(std::string(path) + ": " + e.what());
      }
    }
    cfg->cfg = next;
  });
}

hyp_status hyp_config_describe(const hyp_config* cfg, char** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    std::string text;
    for (const auto& [k, v] : hypalign::describe(cfg->cfg)) text += k + " = " + v + "\n";
    *out = duplicate(text);
  });
}

hyp_status hyp_pair_load(const char* source_edges, const char* target_edges, const char* train_anchors,
                         const char* test_anchors, const char* source_labels, const char* target_labels,
                         const char* community_truth, hyp_pair** out) {
  return guarded([&] {
    require(source_edges, "source_edges");
    require(target_edges, "target_edges");
    require(out, "out");
    auto h = std::make_unique<hyp_pair>();
    h->pair = hypalign::load_pair(source_edges, target_edges, opt(train_anchors), opt(test_anchors),
                                  opt(source_labels), opt(target_labels), opt(community_truth));
    *out = h.release();
  });
}

hyp_status hyp_pair_load_dir(const char* dir, hyp_pair** out) {
  return guarded([&] {
    require(dir, "dir");
    require(out, "out");
    auto h = std::make_unique<hyp_pair>();
    h->pair = hypalign::load_pair_dir(dir);
    *out = h.release();
  });
}

hyp_status hyp_pair_write_dir(const hyp_pair* pair, const char* dir) {
  return guarded([&] {
    require(pair, "pair");
    require(dir, "dir");
    hypalign::write_pair_dir(dir, pair->pair, pair->synth ? &*pair->synth : nullptr);
  });
}

void hyp_pair_free(hyp_pair* pair) { delete pair; }

double hyp_pair_overlap_rate(const hyp_pair* pair) {
  return pair != nullptr ? hypalign::overlap_rate(pair->pair) : 0.0;
}

void hyp_pair_counts(const hyp_pair* pair, size_t* n_source, size_t* n_target, size_t* n_train, size_t* n_test) {
  if (pair == nullptr) return;
  if (n_source != nullptr) *n_source = pair->pair.source.size();
  if (n_target != nullptr) *n_target = pair->pair.target.size();
  if (n_train != nullptr) *n_train = pair->pair.anchors_train.size();
  if (n_test != nullptr) *n_test = pair->pair.anchors_test.size();
}

void hyp_synth_spec_default(hyp_synth_spec* spec) {
  if (spec == nullptr) return;
  const hypalign::SynthSpec d;
  *spec = {d.n, d.communities, d.p_in, d.p_out, d.edge_keep, d.eta, d.train_fraction, d.seed, d.balance_communities ? 1 : 0};
}

hyp_status hyp_synth_generate(const hyp_synth_spec* spec, hyp_pair** out) {
  return guarded([&] {
    require(spec, "spec");
    require(out, "out");
    hypalign::SynthSpec s;
    s.n = spec->n;
    s.communities = spec->communities;
    s.p_in = spec->p_in;
    s.p_out = spec->p_out;
    s.edge_keep = spec->edge_keep;
    s.eta = spec->eta;
    s.train_fraction = spec->train_fraction;
    s.seed = spec->seed;
    s.balance_communities = spec->balance_communities != 0;
    auto h = std::make_unique<hyp_pair>();
    h->synth = hypalign::generate(s);
    h->pair = h->synth->pair;
    *out = h.release();
  });
}

hyp_status hyp_train(const hyp_pair* pair, const hyp_config* cfg, const char* log_path, hyp_model** out) {
  return guarded([&] {
    require(pair, "pair");
    require(cfg, "cfg");
    require(out, "out");
    std::ofstream log;
    if (log_path != nullptr) {
      log.open(log_path);
      if (!log) throw hypalign::DataError(std::string("cannot write '") + log_path + "'");
      log << "# hypalign " << HYPALIGN_VERSION << " training log\n";
      for (const auto& [k, v] : hypalign::describe(cfg->cfg)) log << "# " << k << " = " << v << "\n";
    }
    auto sink = [&](const std::string& line) {
      if (log.is_open()) log << line << "\n" << std::flush;
    };
    auto h = std::make_unique<hyp_model>();
    h->model = hypalign::train(pair->pair, cfg->cfg, sink).model;
    *out = h.release();
  });
}

hyp_status hyp_model_save(const hyp_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    hypalign::save_model(model->model, path);
  });
}

hyp_status hyp_model_load(const char* path, hyp_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto h = std::make_unique<hyp_model>();
    h->model = hypalign::load_model(path);
    *out = h.release();
  });
}

void hyp_model_free(hyp_model* model) { delete model; }
int hyp_model_dim(const hyp_model* model) { return model != nullptr ? model->model.dim : 0; }

hyp_status hyp_model_embedding(const hyp_model* model, hyp_side side, size_t i, double* out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    const auto& theta = model->model.net(to_side(side)).theta;
    if (i >= static_cast<size_t>(theta.cols())) throw hypalign::UsageError("node index out of range");
    for (int k = 0; k < model->model.dim; ++k) out[k] = theta(k, static_cast<Eigen::Index>(i));
  });
}

hyp_status hyp_emit_plot(const hyp_model* model, hyp_side side, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    const auto& net = model->model.net(to_side(side));
    std::string csv = "token,community,degree";
    for (int k = 0; k < model->model.dim; ++k) csv += ",x" + std::to_string(k);
    csv += "\n";
    char buf[32];
    for (std::size_t i = 0; i < net.tokens.size(); ++i) {
      const auto col = static_cast<Eigen::Index>(i);
      const int comm = net.community.size() > 0 ? net.community.membership().argmax(col) : -1;
      csv += net.tokens[i] + "," + std::to_string(comm) + "," + std::to_string(net.degrees[i]);
      for (int k = 0; k < model->model.dim; ++k) {
        std::snprintf(buf, sizeof buf, ",%.17g", net.theta(k, col));
        csv += buf;
      }
      csv += "\n";
    }
    hypalign::write_text_file(path, csv);
  });
}

hyp_status hyp_align(const hyp_model* model, const hyp_pair* pair, double tau, const int* ks, size_t n_ks,
                     hyp_report** out) {
  return guarded([&] {
    require(model, "model");
    require(pair, "pair");
    require(out, "out");
    if (n_ks > 0) require(ks, "ks");
    if (!(tau >= 0.0 && tau <= 1.0)) throw hypalign::UsageError("tau must be in [0, 1]");
    std::vector<int> k_list(ks, ks + n_ks);
    for (int k : k_list) {
      if (k < 1) throw hypalign::UsageError("k must be >= 1");
    }
    auto h = std::make_unique<hyp_report>();
    h->report = hypalign::evaluate(model->model, pair->pair, tau, k_list);
    *out = h.release();
  });
}

void hyp_report_free(hyp_report* report) { delete report; }

hyp_status hyp_report_metric(const hyp_report* report, const char* name, double* out) {
  return guarded([&] {
    require(report, "report");
    require(name, "name");
    require(out, "out");
    const auto& r = report->report;
    const std::string n = name;
    auto by_k = [&](const std::string& prefix, const std::map<int, double>& m) -> bool {
      if (n.rfind(prefix, 0) != 0) return false;
      int k = 0;
      try {
        k = std::stoi(n.substr(prefix.size()));
      } catch (const std::exception&) {
        throw hypalign::UsageError("bad metric name '" + n + "'");
      }
      const auto it = m.find(k);
      if (it == m.end()) throw hypalign::DataError("metric '" + n + "' was not computed");
      *out = it->second;
      return true;
    };
    if (by_k("precision@", r.precision) || by_k("map@", r.map)) return;
    if (n == "accuracy" || n == "quality") {
      const auto& v = n == "accuracy" ? r.accuracy : r.quality;
      if (!v) throw hypalign::DataError("metric '" + n + "' unavailable (no labeled anchor communities)");
      *out = *v;
    } else if (n == "candidates") {
      *out = static_cast<double>(r.candidates);
    } else if (n == "queries") {
      *out = static_cast<double>(r.queries);
    } else {
      throw hypalign::UsageError("unknown metric '" + n + "'");
    }
  });
}

hyp_status hyp_report_write_text(const hyp_report* report, const char* path) {
  return guarded([&] {
    require(report, "report");
    require(path, "path");
    hypalign::write_text_file(path, hypalign::format_report_text(report->report));
  });
}

hyp_status hyp_report_write_json(const hyp_report* report, const char* path) {
  return guarded([&] {
    require(report, "report");
    require(path, "path");
    hypalign::write_text_file(path, hypalign::format_report_json(report->report));
  });
}

hyp_status hyp_report_write_ranked(const hyp_report* report, const char* path, size_t limit) {
  return guarded([&] {
    require(report, "report");
    require(path, "path");
    hypalign::write_text_file(path, hypalign::format_ranked(report->report, limit));
  });
}

}  // extern "C"
