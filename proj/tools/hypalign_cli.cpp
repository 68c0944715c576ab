// Command-line front end over the C API.
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hypalign/hypalign.h"

namespace {

// Thrown with the status of a failed library call.
struct Failure {
  hyp_status status;
};

void check(hyp_status s) {
  if (s != HYP_OK) throw Failure{s};
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using Pair = Handle<hyp_pair, hyp_pair_free>;
using Model = Handle<hyp_model, hyp_model_free>;
using Config = Handle<hyp_config, hyp_config_free>;
using Report = Handle<hyp_report, hyp_report_free>;
using NetworkH = Handle<hyp_network, hyp_network_free>;

struct PairArgs {
  std::string dir;
  std::string source, target, anchors, test_anchors, source_labels, target_labels, truth;

  void add(CLI::App* cmd, bool test_required) {
    cmd->add_option("--pair-dir", dir, "directory written by `synth`");
    cmd->add_option("--source", source, "source edge list");
    cmd->add_option("--target", target, "target edge list");
    cmd->add_option("--anchors", anchors, "training anchors");
    cmd->add_option("--test-anchors", test_anchors, test_required ? "test anchors (evaluated)" : "test anchors");
    cmd->add_option("--source-labels", source_labels, "source community labels");
    cmd->add_option("--target-labels", target_labels, "target community labels");
    cmd->add_option("--community-truth", truth, "community correspondence file");
  }

  void load(Pair& pair) const {
    if (!dir.empty()) {
      check(hyp_pair_load_dir(dir.c_str(), pair.out()));
      return;
    }
    if (source.empty() || target.empty()) {
      throw CLI::ValidationError("need --pair-dir or both --source and --target");
    }
    auto c = [](const std::string& s) { return s.empty() ? nullptr : s.c_str(); };
    check(hyp_pair_load(source.c_str(), target.c_str(), c(anchors), c(test_anchors), c(source_labels),
                        c(target_labels), c(truth), pair.out()));
  }
};

int cmd_delta(const std::string& graph, const std::string& mode, uint64_t samples, uint64_t seed, size_t cap) {
  NetworkH net;
  check(hyp_network_load(graph.c_str(), nullptr, net.out()));
  double delta = 0.0;
  uint64_t quads = 0;
  check(hyp_graph_delta(net.get(), mode == "exact", cap, samples, seed, &delta, &quads));
  std::printf("delta %.1f\nquadruples %llu\nmode %s\nnodes %zu\n", delta, static_cast<unsigned long long>(quads),
              mode.c_str(), hyp_network_size(net.get()));
  return 0;
}

int cmd_synth(const hyp_synth_spec& spec, const std::string& out) {
  Pair pair;
  check(hyp_synth_generate(&spec, pair.out()));
  check(hyp_pair_write_dir(pair.get(), out.c_str()));
  size_t ns = 0, nt = 0, ntr = 0, nte = 0;
  hyp_pair_counts(pair.get(), &ns, &nt, &ntr, &nte);
  std::printf("source_nodes %zu\ntarget_nodes %zu\ntrain_anchors %zu\ntest_anchors %zu\noverlap_rate %.6f\n", ns, nt,
              ntr, nte, hyp_pair_overlap_rate(pair.get()));
  return 0;
}

std::vector<int> parse_ks(const std::string& text) {
  std::vector<int> ks;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int k = std::stoi(item, &used);
      if (used != item.size() || k < 1) throw std::invalid_argument(item);
      ks.push_back(k);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--k", "bad entry '" + item + "'");
    }
  }
  if (ks.empty()) throw CLI::ValidationError("--k", "empty list");
  return ks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint user and community alignment of two networks in the Poincare ball"};
  app.set_version_flag("--version", std::string(hyp_version()));
  app.require_subcommand(1);

  // delta
  auto* delta = app.add_subcommand("delta", "Gromov delta-hyperbolicity of a graph");
  std::string graph, mode = "exact";
  uint64_t samples = 1000000, delta_seed = 0;
  size_t cap = 0;
  delta->add_option("--graph", graph, "edge list")->required();
  delta->add_option("--mode", mode, "exact or sampled")->check(CLI::IsMember({"exact", "sampled"}));
  delta->add_option("--samples", samples, "quadruples drawn in sampled mode");
  delta->add_option("--seed", delta_seed);
  delta->add_option("--cap", cap, "largest graph accepted by exact mode (default 200)");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic aligned network pair");
  hyp_synth_spec spec;
  hyp_synth_spec_default(&spec);
  std::string synth_out;
  synth->add_option("--n", spec.n, "users in the base graph");
  synth->add_option("--communities", spec.communities);
  synth->add_option("--p-in", spec.p_in);
  synth->add_option("--p-out", spec.p_out);
  synth->add_option("--edge-keep", spec.edge_keep, "per-copy edge retention");
  synth->add_option("--eta", spec.eta, "target overlap rate");
  synth->add_option("--train-fraction", spec.train_fraction);
  synth->add_option("--seed", spec.seed);
  bool no_balance = false;
  synth->add_flag("--no-balance", no_balance, "subsample uniformly instead of per community pair");
  synth->add_option("--out", synth_out, "output directory")->required();

  // train
  auto* train = app.add_subcommand("train", "Train joint embeddings and community mixtures");
  PairArgs train_pair;
  train_pair.add(train, false);
  std::string config_file, model_out, log_path;
  std::vector<std::string> sets;
  int threads = 0;
  bool deterministic = false, nondeterministic = false;
  train->add_option("--config", config_file, "flat key=value file");
  train->add_option("--set", sets, "key=value override (repeatable)");
  train->add_option("--threads", threads, "worker threads for SGD epochs");
  train->add_flag("--deterministic", deterministic, "single worker, bit-reproducible");
  train->add_flag("--nondeterministic", nondeterministic, "allow hogwild workers");
  train->add_option("--out", model_out, "model checkpoint path")->required();
  train->add_option("--log", log_path, "training log (default: <out>.log)");
  std::map<std::string, std::string> flag_values;
  {
    Config probe;
    check(hyp_config_create(probe.out()));
    char* text = nullptr;
    check(hyp_config_describe(probe.get(), &text));
    std::stringstream ss(text);
    hyp_string_free(text);
    std::string line;
    while (std::getline(ss, line)) {
      const std::string key = line.substr(0, line.find(" = "));
      if (key == "threads" || key == "deterministic") continue;
      std::string flag = key;
      for (char& c : flag) {
        if (c == '_') c = '-';
      }
      train->add_option("--" + flag, flag_values[key], "default " + line.substr(line.find(" = ") + 3));
    }
  }

  // align
  auto* align = app.add_subcommand("align", "Rank counterparts and match communities");
  PairArgs align_pair;
  align_pair.add(align, true);
  std::string model_in, ks_text = "1,5,10,30", align_out;
  double tau = 0.6;
  size_t ranked_limit = 30;
  align->add_option("--model", model_in, "model checkpoint")->required();
  align->add_option("--tau", tau, "anchor-community threshold");
  align->add_option("--k", ks_text, "comma-separated cutoffs");
  align->add_option("--out", align_out, "report directory")->required();
  align->add_option("--ranked-limit", ranked_limit, "ranks per query in ranked.tsv (0 = all)");

  // emit-plot
  auto* plot = app.add_subcommand("emit-plot", "Write per-node embedding coordinates as CSV");
  std::string plot_model, network = "s", plot_out;
  plot->add_option("--model", plot_model)->required();
  plot->add_option("--network", network, "s or t")->check(CLI::IsMember({"s", "t"}));
  plot->add_option("--out", plot_out, "CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (delta->parsed()) return cmd_delta(graph, mode, samples, delta_seed, cap);
    if (synth->parsed()) {
      spec.balance_communities = no_balance ? 0 : 1;
      return cmd_synth(spec, synth_out);
    }
    if (train->parsed()) {
      Config cfg;
      check(hyp_config_create(cfg.out()));
      if (!config_file.empty()) check(hyp_config_load_file(cfg.get(), config_file.c_str()));
      for (const auto& [key, value] : flag_values) {
        if (!value.empty()) check(hyp_config_set(cfg.get(), key.c_str(), value.c_str()));
      }
      for (const std::string& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value, got '" + kv + "'");
        check(hyp_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
      }
      if (threads > 0) check(hyp_config_set(cfg.get(), "threads", std::to_string(threads).c_str()));
      if (deterministic && nondeterministic) {
        throw CLI::ValidationError("--deterministic and --nondeterministic are exclusive");
      }
      if (deterministic) check(hyp_config_set(cfg.get(), "deterministic", "true"));
      if (nondeterministic) check(hyp_config_set(cfg.get(), "deterministic", "false"));
      Pair pair;
      train_pair.load(pair);
      Model model;
      const std::string log = log_path.empty() ? model_out + ".log" : log_path;
      check(hyp_train(pair.get(), cfg.get(), log.c_str(), model.out()));
      check(hyp_model_save(model.get(), model_out.c_str()));
      std::printf("model %s\nlog %s\n", model_out.c_str(), log.c_str());
      return 0;
    }
    if (align->parsed()) {
      const std::vector<int> ks = parse_ks(ks_text);
      Model model;
      check(hyp_model_load(model_in.c_str(), model.out()));
      Pair pair;
      align_pair.load(pair);
      Report report;
      check(hyp_align(model.get(), pair.get(), tau, ks.data(), ks.size(), report.out()));
      std::error_code ec;
      std::filesystem::create_directories(align_out, ec);
      const std::filesystem::path dir(align_out);
      check(hyp_report_write_text(report.get(), (dir / "report.txt").c_str()));
      check(hyp_report_write_json(report.get(), (dir / "report.json").c_str()));
      check(hyp_report_write_ranked(report.get(), (dir / "ranked.tsv").c_str(), ranked_limit));
      for (int k : ks) {
        double p = 0.0, m = 0.0;
        check(hyp_report_metric(report.get(), ("precision@" + std::to_string(k)).c_str(), &p));
        check(hyp_report_metric(report.get(), ("map@" + std::to_string(k)).c_str(), &m));
        std::printf("precision@%d %.6f\nmap@%d %.6f\n", k, p, k, m);
      }
      for (const char* name : {"accuracy", "quality"}) {
        double v = 0.0;
        if (hyp_report_metric(report.get(), name, &v) == HYP_OK) {
          std::printf("%s %.6f\n", name, v);
        } else {
          std::printf("%s n/a\n", name);
        }
      }
      return 0;
    }
    if (plot->parsed()) {
      Model model;
      check(hyp_model_load(plot_model.c_str(), model.out()));
      check(hyp_emit_plot(model.get(), network == "s" ? HYP_SOURCE : HYP_TARGET, plot_out.c_str()));
      return 0;
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", hyp_last_error());
    return static_cast<int>(f.status);
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
