#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hypalign/graph.hpp"

namespace hypalign {

/// Planted-partition base graph observed twice with independent edge loss.
struct SynthSpec {
  int n = 300;
  int communities = 4;
  double p_in = 0.15;
  double p_out = 0.01;
  double edge_keep = 0.9;
  double eta = 0.6;
  double train_fraction = 0.5;
  std::uint64_t seed = 1;
  // Subsample so that no labeled community pair falls below eta (the overall
  // rate may then stay up to one user per community above eta). Off: overall
  // rate within one user of eta.
  bool balance_communities = true;

  void validate() const;
};

struct SynthPair {
  NetworkPair pair;
  // Hidden identity ("u<k>") of every node, per side. Ground-truth files only.
  std::vector<std::string> source_identity;
  std::vector<std::string> target_identity;
};

SynthPair generate(const SynthSpec& spec);

/// File names used by write_pair_dir / load_pair_dir.
struct PairFiles {
  static constexpr const char* source_edges = "source.edges";
  static constexpr const char* target_edges = "target.edges";
  static constexpr const char* source_labels = "source.labels";
  static constexpr const char* target_labels = "target.labels";
  static constexpr const char* train_anchors = "anchors.train";
  static constexpr const char* test_anchors = "anchors.test";
  static constexpr const char* community_truth = "communities.truth";
  static constexpr const char* identity = "identity.truth";
};

/// Writes the graph_model formats (plus identity map when given) into `dir`,
/// creating it if needed.
void write_pair_dir(const std::string& dir, const NetworkPair& pair, const SynthPair* synth = nullptr);

/// Reads a directory written by write_pair_dir. Label, test-anchor and
/// community-truth files are optional.
NetworkPair load_pair_dir(const std::string& dir);

/// Loads a pair from explicit paths; empty optional paths are skipped.
NetworkPair load_pair(const std::string& source_edges, const std::string& target_edges,
                      const std::string& train_anchors, const std::string& test_anchors = {},
                      const std::string& source_labels = {}, const std::string& target_labels = {},
                      const std::string& community_truth = {});

}  // namespace hypalign
