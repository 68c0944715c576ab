#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hypalign {

using NodeIndex = std::uint32_t;

/// One undirected edge as a pair of node indices.
using Edge = std::pair<NodeIndex, NodeIndex>;

/// (source node, target node) account pair of one user.
struct AnchorLink {
  NodeIndex source = 0;
  NodeIndex target = 0;
  auto operator<=>(const AnchorLink&) const = default;
};

/// Simple undirected graph with string node identities and optional community
/// labels. Node indices follow first appearance in the input.
class Network {
 public:
  Network() = default;

  /// Builds a graph from tokens and an edge list. Duplicate edges are merged;
  /// self-loops and out-of-range indices throw DataError.
  static Network from_edges(std::vector<std::string> tokens, const std::vector<Edge>& edges);

  std::size_t size() const { return tokens_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  const std::string& token(NodeIndex i) const { return tokens_.at(i); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::optional<NodeIndex> find(std::string_view token) const;

  std::span<const NodeIndex> neighbors(NodeIndex i) const { return adjacency_[i]; }
  std::size_t degree(NodeIndex i) const { return adjacency_[i].size(); }
  bool adjacent(NodeIndex a, NodeIndex b) const;
  std::vector<Edge> edges() const;

  // Community labels. label(i) is -1 for an unlabeled node.
  bool has_labels() const { return !community_names_.empty(); }
  int community_count() const { return static_cast<int>(community_names_.size()); }
  int label(NodeIndex i) const { return labels_.empty() ? -1 : labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<std::string>& community_names() const { return community_names_; }
  std::vector<NodeIndex> community_members(int community) const;
  std::size_t community_size(int community) const;

  /// Replaces the labels; `labels[i]` in [0, names.size()) or -1.
  void set_labels(std::vector<int> labels, std::vector<std::string> names);

  /// Copy with the flagged nodes (and their edges) removed. `old_to_new`, when
  /// given, receives the index map with -1 for removed nodes.
  Network without_nodes(const std::vector<bool>& remove,
                        std::vector<std::int64_t>* old_to_new = nullptr) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::vector<std::vector<NodeIndex>> adjacency_;
  std::size_t edge_count_ = 0;
  std::vector<int> labels_;
  std::vector<std::string> community_names_;
};

/// Source + target networks with anchor links split for training and testing.
struct NetworkPair {
  Network source;
  Network target;
  std::vector<AnchorLink> anchors_train;
  std::vector<AnchorLink> anchors_test;
  // (source community, target community) correspondences, when known.
  std::optional<std::vector<std::pair<int, int>>> community_truth;

  std::vector<AnchorLink> all_anchors() const;
  /// Checks index ranges, disjoint train/test sets and one-to-one anchors.
  void validate() const;
};

// Text formats. All whitespace separated, '#' starts a comment line.
Network load_edge_list(std::string_view text);
void load_labels(Network& net, std::string_view text);
std::vector<AnchorLink> load_anchors(std::string_view text, const Network& source,
                                     const Network& target);

std::string format_edge_list(const Network& net);
std::string format_labels(const Network& net);
std::string format_anchors(const std::vector<AnchorLink>& anchors, const Network& source,
                           const Network& target);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

/// 2|A| / (N^s + N^t) over train and test anchors together.
double overlap_rate(const NetworkPair& pair);

/// Deletes randomly chosen anchored users (from one side each) until the overlap
/// rate is within one user of `target_eta`, never going below it. Deletions
/// that would leave a neighbor isolated are skipped. With `balance_communities`
/// and labels on both sides, each deletion comes from the community pair whose
/// anchor ratio is currently highest, and deletion stops early rather than
/// push that pair's ratio below `target_eta`.
NetworkPair subsample_overlap(const NetworkPair& pair, double target_eta, std::uint64_t seed,
                              bool balance_communities = false);

/// 2|A_{p,q}| / (|C_p^s| + |C_q^t|) for label communities p (source), q (target).
double anchor_community_ratio(int source_community, int target_community,
                              const NetworkPair& pair);

}  // namespace hypalign
