#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hypalign/graph.hpp"
#include "hypalign/rng.hpp"

namespace hypalign {

/// Uniform-neighbor random walks, h per non-isolated node, ordered by
/// (start node, walk number).
struct WalkCorpus {
  std::vector<std::vector<NodeIndex>> walks;
  int walks_per_node = 0;
  int walk_length = 0;
};

WalkCorpus random_walks(const Network& net, int walks_per_node, int walk_length,
                        std::uint64_t seed);

/// (center, context) occurrence; the corpus-wide multiset of these is the
/// skip-gram neighborhood N_i.
struct ContextPair {
  NodeIndex center;
  NodeIndex context;
  bool operator==(const ContextPair&) const = default;
};

/// Every (walk[t], walk[t']) with 0 < |t - t'| <= window, walk by walk.
std::vector<ContextPair> context_pairs(const WalkCorpus& corpus, int window);

/// Degree^exponent unigram table for negative sampling.
class NegativeSampler {
 public:
  /// Keeps a pointer to `net`, which must outlive the sampler.
  NegativeSampler(const Network& net, double exponent = 0.75);
  NegativeSampler(Network&&, double = 0.75) = delete;

  double exponent() const { return exponent_; }
  double probability(NodeIndex i) const;

  /// One unconstrained draw from the table.
  NodeIndex draw(Rng& rng) const;

  /// K draws (with replacement) that are neither `center` nor adjacent to it.
  /// Throws DataError when fewer than K eligible nodes exist.
  void sample(NodeIndex center, int k, Rng& rng, std::vector<NodeIndex>& out) const;
  std::vector<NodeIndex> sample(NodeIndex center, int k, Rng& rng) const;

 private:
  const Network* net_;
  double exponent_;
  std::size_t weighted_nodes_ = 0;
  std::vector<double> cumulative_;  // normalized, last entry == 1
};

/// Walks written one per line as space-separated tokens.
std::string format_corpus(const WalkCorpus& corpus, const Network& net);

}  // namespace hypalign
