#include "hypalign/corpus.hpp"

#include <algorithm>
#include <cmath>

#include "hypalign/error.hpp"

namespace hypalign {

WalkCorpus random_walks(const Network& net, int walks_per_node, int walk_length,
                        std::uint64_t seed) {
  if (walks_per_node < 1 || walk_length < 2) {
    throw UsageError("random walks need h >= 1 and l >= 2");
  }
  WalkCorpus corpus;
  corpus.walks_per_node = walks_per_node;
  corpus.walk_length = walk_length;
  for (NodeIndex start = 0; start < net.size(); ++start) {
    if (net.degree(start) == 0) continue;
    // One stream per start node so the corpus does not depend on visiting order.
    Rng rng = make_rng(seed, start);
    for (int w = 0; w < walks_per_node; ++w) {
      std::vector<NodeIndex> walk;
      walk.reserve(static_cast<std::size_t>(walk_length));
      walk.push_back(start);
      while (static_cast<int>(walk.size()) < walk_length) {
        const auto nbrs = net.neighbors(walk.back());
        walk.push_back(nbrs[uniform_index(rng, nbrs.size())]);
      }
      corpus.walks.push_back(std::move(walk));
    }
  }
  return corpus;
}

std::vector<ContextPair> context_pairs(const WalkCorpus& corpus, int window) {
  if (window < 1) throw UsageError("context window must be >= 1");
  std::vector<ContextPair> pairs;
  for (const auto& walk : corpus.walks) {
    const auto len = static_cast<std::ptrdiff_t>(walk.size());
    for (std::ptrdiff_t t = 0; t < len; ++t) {
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, t - window);
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len - 1, t + window);
      for (std::ptrdiff_t u = lo; u <= hi; ++u) {
        if (u != t) pairs.push_back({walk[static_cast<std::size_t>(t)], walk[static_cast<std::size_t>(u)]});
      }
    }
  }
  return pairs;
}

NegativeSampler::NegativeSampler(const Network& net, double exponent)
    : net_(&net), exponent_(exponent) {
  if (!(exponent > 0.0)) throw UsageError("negative sampling exponent must be positive");
  cumulative_.resize(net.size());
  double total = 0.0;
  for (NodeIndex i = 0; i < net.size(); ++i) {
    const auto deg = static_cast<double>(net.degree(i));
    if (deg > 0.0) {
      total += std::pow(deg, exponent);
      ++weighted_nodes_;
    }
    cumulative_[i] = total;
  }
  if (total <= 0.0) throw DataError("negative sampler over a graph without edges");
  for (double& c : cumulative_) c /= total;
  cumulative_.back() = 1.0;
}

double NegativeSampler::probability(NodeIndex i) const {
  return i == 0 ? cumulative_[0] : cumulative_[i] - cumulative_[i - 1];
}

NodeIndex NegativeSampler::draw(Rng& rng) const {
  const double u = uniform01(rng);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return static_cast<NodeIndex>(std::min<std::ptrdiff_t>(it - cumulative_.begin(),
                                                         static_cast<std::ptrdiff_t>(cumulative_.size()) - 1));
}

void NegativeSampler::sample(NodeIndex center, int k, Rng& rng, std::vector<NodeIndex>& out) const {
  if (k < 1) throw UsageError("negative sample count must be >= 1");
  out.clear();
  // Nodes with positive weight, minus the center and its neighbors (all of
  // which have positive degree).
  const std::size_t own = net_->degree(center) > 0 ? 1 : 0;
  const std::size_t eligible = weighted_nodes_ - std::min(weighted_nodes_, own + net_->degree(center));
  if (eligible < static_cast<std::size_t>(k)) {
    throw DataError("only " + std::to_string(eligible) + " eligible negative samples for node '" +
                    net_->token(center) + "', need " + std::to_string(k));
  }
  while (static_cast<int>(out.size()) < k) {
    const NodeIndex n = draw(rng);
    if (n == center || net_->adjacent(center, n)) continue;
    out.push_back(n);
  }
}

std::vector<NodeIndex> NegativeSampler::sample(NodeIndex center, int k, Rng& rng) const {
  std::vector<NodeIndex> out;
  sample(center, k, rng, out);
  return out;
}

std::string format_corpus(const WalkCorpus& corpus, const Network& net) {
  std::string out;
  for (const auto& walk : corpus.walks) {
    for (std::size_t t = 0; t < walk.size(); ++t) {
      if (t > 0) out += ' ';
      out += net.token(walk[t]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace hypalign
