#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "hypalign/alignment.hpp"
#include "hypalign/benchgen.hpp"
#include "hypalign/error.hpp"

using namespace hypalign;

namespace {

SynthSpec small(std::uint64_t seed) {
  SynthSpec s;
  s.n = 120;
  s.communities = 3;
  s.p_in = 0.2;
  s.p_out = 0.01;
  s.seed = seed;
  return s;
}

std::string edges_text(const Network& n) { return format_edge_list(n); }

}  // namespace

TEST(Benchgen, Deterministic) {
  const SynthPair a = generate(small(5));
  const SynthPair b = generate(small(5));
  EXPECT_EQ(edges_text(a.pair.source), edges_text(b.pair.source));
  EXPECT_EQ(edges_text(a.pair.target), edges_text(b.pair.target));
  EXPECT_EQ(a.pair.anchors_train, b.pair.anchors_train);
  EXPECT_EQ(a.pair.anchors_test, b.pair.anchors_test);
  EXPECT_EQ(a.source_identity, b.source_identity);
  const SynthPair c = generate(small(6));
  EXPECT_NE(edges_text(a.pair.source), edges_text(c.pair.source));
}

TEST(Benchgen, UniformSubsampleWithinOneUser) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (double eta : {0.3, 0.6, 0.8}) {
      SynthSpec s = small(seed);
      s.eta = eta;
      s.balance_communities = false;
      const NetworkPair p = generate(s).pair;
      const double one_user = 2.0 / static_cast<double>(p.source.size() + p.target.size());
      EXPECT_NEAR(overlap_rate(p), eta, one_user + 1e-12) << seed << " " << eta;
    }
  }
}

TEST(Benchgen, BalancedKeepsEveryCommunityAtEta) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SynthSpec s = small(seed);
    s.eta = 0.6;
    const NetworkPair p = generate(s).pair;
    ASSERT_TRUE(p.community_truth);
    for (const auto& [a, b] : *p.community_truth) {
      EXPECT_GE(anchor_community_ratio(a, b, p), 0.6 - 1e-12) << seed;
    }
    EXPECT_EQ(anchor_communities(p, 0.6).size(), 3u) << seed;
    // Overall rate within one user per community.
    const double one_user = 2.0 / static_cast<double>(p.source.size() + p.target.size());
    EXPECT_GE(overlap_rate(p), 0.6 - one_user);
    EXPECT_LE(overlap_rate(p), 0.6 + 3 * one_user);
  }
}

TEST(Benchgen, NoiselessCopiesMatchBase) {
  SynthSpec s = small(2);
  s.p_in = 0.5;
  s.edge_keep = 1.0;
  s.eta = 1.0;
  const SynthPair g = generate(s);
  const NetworkPair& p = g.pair;
  ASSERT_EQ(p.source.size(), 120u);
  ASSERT_EQ(p.target.size(), 120u);
  EXPECT_EQ(p.all_anchors().size(), 120u);
  EXPECT_EQ(p.source.edge_count(), p.target.edge_count());
  // Every anchor joins nodes of the same hidden identity, and the anchor map
  // carries source edges onto target edges.
  std::vector<NodeIndex> to_target(p.source.size());
  for (const AnchorLink& a : p.all_anchors()) {
    EXPECT_EQ(g.source_identity[a.source], g.target_identity[a.target]);
    to_target[a.source] = a.target;
  }
  for (NodeIndex u = 0; u < p.source.size(); ++u) {
    for (NodeIndex v : p.source.neighbors(u)) EXPECT_TRUE(p.target.adjacent(to_target[u], to_target[v]));
  }
}

TEST(Benchgen, SplitAndLabels) {
  SynthSpec s = small(3);
  s.train_fraction = 0.25;
  const NetworkPair p = generate(s).pair;
  const double total = static_cast<double>(p.all_anchors().size());
  EXPECT_NEAR(static_cast<double>(p.anchors_train.size()), 0.25 * total, 0.5 + 1e-9);
  std::set<AnchorLink> train(p.anchors_train.begin(), p.anchors_train.end());
  for (const AnchorLink& a : p.anchors_test) EXPECT_FALSE(train.count(a));
  for (const Network* n : {&p.source, &p.target}) {
    ASSERT_TRUE(n->has_labels());
    for (int c : n->labels()) EXPECT_GE(c, 0);
  }
}

TEST(Benchgen, RejectsInfeasible) {
  SynthSpec s = small(1);
  s.eta = 1.5;
  EXPECT_THROW(generate(s), UsageError);
  s = small(1);
  s.p_out = 0.3;
  EXPECT_THROW(generate(s), UsageError);
  s = small(1);
  s.edge_keep = 0.0;
  EXPECT_THROW(generate(s), UsageError);
  // Edge loss leaves some users unanchored, so eta = 1 cannot be reached.
  s = small(1);
  s.edge_keep = 0.3;
  s.p_in = 0.05;
  s.eta = 1.0;
  EXPECT_THROW(generate(s), DataError);
}

TEST(PairDir, RoundTrip) {
  const SynthPair g = generate(small(4));
  const std::string dir = (std::filesystem::temp_directory_path() / "hypalign_test_pairdir").string();
  std::filesystem::remove_all(dir);
  write_pair_dir(dir, g.pair, &g);
  const NetworkPair back = load_pair_dir(dir);
  EXPECT_EQ(edges_text(back.source), edges_text(g.pair.source));
  EXPECT_EQ(edges_text(back.target), edges_text(g.pair.target));
  EXPECT_EQ(back.anchors_train, g.pair.anchors_train);
  EXPECT_EQ(back.anchors_test, g.pair.anchors_test);
  EXPECT_EQ(back.source.labels(), g.pair.source.labels());
  EXPECT_EQ(back.community_truth, g.pair.community_truth);
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(dir) / PairFiles::identity));
  std::filesystem::remove_all(dir);
  EXPECT_THROW(load_pair_dir(dir), DataError);
}
