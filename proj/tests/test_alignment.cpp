#include <gtest/gtest.h>

#include <cmath>

#include "hypalign/alignment.hpp"
#include "hypalign/error.hpp"
#include "hypalign/objective.hpp"

using namespace hypalign;

namespace {

// Ranking of one query whose candidate list is 0..n-1 in the given order.
Ranking ranking(NodeIndex query, std::vector<NodeIndex> order) {
  Ranking r;
  r.query = query;
  for (std::size_t i = 0; i < order.size(); ++i) r.candidates.emplace_back(order[i], static_cast<double>(i));
  return r;
}

GHParams component_at(double x, double y) {
  Eigen::VectorXd mu(2);
  mu << x, y;
  return GHParams(mu, 0.01 * Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2), 1.0, 1.0);
}

// Community model with the given components and one-hot
// responsibilities given by `assignment`.
CommunityModel one_hot(const std::vector<GHParams>& comps, const std::vector<int>& assignment) {
  Membership m;
  m.z = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(assignment.size()), static_cast<Eigen::Index>(comps.size()));
  for (std::size_t i = 0; i < assignment.size(); ++i) m.z(static_cast<Eigen::Index>(i), assignment[i]) = 1.0;
  m.priors = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(comps.size()), 1.0 / static_cast<double>(comps.size()));
  return CommunityModel(comps, m);
}

// Three labeled communities per side of two users each, every user anchored
// to its counterpart; components sit at the given locations.
struct LabeledFixture {
  NetworkPair pair;
  JointModel model;
};

LabeledFixture labeled_fixture(const std::vector<GHParams>& source_comps, const std::vector<GHParams>& target_comps) {
  LabeledFixture f;
  f.pair.source = load_edge_list("a0 a1\na1 b0\nb0 b1\nb1 c0\nc0 c1");
  f.pair.target = load_edge_list("x0 x1\nx1 y0\ny0 y1\ny1 z0\nz0 z1");
  load_labels(f.pair.source, "a0 A\na1 A\nb0 B\nb1 B\nc0 C\nc1 C");
  load_labels(f.pair.target, "x0 X\nx1 X\ny0 Y\ny1 Y\nz0 Z\nz1 Z");
  f.pair.anchors_train = load_anchors("a0 x0\nb0 y0\nc0 z0", f.pair.source, f.pair.target);
  f.pair.anchors_test = load_anchors("a1 x1\nb1 y1\nc1 z1", f.pair.source, f.pair.target);
  f.model.dim = 2;
  for (Side s : {Side::Source, Side::Target}) {
    auto& emb = f.model.net(s);
    emb.theta = Eigen::MatrixXd::Zero(2, 6);
    emb.context = Eigen::MatrixXd::Zero(2, 6);
    emb.tokens = (s == Side::Source ? f.pair.source : f.pair.target).tokens();
    emb.degrees.assign(6, 1);
  }
  f.model.net(Side::Source).community = one_hot(source_comps, {0, 0, 1, 1, 2, 2});
  f.model.net(Side::Target).community = one_hot(target_comps, {0, 0, 1, 1, 2, 2});
  return f;
}

}  // namespace

TEST(Metrics, HandExamples) {
  // Two test anchors: (source 0 -> target 0) found at rank 1, (source 1 -> target 1) at rank 3.
  const RankedCandidates ranked = {ranking(0, {0, 2, 1}), ranking(1, {2, 0, 1})};
  const std::vector<AnchorLink> truth = {{0, 0}, {1, 1}};
  EXPECT_EQ(precision_at_k(ranked, truth, 3), 1.0);
  EXPECT_EQ(precision_at_k(ranked, truth, 2), 0.5);
  EXPECT_EQ(map_at_k(ranked, truth, 3), (1.0 + 1.0 / 3.0) / 2.0);
  EXPECT_EQ(map_at_k(ranked, truth, 1), 0.5);
}

TEST(Metrics, AllFirstAndAllBeyond) {
  const RankedCandidates first = {ranking(0, {0, 1, 2}), ranking(1, {1, 0, 2})};
  const std::vector<AnchorLink> truth = {{0, 0}, {1, 1}};
  for (int k = 1; k <= 3; ++k) {
    EXPECT_EQ(precision_at_k(first, truth, k), 1.0);
    EXPECT_EQ(map_at_k(first, truth, k), 1.0);
  }
  const RankedCandidates last = {ranking(0, {1, 2, 0}), ranking(1, {0, 2, 1})};
  EXPECT_EQ(precision_at_k(last, truth, 2), 0.0);
  EXPECT_EQ(map_at_k(last, truth, 2), 0.0);
  EXPECT_THROW(precision_at_k(last, truth, 0), UsageError);
  EXPECT_THROW(map_at_k(last, truth, 0), UsageError);
}

TEST(Metrics, MonotoneInKAndMapBelowPrecision) {
  const RankedCandidates ranked = {ranking(0, {3, 0, 1, 2}), ranking(1, {1, 2, 3, 0}), ranking(2, {0, 1, 3, 2})};
  const std::vector<AnchorLink> truth = {{0, 0}, {1, 1}, {2, 2}};
  double lp = 0.0, lm = 0.0;
  for (int k = 1; k <= 4; ++k) {
    const double p = precision_at_k(ranked, truth, k), m = map_at_k(ranked, truth, k);
    EXPECT_GE(p, lp);
    EXPECT_GE(m, lm);
    EXPECT_LE(m, p);
    lp = p;
    lm = m;
  }
}

TEST(RankUsers, IdenticalFirstTiesByIndexOrderInvariant) {
  JointModel m;
  m.dim = 2;
  m.net(Side::Source).theta.resize(2, 4);
  m.net(Side::Source).theta << 0.3, -0.3, 0.0, 0.5, 0.0, 0.0, 0.3, 0.5;
  m.net(Side::Target).theta.resize(2, 1);
  m.net(Side::Target).theta << 0.0, 0.0;
  // Candidates 0, 1, 2 are equidistant from the origin; 3 is farther.
  const RankedCandidates r = rank_users(m, {0}, {3, 2, 1, 0});
  ASSERT_EQ(r[0].candidates.size(), 4u);
  EXPECT_EQ(r[0].candidates[0].first, 0u);
  EXPECT_EQ(r[0].candidates[1].first, 1u);
  EXPECT_EQ(r[0].candidates[2].first, 2u);
  EXPECT_EQ(r[0].candidates[3].first, 3u);
  const RankedCandidates again = rank_users(m, {0}, {1, 0, 3, 2});
  EXPECT_EQ(again[0].candidates, r[0].candidates);

  m.net(Side::Target).theta << 0.5, 0.5;
  EXPECT_EQ(rank_users(m, {0}, {0, 1, 2, 3})[0].candidates[0].first, 3u);
  EXPECT_EQ(rank_users(m, {0}, {0, 1, 2, 3})[0].candidates[0].second, 0.0);
  EXPECT_THROW(rank_users(m, {0}, {}), UsageError);
}

TEST(AlignCommunities, SingleAndIdentity) {
  auto single = labeled_fixture({component_at(0.1, 0.0), component_at(0.5, 0.0), component_at(0.0, 0.5)},
                                {component_at(0.0, 0.5), component_at(0.1, 0.0), component_at(0.5, 0.0)});
  const auto matches = align_communities(single.model);
  ASSERT_EQ(matches.size(), 3u);
  std::vector<bool> seen_s(3), seen_t(3);
  for (const auto& m : matches) {
    EXPECT_FALSE(seen_s[static_cast<std::size_t>(m.source)]);
    EXPECT_FALSE(seen_t[static_cast<std::size_t>(m.target)]);
    seen_s[static_cast<std::size_t>(m.source)] = seen_t[static_cast<std::size_t>(m.target)] = true;
    EXPECT_EQ(m.distance, 0.0);
    EXPECT_EQ(m.target, (m.source + 1) % 3);
  }

  JointModel one;
  one.dim = 2;
  one.net(Side::Source).community = one_hot({component_at(0.2, 0.2)}, {0});
  one.net(Side::Target).community = one_hot({component_at(-0.2, 0.1)}, {0});
  const auto m1 = align_communities(one);
  ASSERT_EQ(m1.size(), 1u);
  EXPECT_EQ(m1[0].source, 0);
  EXPECT_EQ(m1[0].target, 0);
}

TEST(CommunityAccuracy, SuccessFraction) {
  auto f = labeled_fixture({component_at(0.1, 0.0), component_at(0.5, 0.0), component_at(0.0, 0.5)},
                           {component_at(0.1, 0.0), component_at(0.5, 0.0), component_at(0.0, 0.5)});
  ASSERT_EQ(anchor_communities(f.pair, 0.6).size(), 3u);
  EXPECT_EQ(community_accuracy(align_communities(f.model), f.pair, f.model, 0.6), 1.0);
  const std::vector<CommunityMatch> two = {{0, 0, 0.0}, {1, 1, 0.0}, {2, 0, 0.0}};
  EXPECT_NEAR(community_accuracy(two, f.pair, f.model, 0.6), 2.0 / 3.0, 1e-15);
  const std::vector<CommunityMatch> none = {{0, 1, 0.0}, {1, 2, 0.0}, {2, 0, 0.0}};
  EXPECT_EQ(community_accuracy(none, f.pair, f.model, 0.6), 0.0);
  // Ratio of every community pair is 1.0 here; tau above it leaves no ground truth.
  EXPECT_THROW(community_accuracy(none, f.pair, f.model, 1.01), DataError);
}

TEST(Quality, Examples) {
  EXPECT_EQ(quality_from_distances({0.0, 0.0}), 1.0);
  EXPECT_NEAR(quality_from_distances({std::log(9.0)}), 0.2, 1e-6);
  EXPECT_THROW(quality_from_distances({}), DataError);

  // Paired locations (0.5, 0) and (-0.5, 0) are ln 9 apart.
  auto f = labeled_fixture({component_at(0.5, 0.0), component_at(0.1, 0.1), component_at(0.0, 0.5)},
                           {component_at(-0.5, 0.0), component_at(0.1, 0.1), component_at(0.0, 0.5)});
  const double q = quality(f.pair, f.model, 0.6);
  EXPECT_NEAR(q, (0.2 + 1.0 + 1.0) / 3.0, 1e-6);
  EXPECT_GT(q, 0.0);
  EXPECT_LE(q, 1.0);
}

TEST(Evaluate, CandidatesExcludeTrainingAnchors) {
  auto f = labeled_fixture({component_at(0.1, 0.0), component_at(0.5, 0.0), component_at(0.0, 0.5)},
                           {component_at(0.1, 0.0), component_at(0.5, 0.0), component_at(0.0, 0.5)});
  // Place each test pair at the same point so it ranks first.
  for (NodeIndex i = 0; i < 6; ++i) {
    f.model.net(Side::Source).theta.col(i) << 0.1 * i, 0.05;
    f.model.net(Side::Target).theta.col(i) << 0.1 * i, 0.05;
  }
  const AlignmentReport r = evaluate(f.model, f.pair, 0.6, {1, 2});
  EXPECT_EQ(r.candidates, 3u);
  EXPECT_EQ(r.queries, 3u);
  EXPECT_EQ(r.precision.at(1), 1.0);
  EXPECT_EQ(r.map.at(2), 1.0);
  EXPECT_EQ(*r.accuracy, 1.0);
  EXPECT_NE(format_report_text(r).find("precision"), std::string::npos);
  EXPECT_NE(format_report_json(r).find("\"community_accuracy\""), std::string::npos);
  EXPECT_NE(format_ranked(r, 1).find("x1\t1\ta1"), std::string::npos);
}

TEST(Evaluate, RejectsForeignModel) {
  auto f = labeled_fixture({component_at(0.1, 0.0), component_at(0.5, 0.0), component_at(0.0, 0.5)},
                           {component_at(0.1, 0.0), component_at(0.5, 0.0), component_at(0.0, 0.5)});
  f.model.net(Side::Source).tokens[0] = "other";
  EXPECT_THROW(evaluate(f.model, f.pair, 0.6, {1}), DataError);
}
