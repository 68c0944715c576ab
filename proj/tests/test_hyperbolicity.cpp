#include <gtest/gtest.h>

#include <algorithm>

#include "hypalign/error.hpp"
#include "hypalign/hyperbolicity.hpp"
#include "hypalign/rng.hpp"
#include "support.hpp"

using namespace hypalign;

TEST(AllPairs, PathTriangleIsolated) {
  const DistanceMatrix path = all_pairs_distances(load_edge_list("a b\nb c"));
  EXPECT_EQ(path(0, 2), 2);
  const DistanceMatrix tri = all_pairs_distances(load_edge_list("a b\nb c\nc a"));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(tri(i, j), i == j ? 0 : 1);
  }
  // Node "z" only appears in a disconnected component.
  Network net = load_edge_list("a b\ny z");
  net = net.without_nodes({false, false, true, false});
  const DistanceMatrix iso = all_pairs_distances(net);
  const NodeIndex z = *net.find("z");
  for (NodeIndex j = 0; j < net.size(); ++j) {
    EXPECT_EQ(iso(z, j), j == z ? 0 : DistanceMatrix::kUnreachable);
  }
}

TEST(AllPairs, TriangleInequalityOnZachary) {
  const Network z = testsupport::zachary();
  const DistanceMatrix d = all_pairs_distances(z);
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (std::size_t j = 0; j < z.size(); ++j) {
      EXPECT_EQ(d(i, j), d(j, i));
      for (std::size_t k = 0; k < z.size(); ++k) ASSERT_LE(d(i, j), d(i, k) + d(k, j));
    }
  }
}

TEST(FourPoint, Examples) {
  // Path 0-1-2-3 with (w,x,y,z) = (0,1,2,3): sums d01+d23=2, d02+d13=4, d03+d12=4.
  EXPECT_EQ(*four_point_delta(1, 1, 2, 2, 3, 1), 0.0);
  // 4-cycle w-x-y-z: sums dwx+dyz=2, dwy+dxz=4, dwz+dxy=2.
  EXPECT_EQ(*four_point_delta(1, 1, 2, 2, 1, 1), 1.0);
  EXPECT_EQ(*four_point_delta(3, 3, 3, 3, 3, 3), 0.0);
  EXPECT_FALSE(four_point_delta(1, 1, std::numeric_limits<double>::infinity(), 2, 1, 1).has_value());
}

TEST(GraphDelta, Zachary) {
  EXPECT_EQ(graph_delta(testsupport::zachary()).delta, 1.0);
}

TEST(GraphDelta, Trees) {
  EXPECT_EQ(graph_delta(testsupport::binary_tree(5)).delta, 0.0);
  EXPECT_EQ(graph_delta(testsupport::path_graph(50)).delta, 0.0);
}

TEST(GraphDelta, SampledIsLowerBoundAndDeterministic) {
  const Network z = testsupport::zachary();
  DeltaOptions opt;
  opt.exact = false;
  opt.samples = 20000;
  opt.seed = 4;
  const DeltaResult a = graph_delta(z, opt);
  const DeltaResult b = graph_delta(z, opt);
  EXPECT_EQ(a.delta, b.delta);
  EXPECT_EQ(a.quadruples, b.quadruples);
  EXPECT_FALSE(a.exact);
  EXPECT_LE(a.delta, graph_delta(z).delta);
}

TEST(GraphDelta, RelabelingInvariant) {
  const std::string text = read_text_file(testsupport::data_path("zachary.edges"));
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t end = text.find('\n', start);
    lines.push_back(text.substr(start, end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  Rng rng = make_rng(21);
  shuffle(lines, rng);
  std::string shuffled;
  for (const auto& l : lines) shuffled += l + "\n";
  EXPECT_EQ(graph_delta(load_edge_list(shuffled)).delta, 1.0);
}

TEST(GraphDelta, ExactCap) {
  DeltaOptions opt;
  opt.exact_cap = 40;
  EXPECT_THROW(graph_delta(testsupport::path_graph(50), opt), UsageError);
}

TEST(GraphDelta, DisconnectedQuadruplesSkipped) {
  // Two disjoint 4-cycles: each alone has delta 1.
  const Network net = load_edge_list("a b\nb c\nc d\nd a\nw x\nx y\ny z\nz w");
  const DeltaResult r = graph_delta(net);
  EXPECT_EQ(r.delta, 1.0);
  EXPECT_EQ(r.quadruples, 2u);
}
