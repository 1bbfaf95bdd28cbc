#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "mdskit/graph.hpp"
#include "support/oracles.hpp"

using namespace mdskit;

TEST(Graph, BuildsSymmetricSortedAdjacency) {
  const Graph g(4, {{2, 0}, {0, 1}, {3, 0}, {1, 0}});
  EXPECT_EQ(g.edge_count(), 3u);  // duplicate (0,1) merged
  ASSERT_EQ(g.degree(0), 3);
  EXPECT_EQ(std::vector<Vertex>(g.neighbors(0).begin(), g.neighbors(0).end()), (std::vector<Vertex>{1, 2, 3}));
  for (Vertex u = 0; u < g.order(); ++u)
    for (Vertex v : g.neighbors(u)) EXPECT_TRUE(g.has_edge(v, u));
}

TEST(Graph, RejectsSelfLoopsAndOutOfRange) {
  EXPECT_THROW(Graph(3, {{1, 1}}), InvariantError);
  EXPECT_THROW(Graph(3, {{0, 3}}), InvariantError);
  EXPECT_THROW(Graph(3, {{-1, 0}}), InvariantError);
}

TEST(VertexSet, KeepsInsertionOrderAndBitmapInSync) {
  VertexSet s(6, {4, 1, 3});
  EXPECT_FALSE(s.insert(1));
  EXPECT_TRUE(s.erase(1));
  EXPECT_FALSE(s.contains(1));
  EXPECT_EQ(std::vector<Vertex>(s.members().begin(), s.members().end()), (std::vector<Vertex>{4, 3}));
  EXPECT_EQ(s.size(), 2u);
  EXPECT_THROW(s.insert(6), std::out_of_range);
  EXPECT_EQ(VertexSet(6, {3, 4}), s);  // set equality ignores order
}

TEST(ClosedNeighborhood, Examples) {
  EXPECT_EQ(closed_neighborhood(oracle::path(4), VertexSet(4, {1})), VertexSet(4, {0, 1, 2}));
  EXPECT_TRUE(closed_neighborhood(oracle::petersen(), VertexSet(10)).empty());
  EXPECT_EQ(closed_neighborhood(oracle::cycle(6), VertexSet(6, {0, 3})).size(), 6u);
}

TEST(IsDominating, Examples) {
  EXPECT_TRUE(is_dominating(oracle::complete(5), VertexSet(5, {2})));
  EXPECT_FALSE(is_dominating(oracle::cycle(6), VertexSet(6, {0, 2})));
  const Graph empty(4, std::span<const Edge>{});
  EXPECT_TRUE(is_dominating(empty, VertexSet::all(4)));
  EXPECT_FALSE(is_dominating(empty, VertexSet(4, {0, 1, 2})));
  EXPECT_FALSE(is_dominating(empty, VertexSet(4, {1, 3})));
}

TEST(IsDominating, AgreesWithBitmaskOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const Graph g = generate_er(n, 0.1 * static_cast<double>(1 + rng() % 9), rng());
    const std::uint32_t mask = static_cast<std::uint32_t>(rng()) & ((1U << n) - 1U);
    VertexSet s(n);
    for (int v = 0; v < n; ++v)
      if (mask >> v & 1U) s.insert(v);
    EXPECT_EQ(is_dominating(g, s), oracle::dominates(g, mask));
  }
}

TEST(GraphStats, Examples) {
  EXPECT_EQ(graph_stats(oracle::complete(4)), (GraphStats{4, 6, 3, 3}));
  EXPECT_EQ(graph_stats(oracle::path(4)), (GraphStats{4, 3, 2, 1}));
  EXPECT_EQ(graph_stats(oracle::star(9)), (GraphStats{10, 9, 9, 1}));
}

TEST(GenerateEr, Extremes) {
  EXPECT_EQ(generate_er(10, 0.0, 1).edge_count(), 0u);
  EXPECT_EQ(generate_er(10, 1.0, 1).edge_count(), 45u);
  EXPECT_THROW(generate_er(10, 1.5, 1), std::invalid_argument);
  EXPECT_THROW(generate_er(10, -0.1, 1), std::invalid_argument);
}

TEST(GenerateEr, EdgeCountWithinFourSigma) {
  const Graph g = generate_er(200, 0.02, 7);
  const double pairs = 200.0 * 199.0 / 2.0;
  const double mean = 0.02 * pairs;  // 398
  const double sigma = std::sqrt(pairs * 0.02 * 0.98);
  EXPECT_NEAR(static_cast<double>(g.edge_count()), mean, 4 * sigma);
}

TEST(GenerateEr, SkippingMatchesBernoulliDensity) {
  // Geometric skipping (p <= 0.25) and per-pair flips (p > 0.25) should both
  // land on p * C(n,2) in aggregate.
  for (double p : {0.05, 0.25, 0.3}) {
    double total = 0.0;
    const int n = 60;
    const int reps = 200;
    for (int s = 0; s < reps; ++s) total += static_cast<double>(generate_er(n, p, s).edge_count());
    const double pairs = n * (n - 1) / 2.0;
    const double sigma = std::sqrt(pairs * p * (1 - p) / reps);
    EXPECT_NEAR(total / reps, p * pairs, 4 * sigma) << "p=" << p;
  }
}

TEST(GenerateBa, EdgeCountsAndErrors) {
  // Empty 4-vertex core: newcomer 4 attaches to all of it.
  const Graph star_like = generate_ba(5, 4, 1);
  EXPECT_EQ(star_like.edge_count(), 4u);
  EXPECT_EQ(star_like.degree(4), 4);
  // Complete core: the only graph possible is K5.
  EXPECT_EQ(generate_ba(5, 4, 1, BaCore::complete), oracle::complete(5));
  EXPECT_EQ(generate_ba(100, 2, 3).edge_count(), 196u);
  EXPECT_THROW(generate_ba(5, 5, 1), std::invalid_argument);
  EXPECT_THROW(generate_ba(5, 0, 1), std::invalid_argument);
}

TEST(GenerateBa, HeavyTailAndConnected) {
  const Graph g = generate_ba(100, 2, 3);
  std::vector<int> deg;
  for (Vertex v = 0; v < g.order(); ++v) deg.push_back(g.degree(v));
  std::sort(deg.begin(), deg.end());
  EXPECT_GT(deg.back(), deg[deg.size() / 2]);
  // Connected: BFS from 0 reaches everything.
  std::vector<char> seen(100, 0);
  std::vector<Vertex> queue{0};
  seen[0] = 1;
  for (std::size_t i = 0; i < queue.size(); ++i)
    for (Vertex w : g.neighbors(queue[i]))
      if (!seen[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
  EXPECT_EQ(queue.size(), 100u);
}

TEST(Generators, DeterministicPerSeed) {
  EXPECT_EQ(generate_er(80, 0.1, 5), generate_er(80, 0.1, 5));
  EXPECT_EQ(generate_ba(80, 3, 5), generate_ba(80, 3, 5));
  EXPECT_NE(generate_er(80, 0.1, 5), generate_er(80, 0.1, 6));
}

TEST(Properties, AllVerticesDominateAndNeighborhoodIsMonotone) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 40);
    const Graph g = trial % 2 ? generate_er(n, 0.1, rng()) : generate_ba(n, 1 + static_cast<int>(rng() % (n - 1)), rng());
    EXPECT_TRUE(is_dominating(g, VertexSet::all(n)));
    VertexSet small(n);
    VertexSet big(n);
    for (Vertex v = 0; v < n; ++v) {
      const auto r = rng() % 3;
      if (r == 0) small.insert(v);
      if (r <= 1) big.insert(v);
    }
    EXPECT_TRUE(closed_neighborhood(g, small).is_subset_of(closed_neighborhood(g, big)));
  }
}

TEST(Properties, RelabelingCommutesWithClosedNeighborhood) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 30);
    const Graph g = generate_er(n, 0.15, rng());
    std::vector<Vertex> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    VertexSet s(n);
    for (Vertex v = 0; v < n; ++v)
      if (rng() % 4 == 0) s.insert(v);
    VertexSet permuted_s(n);
    for (Vertex v : s.members()) permuted_s.insert(perm[v]);
    const VertexSet image = closed_neighborhood(g, s);
    VertexSet expected(n);
    for (Vertex v : image.members()) expected.insert(perm[v]);
    EXPECT_EQ(closed_neighborhood(permute(g, perm), permuted_s), expected);
  }
}

TEST(EdgeList, ParsesCommentsAndBlankLines) {
  std::istringstream in("# a path\n\n4 3\n0 1\n1 2  # trailing\n2 3\n");
  const auto loaded = read_edge_list(in);
  EXPECT_EQ(loaded.graph, oracle::path(4));
  EXPECT_TRUE(loaded.labels.empty());
}

TEST(EdgeList, RemapsArbitraryLabels) {
  std::istringstream in("4 3\nalice bob\nbob carol\ncarol 17\n");
  const auto loaded = read_edge_list(in);
  EXPECT_EQ(loaded.graph, oracle::path(4));
  EXPECT_EQ(loaded.labels, (std::vector<std::string>{"alice", "bob", "carol", "17"}));
}

TEST(EdgeList, Errors) {
  std::istringstream short_file("3 2\n0 1\n");
  EXPECT_THROW(read_edge_list(short_file), ParseError);
  std::istringstream bad_header("three 2\n");
  EXPECT_THROW(read_edge_list(bad_header), ParseError);
  std::istringstream loop("2 1\n1 1\n");
  EXPECT_THROW(read_edge_list(loop), ParseError);
  std::istringstream extra("2 1\n0 1\n1 0\n");
  EXPECT_THROW(read_edge_list(extra), ParseError);
}

TEST(EdgeList, WriteThenReadIsIdentity) {
  const Graph g = generate_er(40, 0.1, 9);
  std::stringstream buf;
  write_edge_list(buf, g);
  EXPECT_EQ(read_edge_list(buf).graph, g);
}
