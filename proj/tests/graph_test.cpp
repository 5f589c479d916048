#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hmer/error.hpp"
#include "hmer/graph/frpt.hpp"
#include "hmer/graph/geometry.hpp"
#include "hmer/graph/graph_dump.hpp"
#include "hmer/graph/modeled_graph.hpp"
#include "hmer/graph/visibility.hpp"
#include "hmer/ink/preprocess.hpp"
#include "hmer/ink/synthetic.hpp"
#include "hmer/labels/eslg.hpp"
#include "oracles.hpp"

using namespace hmer;
using namespace hmer::graph;
using ink::Point;
using ink::ResampledStroke;

namespace {

ResampledStroke box(double x0, double y0, double x1, double y1) {
  return {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}}};
}

}  // namespace

TEST(Geometry, HullMatchesGiftWrapping) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Point> pts(3 + trial % 20);
    for (auto& p : pts) p = {std::round(u(rng) * 4) / 4, std::round(u(rng) * 4) / 4};
    const auto a = convex_hull(pts);
    const auto b = oracle::jarvis_hull(pts);
    ASSERT_EQ(a.size(), b.size());
    // Same cycle up to rotation.
    const auto start = std::find(a.begin(), a.end(), b[0]);
    ASSERT_NE(start, a.end());
    std::vector<Point> rotated(start, a.end());
    rotated.insert(rotated.end(), a.begin(), start);
    EXPECT_EQ(rotated, b);
    const auto c = hull_centroid(a), d = oracle::polygon_centroid(b);
    EXPECT_NEAR(c.x, d.x, 1e-9);
    EXPECT_NEAR(c.y, d.y, 1e-9);
  }
}

TEST(Geometry, SegmentThroughInterior) {
  const std::vector<Point> sq{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  EXPECT_TRUE(segment_crosses_interior(sq, {-1, 1}, {3, 1}));
  EXPECT_FALSE(segment_crosses_interior(sq, {-1, 0}, {3, 0}));  // along an edge
  EXPECT_FALSE(segment_crosses_interior(sq, {-1, 3}, {3, 3}));
  EXPECT_FALSE(segment_crosses_interior(sq, {-1, -1}, {0, 0}));  // ends at a corner
  const std::vector<Point> flat{{0, 0}, {2, 0}};
  EXPECT_FALSE(segment_crosses_interior(flat, {1, -1}, {1, 1}));
}

TEST(Visibility, MiddleBoxBlocks) {
  // A tall box between two small ones hides them from each other.
  std::vector<ResampledStroke> s{box(0, 4, 1, 5), box(3, 0, 4, 10), box(6, 4, 7, 5)};
  const auto a = line_of_sight(s);
  EXPECT_TRUE(a(0, 1));
  EXPECT_TRUE(a(1, 2));
  EXPECT_FALSE(a(0, 2));
  EXPECT_TRUE(a.symmetric());
  for (std::size_t i = 0; i < 3; ++i) EXPECT_FALSE(a(i, i));
  const auto t = add_temporal_edges(a);
  EXPECT_TRUE(t(0, 1));
  EXPECT_FALSE(t(0, 2));
  EXPECT_EQ(full_connect(3).edge_count(), 6u);
}

TEST(Visibility, MatchesSampledOracle) {
  std::mt19937_64 rng(77);
  std::size_t agree = 0, total = 0;
  for (int scene = 0; scene < 40; ++scene) {
    const auto raw = oracle::random_scene(rng, 3 + scene % 4);
    std::vector<ResampledStroke> strokes;
    for (const auto& s : raw) strokes.push_back({s});
    const auto got = line_of_sight(strokes);
    const auto want = oracle::sampled_line_of_sight(raw, 2000);
    for (std::size_t i = 0; i < raw.size(); ++i)
      for (std::size_t j = i + 1; j < raw.size(); ++j) {
        ++total;
        agree += got(i, j) == want[i][j];
      }
  }
  EXPECT_GE(double(agree), 0.99 * double(total));
}

TEST(Frpt, DirectionsAndLayout) {
  const ResampledStroke src{{{0, 0}, {0, 0}}};
  const ResampledStroke right{{{1, 0}, {2, 0}, {3, 0}}};
  const auto f = frpt_features(src, right, 3);
  ASSERT_EQ(f.size(), 15u);
  for (int k = 0; k < 3; ++k) {
    EXPECT_DOUBLE_EQ(f[k], 1.0);        // right
    EXPECT_DOUBLE_EQ(f[3 + k], 0.0);    // left
    EXPECT_NEAR(f[6 + k], 0.0, 1e-15);  // up
    EXPECT_NEAR(f[9 + k], 0.0, 1e-15);  // down
    EXPECT_DOUBLE_EQ(f[12 + k], double(k + 1));
  }
  // y grows downward: a point below has positive y.
  const ResampledStroke below{{{0, 2}, {0, 2}}};
  const auto g = frpt_features(src, below, 1);
  EXPECT_DOUBLE_EQ(g[3], 1.0);
  EXPECT_NEAR(g[2], 0.0, 1e-15);
  // 45 degrees up-right: half way between the two directions.
  const ResampledStroke diag{{{1, -1}}};
  const auto h = frpt_features(src, diag, 1);
  EXPECT_NEAR(h[0], 0.5, 1e-12);
  EXPECT_NEAR(h[2], 0.5, 1e-12);
  EXPECT_EQ(downsample_index(0, 10, 150), 0u);
  EXPECT_EQ(downsample_index(9, 10, 150), 149u);
}

TEST(Frpt, InvariantsOnRandomPairs) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 300; ++trial) {
    ResampledStroke a, b;
    for (int k = 0; k < 20; ++k) {
      a.points.push_back({u(rng), u(rng)});
      b.points.push_back({u(rng), u(rng)});
    }
    const auto f = frpt_features(a, b, 10);
    ASSERT_EQ(f.size(), 50u);
    for (int k = 0; k < 10; ++k) {
      for (int d = 0; d < 4; ++d) {
        EXPECT_GE(f[d * 10 + k], 0.0);
        EXPECT_LE(f[d * 10 + k], 1.0);
      }
      EXPECT_EQ(f[k] * f[10 + k], 0.0);
      EXPECT_EQ(f[20 + k] * f[30 + k], 0.0);
    }
  }
}

class ModeledGraphTest : public ::testing::Test {
 protected:
  GraphConfig config() const {
    GraphConfig c;
    c.node_samples = 16;
    c.edge_samples = 4;
    c.max_strokes = 4;
    return c;
  }
};

TEST_F(ModeledGraphTest, LocalGraphShapes) {
  const auto e = ink::generate_synthetic(5, 1, 6)[0];
  const auto c = config();
  const auto g = build_local_graph(e.ink, c);
  const std::size_t n = e.ink.strokes.size();
  EXPECT_EQ(g.n, n);
  EXPECT_FALSE(g.has_master);
  EXPECT_EQ(g.node_features.shape(), (tensor::Shape{n, 2, 16}));
  EXPECT_EQ(g.edge_features.shape(), (tensor::Shape{n, n, 20}));
  EXPECT_TRUE(g.adjacency.symmetric());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!g.adjacency(i, j))
        for (std::size_t k = 0; k < 20; ++k) EXPECT_EQ(g.edge_features[(i * n + j) * 20 + k], 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) EXPECT_TRUE(g.adjacency(i, i + 1));

  auto fc = c;
  fc.full_connect = true;
  EXPECT_EQ(build_local_graph(e.ink, fc).adjacency.edge_count(), n * (n - 1));
}

TEST_F(ModeledGraphTest, MasterNode) {
  const auto e = ink::generate_synthetic(6, 1, 5)[0];
  const auto local = build_local_graph(e.ink, config());
  const auto g = augment_global(local);
  EXPECT_TRUE(g.has_master);
  EXPECT_EQ(g.n, local.n + 1);
  EXPECT_EQ(g.stroke_ids[0], kNoStroke);
  EXPECT_EQ(g.node_mask[0], 0);
  for (std::size_t j = 1; j < g.n; ++j) {
    EXPECT_TRUE(g.adjacency(0, j));
    EXPECT_TRUE(g.adjacency(j, 0));
    for (std::size_t k = 0; k < 20; ++k) EXPECT_EQ(g.edge_features[j * 20 + k], 0.0);
  }
  const auto sum = node_feature_sum(local);
  for (std::size_t k = 0; k < sum.size(); ++k) EXPECT_DOUBLE_EQ(g.node_features[k], sum[k]);
  EXPECT_THROW(augment_global(g), ArgumentError);
}

TEST_F(ModeledGraphTest, SubExpressionsArePaddedAndMasked) {
  const auto& vocab = labels::Vocabulary::crohme();
  const auto c = config();
  for (const auto& e : ink::generate_synthetic(12, 20, 8)) {
    const auto local = build_local_graph(e.ink, c);
    const auto eslg = labels::to_eslg(e.labels, local.adjacency, vocab).eslg;
    const auto parts = split_subexpressions(local, eslg, c, vocab);
    const std::size_t n = e.ink.strokes.size();
    EXPECT_EQ(parts.size(), (n + c.max_strokes - 1) / c.max_strokes);
    std::size_t supervised = 0;
    for (const auto& p : parts) {
      EXPECT_EQ(p.graph.n, c.max_strokes + 1);
      EXPECT_EQ(p.eslg.size(), c.max_strokes);
      for (std::size_t j = 1; j < p.graph.n; ++j) EXPECT_TRUE(p.graph.adjacency(0, j));
      for (std::size_t i = 1; i < p.graph.n; ++i) {
        if (p.graph.stroke_ids[i] == kNoStroke) {
          EXPECT_EQ(p.graph.node_mask[i], 0);
          for (std::size_t j = 1; j < p.graph.n; ++j) EXPECT_FALSE(p.graph.adjacency(i, j));
        }
        supervised += p.graph.node_mask[i];
      }
      // Master feature is the whole-expression sum.
      const auto sum = node_feature_sum(local);
      for (std::size_t k = 0; k < sum.size(); ++k) EXPECT_NEAR(p.graph.node_features[k], sum[k], 1e-12);
    }
    EXPECT_LE(supervised, n);
  }
}

TEST_F(ModeledGraphTest, DumpIsValidJson) {
  const auto e = ink::generate_synthetic(6, 1, 3)[0];
  const auto text = dump_graph_json(augment_global(build_local_graph(e.ink, config())));
  EXPECT_NE(text.find("\"has_master\""), std::string::npos);
}
