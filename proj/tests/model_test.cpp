#include <gtest/gtest.h>

#include <cmath>

#include "hmer/error.hpp"
#include "hmer/model/batch.hpp"
#include "hmer/model/egat.hpp"
#include "hmer/model/parameters.hpp"
#include "hmer/train/losses.hpp"
#include "model_support.hpp"
#include "support.hpp"

using namespace hmer;
using namespace hmer::model;
using hmer::testing::random_sample;
using hmer::testing::small_graph_config;
using hmer::testing::toy_model;
using tensor::Tensor;

TEST(Parameters, ShapesFollowConfig) {
  ModelConfig c;
  const auto shapes = parameter_shapes(c);
  EXPECT_EQ(shapes.at("egat0.w_h"), (tensor::Shape{512, 512}));
  EXPECT_EQ(shapes.at("egat4.w_b"), (tensor::Shape{512, 512}));
  EXPECT_EQ(shapes.at("egat2.attention"), (tensor::Shape{1536, 1}));
  EXPECT_EQ(shapes.at("edge_embed.fc1.weight"), (tensor::Shape{50, 384}));
  EXPECT_EQ(shapes.at("edge_embed.fc2.weight"), (tensor::Shape{384, 512}));
  EXPECT_EQ(shapes.at(readout_name(5, "node", "fc1") + ".weight"), (tensor::Shape{1024, 384}));
  EXPECT_EQ(shapes.at(readout_name(5, "node", "fc2") + ".weight"), (tensor::Shape{384, 101}));
  EXPECT_EQ(shapes.count(readout_name(0, "edge", "fc2") + ".weight"), 1u);
  EXPECT_EQ(shapes.count("egat5.w_h"), 0u);

  c.aux_readout = false;
  EXPECT_EQ(parameter_shapes(c).count(readout_name(0, "edge", "fc2") + ".weight"), 0u);
}

TEST(Parameters, InitIsSeededAndBounded) {
  const auto c = toy_model();
  const auto a = init_parameters<float>(c, 3);
  EXPECT_EQ(a, init_parameters<float>(c, 3));
  EXPECT_NE(a, init_parameters<float>(c, 4));
  check_parameters(c, a);
  for (const auto& [name, t] : a) {
    if (name.ends_with(".bias")) {
      for (float v : t.values()) EXPECT_EQ(v, 0.0f);
    }
  }
  const auto& w = a.at("egat0.w_h");
  const float bound = std::sqrt(6.0f / 16.0f);
  for (float v : w.values()) EXPECT_LE(std::abs(v), bound);
  auto broken = a;
  broken.erase("egat0.w_h");
  EXPECT_THROW(check_parameters(c, broken), ArgumentError);
}

TEST(Batch, BlockDiagonal) {
  std::mt19937_64 rng(2);
  const auto gc = small_graph_config();
  const auto mc = toy_model();
  std::vector<graph::GraphSample> s{random_sample(rng, 3, gc, mc), random_sample(rng, 5, gc, mc)};
  const auto b = make_batch(s);
  EXPECT_EQ(b.nodes, s[0].graph.n + s[1].graph.n);
  EXPECT_EQ(b.width, s[1].graph.n);
  EXPECT_EQ(b.edge_count(), s[0].graph.adjacency.edge_count() + s[1].graph.adjacency.edge_count());
  for (std::size_t e = 0; e < b.edge_count(); ++e) {
    const bool first_src = b.src[e] < s[0].graph.n, first_dst = b.dst[e] < s[0].graph.n;
    EXPECT_EQ(first_src, first_dst);
  }
  EXPECT_EQ(b.label_nodes.size(), 8u);
}

TEST(Forward, AttentionRowsSumToOne) {
  std::mt19937_64 rng(8);
  const auto gc = small_graph_config();
  const auto mc = toy_model();
  const auto params = init_parameters<double>(mc, 1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<graph::GraphSample> s{random_sample(rng, 2 + trial % 6, gc, mc), random_sample(rng, 4, gc, mc)};
    const auto batch = make_batch(s);
    tensor::Tape<double> tape;
    const auto out = forward(tape, bind_parameters(tape, params, false), batch, mc, false, 0);
    for (Var a : out.attention) {
      std::vector<double> rows(batch.nodes, 0.0);
      const auto& alpha = tape.value(a);
      for (std::size_t e = 0; e < batch.edge_count(); ++e) rows[batch.src[e]] += alpha[e];
      for (std::size_t i = 0; i < batch.nodes; ++i) EXPECT_NEAR(rows[i], 1.0, 1e-12);
    }
  }
}

TEST(Forward, BatchedEqualsSeparate) {
  std::mt19937_64 rng(13);
  const auto gc = small_graph_config();
  const auto mc = toy_model();
  const auto params = init_parameters<double>(mc, 5);
  std::vector<graph::GraphSample> s{random_sample(rng, 4, gc, mc), random_sample(rng, 2, gc, mc),
                                    random_sample(rng, 6, gc, mc)};
  const auto together = predict(params, mc, s, 3);
  for (std::size_t g = 0; g < s.size(); ++g) {
    const auto alone = predict(params, mc, std::span(&s[g], 1), 1);
    EXPECT_EQ(alone[0].node_labels, together[g].node_labels);
    EXPECT_EQ(alone[0].edge_labels, together[g].edge_labels);
  }
  // Logits too, not only argmax.
  tensor::Tape<double> t1, t2;
  const auto o1 = forward(t1, bind_parameters(t1, params, false), make_batch(s), mc, false, 0);
  const auto o2 = forward(t2, bind_parameters(t2, params, false), make_batch(std::span(&s[2], 1)), mc, false, 0);
  const auto& all = t1.value(o1.final_nodes());
  const auto& one = t2.value(o2.final_nodes());
  const std::size_t offset = 4 + 2;
  for (std::size_t i = 0; i < one.size(); ++i) EXPECT_NEAR(all[offset * 5 + i], one[i], 1e-12);
}

TEST(Forward, DropoutDependsOnlyOnSeed) {
  std::mt19937_64 rng(4);
  const auto gc = small_graph_config();
  auto mc = toy_model();
  mc.dropout = 0.3;
  const auto params = init_parameters<float>(mc, 1);
  std::vector<graph::GraphSample> s{random_sample(rng, 5, gc, mc)};
  const auto batch = make_batch(s);
  auto run = [&](bool training, std::uint64_t seed) {
    tensor::Tape<float> tape;
    const auto out = forward(tape, bind_parameters(tape, params, false), batch, mc, training, seed);
    return tape.value(out.final_nodes());
  };
  EXPECT_EQ(run(true, 9), run(true, 9));
  EXPECT_NE(run(true, 9), run(true, 10));
  EXPECT_EQ(run(false, 9), run(false, 10));
}

TEST(Attention, TwoNodeGraphAndMasterColumn) {
  std::mt19937_64 rng(6);
  auto gc = small_graph_config();
  const auto mc = toy_model();
  const auto params = init_parameters<float>(mc, 2);
  gc.global = false;
  const auto local = attention_matrix(params, mc, random_sample(rng, 2, gc, mc));
  EXPECT_NEAR(local.at(0, 1), 1.0, 1e-6);
  EXPECT_NEAR(local.at(1, 0), 1.0, 1e-6);
  EXPECT_EQ(local.at(0, 0), 0.0);

  gc.global = true;
  const auto m = attention_matrix(params, mc, random_sample(rng, 5, gc, mc));
  for (std::size_t i = 1; i < 6; ++i) EXPECT_GT(m.at(i, 0), 0.0);
}

TEST(GradientModel, EndToEndToyModel) {
  std::mt19937_64 rng(21);
  const auto gc = small_graph_config();
  auto mc = toy_model();
  mc.dropout = 0.2;
  auto params = init_parameters<double>(mc, 7);
  // Zero biases put zero-feature master edges exactly on a relu kink.
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (auto& [name, t] : params)
    if (name.ends_with("bias"))
      for (auto& x : t.values()) x = u(rng);
  std::vector<graph::GraphSample> s{random_sample(rng, 3, gc, mc)};
  const auto batch = make_batch(s);
  std::vector<std::string> names;
  std::vector<Tensor<double>> inputs;
  for (const auto& [name, t] : params) {
    names.push_back(name);
    inputs.push_back(t);
  }
  const double err = hmer::testing::gradient_error(inputs, [&](tensor::Tape<double>& tape, const std::vector<Var>& v) {
    Bound bound;
    for (std::size_t k = 0; k < names.size(); ++k) bound[names[k]] = v[k];
    const auto out = forward(tape, bound, batch, mc, true, 17);
    return train::batch_loss(tape, out, batch, train::LossWeights{}).total;
  });
  EXPECT_LT(err, 1e-4);
}
