// Acceptance suite. One line per criterion:
//   [PASS] name: measured values (thresholds)
// Exit status is nonzero when any criterion fails. Pass criterion names as
// arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../fixtures.hpp"
#include "../model_support.hpp"
#include "../oracles.hpp"
#include "../support.hpp"
#include "hmer/cli/cli.hpp"
#include "hmer/eval/metrics.hpp"
#include "hmer/graph/frpt.hpp"
#include "hmer/graph/modeled_graph.hpp"
#include "hmer/graph/visibility.hpp"
#include "hmer/ink/synthetic.hpp"
#include "hmer/labels/eslg.hpp"
#include "hmer/model/batch.hpp"
#include "hmer/model/egat.hpp"
#include "hmer/model/parameters.hpp"
#include "hmer/train/dataset.hpp"
#include "hmer/train/losses.hpp"
#include "hmer/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace hmer;
using hmer::testing::gradient_error;
using hmer::testing::random_tensor;
using tensor::Tape;
using tensor::Tensor;
using tensor::Var;

namespace {

// Pinned tolerances.
constexpr double kPrimitiveGradTol = 1e-5;
constexpr double kModelGradTol = 1e-4;
constexpr double kGradSeconds = 60.0;
constexpr double kAttentionRowTol = 1e-6;
constexpr double kEquivarianceTol = 1e-5;
constexpr double kLosAgreement = 0.99;
constexpr std::size_t kLosRays = 10000;
constexpr double kOverfitAccuracy = 0.99;
constexpr std::size_t kOverfitEpochs = 300;
constexpr double kOverfitSeconds = 300.0;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- gradients

Outcome gradient_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(99);
  using B = hmer::testing::Builder;
  auto r = [&](tensor::Shape s) { return random_tensor(std::move(s), rng); };
  auto nz = [&](tensor::Shape s) { return hmer::testing::away_from_zero(std::move(s), rng); };
  const std::vector<std::size_t> rows{3, 0, 3, 1};
  const std::vector<std::uint8_t> mask{1, 0, 1, 1, 0, 0, 0, 0, 1, 1, 0, 1, 1, 1, 1, 1};
  const std::vector<int> labels{2, 0, 3, 1};
  const std::vector<double> weights{1.0, 0.5, 0.0, 2.0};

  std::vector<std::pair<std::string, std::pair<std::vector<Tensor<double>>, B>>> cases;
  auto add = [&](std::string name, std::vector<Tensor<double>> in, B b) { cases.push_back({name, {std::move(in), b}}); };
  add("matmul", {r({4, 3}), r({3, 4})}, [](auto& t, const auto& v) { return tensor::matmul(t, v[0], v[1]); });
  add("add", {r({4, 4, 2}), r({4, 4, 2})}, [](auto& t, const auto& v) { return tensor::add(t, v[0], v[1]); });
  add("add_bias", {r({3, 4}), r({4})}, [](auto& t, const auto& v) { return tensor::add(t, v[0], v[1]); });
  add("mul", {r({2, 3, 4}), r({2, 3, 4})}, [](auto& t, const auto& v) { return tensor::mul(t, v[0], v[1]); });
  add("mul_rows", {r({4, 3}), r({4, 1})}, [](auto& t, const auto& v) { return tensor::mul(t, v[0], v[1]); });
  add("concat", {r({2, 3}), r({2, 4})}, [](auto& t, const auto& v) { return tensor::concat(t, {v[0], v[1]}, 1); });
  add("sum", {r({3, 4, 2})}, [](auto& t, const auto& v) { return tensor::sum(t, v[0], 1); });
  add("mean", {r({3, 4, 2})}, [](auto& t, const auto& v) { return tensor::mean(t, v[0], 2); });
  add("relu", {nz({4, 4})}, [](auto& t, const auto& v) { return tensor::relu(t, v[0]); });
  add("leaky_relu", {nz({4, 4})}, [](auto& t, const auto& v) { return tensor::leaky_relu(t, v[0], 0.2); });
  add("conv1d", {r({2, 4, 4}), r({4, 2, 3}), r({4})}, [](auto& t, const auto& v) {
    return tensor::conv1d(t, v[0], v[1], v[2], {2, 1, 2});
  });
  add("avg_pool1d", {r({2, 4, 4})}, [](auto& t, const auto& v) { return tensor::avg_pool1d(t, v[0], 2, 2); });
  add("dropout", {r({4, 4})}, [](auto& t, const auto& v) { return tensor::dropout(t, v[0], 0.4, 3, true); });
  add("gather_rows", {r({4, 3})}, [&](auto& t, const auto& v) { return tensor::gather_rows(t, v[0], rows); });
  add("scatter_add_rows", {r({4, 3})}, [&](auto& t, const auto& v) { return tensor::scatter_add_rows(t, v[0], rows, 4); });
  add("masked_softmax", {r({4, 4})}, [&](auto& t, const auto& v) { return tensor::masked_softmax(t, v[0], mask, 1); });
  add("cross_entropy", {r({4, 4})}, [&](auto& t, const auto& v) {
    return tensor::cross_entropy(t, v[0], labels, std::span<const double>(weights));
  });
  add("focal_loss", {r({4, 4})}, [&](auto& t, const auto& v) {
    return tensor::focal_loss(t, v[0], labels, std::span<const double>(weights), 1.5);
  });

  double worst = 0.0;
  std::string worst_name;
  for (const auto& [name, c] : cases) {
    const double e = gradient_error(c.first, c.second);
    if (e >= worst) {
      worst = e;
      worst_name = name;
    }
  }

  // End-to-end: 3-node graph, hidden 8, Q = 2, every parameter.
  const auto gc = hmer::testing::small_graph_config();
  auto mc = hmer::testing::toy_model(8, 2);
  mc.dropout = 0.1;
  auto params = model::init_parameters<double>(mc, 11);
  // Zero biases put zero-feature master edges exactly on a relu kink.
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (auto& [name, t] : params)
    if (name.ends_with("bias"))
      for (auto& x : t.values()) x = u(rng);
  std::vector<graph::GraphSample> s{hmer::testing::random_sample(rng, 3, gc, mc)};
  const auto batch = model::make_batch(s);
  std::vector<std::string> names;
  std::vector<Tensor<double>> inputs;
  for (const auto& [name, t] : params) {
    names.push_back(name);
    inputs.push_back(t);
  }
  const double e2e = gradient_error(inputs, [&](Tape<double>& tape, const std::vector<Var>& v) {
    model::Bound bound;
    for (std::size_t k = 0; k < names.size(); ++k) bound[names[k]] = v[k];
    const auto out = model::forward(tape, bound, batch, mc, true, 5);
    return train::batch_loss(tape, out, batch, train::LossWeights{}).total;
  });
  const double secs = seconds_since(t0);
  return {worst < kPrimitiveGradTol && e2e < kModelGradTol && secs < kGradSeconds,
          fmt("%zu primitives, worst %.2e (%s) < %.0e; end-to-end %.2e < %.0e; %.1f s < %.0f s", cases.size(), worst,
              worst_name.c_str(), kPrimitiveGradTol, e2e, kModelGradTol, secs, kGradSeconds)};
}

// ---------------------------------------------------------------- attention

Outcome attention_normalization() {
  std::mt19937_64 rng(1234);
  auto gc = hmer::testing::small_graph_config();
  auto mc = hmer::testing::toy_model(32, 3);
  double worst = 0.0;
  std::size_t rows_checked = 0;
  for (int g = 0; g < 100; ++g) {
    gc.global = g % 2 == 0;
    const std::size_t strokes = 2 + std::size_t(g) % 11;  // 2..12
    std::vector<graph::GraphSample> s{hmer::testing::random_sample(rng, strokes, gc, mc)};
    const auto params = model::init_parameters<float>(mc, std::uint64_t(g));
    const auto batch = model::make_batch(s);
    Tape<float> tape;
    const auto out = model::forward(tape, model::bind_parameters(tape, params, false), batch, mc, false, 0);
    for (Var a : out.attention) {
      std::vector<double> row(batch.nodes, 0.0);
      std::vector<bool> has(batch.nodes, false);
      const auto& alpha = tape.value(a);
      for (std::size_t e = 0; e < batch.edge_count(); ++e) {
        row[batch.src[e]] += alpha[e];
        has[batch.src[e]] = true;
      }
      for (std::size_t i = 0; i < batch.nodes; ++i)
        if (has[i]) {
          worst = std::max(worst, std::abs(row[i] - 1.0));
          ++rows_checked;
        }
    }
  }
  return {worst <= kAttentionRowTol, fmt("100 graphs, %zu rows over 3 layers, max |sum - 1| = %.2e <= %.0e", rows_checked,
                                         worst, kAttentionRowTol)};
}

// ---------------------------------------------------------------- equivariance

// Relabels stroke nodes: stroke i (local index) moves to perm[i]. The master
// stays at index 0.
graph::GraphSample permute(const graph::GraphSample& s, const std::vector<std::size_t>& perm) {
  const auto& g = s.graph;
  const std::size_t off = g.offset(), n = g.n, m = perm.size();
  auto P = [&](std::size_t v) { return v < off ? v : perm[v - off] + off; };
  graph::GraphSample out = s;
  auto& h = out.graph;
  const std::size_t row = g.node_features.row_size(), w = g.edge_features.shape()[2];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < row; ++k) h.node_features[P(i) * row + k] = g.node_features[i * row + k];
    h.node_mask[P(i)] = g.node_mask[i];
    h.stroke_ids[P(i)] = g.stroke_ids[i];
    for (std::size_t j = 0; j < n; ++j) {
      h.adjacency.set(P(i), P(j), g.adjacency(i, j));
      h.edge_mask[P(i) * n + P(j)] = g.edge_mask[i * n + j];
      for (std::size_t k = 0; k < w; ++k)
        h.edge_features[(P(i) * n + P(j)) * w + k] = g.edge_features[(i * n + j) * w + k];
    }
  }
  auto& e = out.eslg;
  e.direction = graph::Adjacency(m);
  e.edge_labels.assign(m * m, labels::kUnlabeled);
  for (std::size_t i = 0; i < m; ++i) {
    e.node_labels[perm[i]] = s.eslg.node_labels[i];
    for (std::size_t j = i + 1; j < m; ++j)
      if (s.eslg.direction(i, j)) {
        const auto a = std::min(perm[i], perm[j]), b = std::max(perm[i], perm[j]);
        e.direction.set(a, b);
        e.edge_labels[a * m + b] = 0;
      }
  }
  return out;
}

Outcome permutation_equivariance() {
  std::mt19937_64 rng(4321);
  auto gc = hmer::testing::small_graph_config();
  gc.node_samples = 32;
  auto mc = hmer::testing::toy_model(32, 2);
  mc.embed_channels = {16, 32};
  mc.edge_embed_hidden = 32;
  mc.readout_hidden = 32;
  double worst = 0.0;
  std::size_t compared = 0;
  for (int g = 0; g < 50; ++g) {
    gc.global = g % 2 == 0;
    const std::size_t strokes = 2 + std::size_t(g) % 9;
    const auto sample = hmer::testing::random_sample(rng, strokes, gc, mc);
    std::vector<std::size_t> perm(strokes);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto moved = permute(sample, perm);
    const auto params = model::init_parameters<float>(mc, std::uint64_t(100 + g));

    auto run = [&](const graph::GraphSample& s, Tape<float>& tape) {
      const auto batch = model::make_batch(std::span(&s, 1));
      return std::pair{batch, model::forward(tape, model::bind_parameters(tape, params, false), batch, mc, false, 0)};
    };
    Tape<float> ta, tb;
    const auto [ba, oa] = run(sample, ta);
    const auto [bb, ob] = run(moved, tb);
    const std::size_t off = sample.graph.offset();
    auto P = [&](std::size_t v) { return v < off ? v : perm[v - off] + off; };

    for (std::size_t st = 0; st < oa.node_logits.size(); ++st) {
      const auto& na = ta.value(oa.node_logits[st]);
      const auto& nb = tb.value(ob.node_logits[st]);
      const std::size_t c = na.shape()[1];
      for (std::size_t i = 0; i < strokes; ++i)
        for (std::size_t k = 0; k < c; ++k) {
          worst = std::max(worst, double(std::abs(na.at(i, k) - nb.at(perm[i], k))));
          ++compared;
        }
      const auto& ea = ta.value(oa.edge_logits[st]);
      const auto& eb = tb.value(ob.edge_logits[st]);
      std::map<std::pair<std::size_t, std::size_t>, std::size_t> where;
      for (std::size_t r = 0; r < bb.label_edge_pairs.size(); ++r) where[bb.label_edge_pairs[r]] = r;
      for (std::size_t r = 0; r < ba.label_edge_pairs.size(); ++r) {
        const auto [i, j] = ba.label_edge_pairs[r];
        if (perm[i] > perm[j]) continue;  // reversed: different directed edge
        const std::size_t q = where.at({perm[i], perm[j]});
        for (std::size_t k = 0; k < ea.shape()[1]; ++k) {
          worst = std::max(worst, double(std::abs(ea.at(r, k) - eb.at(q, k))));
          ++compared;
        }
      }
    }
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_b;
    for (std::size_t e = 0; e < bb.edge_count(); ++e) edge_b[{bb.src[e], bb.dst[e]}] = e;
    for (std::size_t layer = 0; layer < oa.attention.size(); ++layer) {
      const auto& aa = ta.value(oa.attention[layer]);
      const auto& ab = tb.value(ob.attention[layer]);
      for (std::size_t e = 0; e < ba.edge_count(); ++e) {
        worst = std::max(worst, double(std::abs(aa[e] - ab[edge_b.at({P(ba.src[e]), P(ba.dst[e])})])));
        ++compared;
      }
    }
  }
  return {worst < kEquivarianceTol, fmt("50 graphs, %zu values (logits of every readout, attention), max |dev| = %.2e < %.0e",
                                        compared, worst, kEquivarianceTol)};
}

// ---------------------------------------------------------------- masking

Outcome masking_soundness() {
  std::mt19937_64 rng(77);
  const auto& vocab = labels::Vocabulary::crohme();
  auto gc = hmer::testing::small_graph_config();
  gc.max_strokes = 3;
  auto mc = hmer::testing::toy_model(8, 2);
  mc.node_classes = vocab.symbol_count();
  mc.dropout = 0.2;
  std::vector<graph::GraphSample> samples;
  for (const auto& e : ink::generate_synthetic(5, 12, 6)) {
    const auto local = graph::build_local_graph(e.ink, gc);
    const auto eslg = labels::to_eslg(e.labels, local.adjacency, vocab).eslg;
    for (auto& p : graph::split_subexpressions(local, eslg, gc, vocab)) samples.push_back(std::move(p));
  }
  const auto params = model::init_parameters<double>(mc, 3);

  struct Run {
    double loss;
    tensor::ParameterStore<double> grads;
  };
  auto run = [&](const std::vector<graph::GraphSample>& s) {
    const auto batch = model::make_batch(s);
    Tape<double> tape;
    const auto bound = model::bind_parameters(tape, params, true);
    const auto out = model::forward(tape, bound, batch, mc, true, 8);
    const Var loss = train::batch_loss(tape, out, batch, train::LossWeights{}).total;
    tape.backward(loss);
    Run r{tape.value(loss)[0], {}};
    for (const auto& [name, v] : bound) r.grads[name] = tape.grad(v);
    return r;
  };

  const Run base = run(samples);
  std::size_t masked_nodes = 0, masked_edges = 0, straddling = 0;
  auto mutated = samples;
  std::uniform_int_distribution<int> sym(0, mc.node_classes - 1), edge(0, mc.edge_classes - 1);
  for (auto& s : mutated) {
    const std::size_t off = s.graph.offset(), n = s.graph.n, m = s.eslg.size();
    for (std::size_t i = 0; i < m; ++i) {
      if (s.graph.node_mask[i + off]) continue;
      s.eslg.node_labels[i] = sym(rng);
      ++masked_nodes;
      straddling += s.graph.stroke_ids[i + off] != graph::kNoStroke;
    }
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        if (s.eslg.direction(i, j) && !s.graph.edge_mask[(i + off) * n + j + off]) {
          s.eslg.edge_labels[i * m + j] = edge(rng);
          ++masked_edges;
        }
  }
  const Run after = run(mutated);
  bool identical = after.loss == base.loss && after.grads == base.grads;

  // Control: changing one supervised label must move the loss.
  auto control = samples;
  for (auto& s : control) {
    const std::size_t off = s.graph.offset();
    for (std::size_t i = 0; i < s.eslg.size(); ++i)
      if (s.graph.node_mask[i + off]) {
        s.eslg.node_labels[i] = (s.eslg.node_labels[i] + 1) % mc.node_classes;
        goto changed;
      }
  }
changed:
  const bool control_moves = run(control).loss != base.loss;
  return {identical && control_moves && masked_nodes > 0 && masked_edges > 0,
          fmt("%zu sub-graphs, mutated %zu masked nodes (%zu straddling symbols) and %zu masked edges: loss and %zu "
              "gradients %s; unmasked control %s",
              samples.size(), masked_nodes, straddling, masked_edges, base.grads.size(),
              identical ? "bit-identical" : "CHANGED", control_moves ? "changes the loss" : "DID NOT change the loss")};
}

// ---------------------------------------------------------------- line of sight

Outcome los_oracle() {
  std::mt19937_64 rng(2025);
  std::size_t agree = 0, total = 0;
  std::vector<std::string> log;
  for (int scene = 0; scene < 200; ++scene) {
    const std::size_t n = 3 + std::size_t(scene) % 4;
    const auto raw = oracle::random_scene(rng, n);
    std::vector<ink::ResampledStroke> strokes;
    for (const auto& s : raw) strokes.push_back({s});
    const auto got = graph::line_of_sight(strokes);
    const auto want = oracle::sampled_line_of_sight(raw, kLosRays);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        ++total;
        if (got(i, j) == want[i][j]) {
          ++agree;
        } else {
          log.push_back(fmt("scene %d pair (%zu,%zu): hull test %d, sampled %d", scene, i, j, int(got(i, j)),
                            int(want[i][j])));
        }
      }
  }
  for (const auto& line : log) std::printf("       los disagreement: %s\n", line.c_str());
  const double rate = double(agree) / double(total);
  return {rate >= kLosAgreement, fmt("200 scenes, %zu/%zu pairs agree (%.4f >= %.2f), %zu rays per segment", agree, total,
                                     rate, kLosAgreement, kLosRays)};
}

// ---------------------------------------------------------------- FRPT

Outcome frpt_invariants() {
  std::mt19937_64 rng(555);
  std::uniform_real_distribution<double> u(-4, 4);
  std::uniform_int_distribution<std::size_t> de(1, 12), len(1, 40);
  std::size_t bad_range = 0, bad_product = 0, bad_length = 0, samples = 0;
  for (int k = 0; k < 1000; ++k) {
    ink::ResampledStroke a, b;
    const std::size_t la = len(rng), lb = len(rng);
    for (std::size_t i = 0; i < la; ++i) a.points.push_back({u(rng), u(rng)});
    for (std::size_t i = 0; i < lb; ++i) b.points.push_back({u(rng), u(rng)});
    const std::size_t d = k < 500 ? 10 : de(rng);
    const auto f = graph::frpt_features(a, b, d);
    if (f.size() != 5 * d) {
      ++bad_length;
      continue;
    }
    for (std::size_t s = 0; s < d; ++s) {
      ++samples;
      for (std::size_t dir = 0; dir < 4; ++dir)
        if (!(f[dir * d + s] >= 0.0 && f[dir * d + s] <= 1.0)) ++bad_range;
      if (f[s] * f[d + s] != 0.0 || f[2 * d + s] * f[3 * d + s] != 0.0) ++bad_product;
    }
  }
  return {bad_range == 0 && bad_product == 0 && bad_length == 0,
          fmt("1000 pairs, %zu sample points: %zu theta outside [0,1], %zu nonzero opposite products, %zu wrong lengths",
              samples, bad_range, bad_product, bad_length)};
}

// ---------------------------------------------------------------- ESLG round trip

Outcome eslg_round_trip() {
  const auto& vocab = labels::Vocabulary::crohme();
  const graph::GraphConfig gc;
  std::size_t ok = 0, expressible = 0, dropped = 0;
  const auto exprs = ink::generate_synthetic(500, 500, 7);
  for (const auto& e : exprs) {
    const auto local = graph::build_local_graph(e.ink, gc);
    const auto conv = labels::to_eslg(e.labels, local.adjacency, vocab);
    const auto back = labels::eslg_to_slg(conv.eslg, vocab);
    std::map<std::pair<std::size_t, std::size_t>, std::string> want, got;
    for (const auto& [k, l] : e.labels.edges)
      if (l != labels::kSameSymbol && local.adjacency(k.first, k.second)) want[k] = l;
    for (const auto& [k, l] : back.edges)
      if (l != labels::kSameSymbol) got[k] = l;
    expressible += want.size();
    dropped += conv.dropped_relations;
    const bool same = labels::segments(back) == labels::segments(e.labels) && back.node_labels == e.labels.node_labels &&
                      got == want && conv.dropped_memberships == 0;
    ok += same;
  }
  return {ok == exprs.size(), fmt("%zu/%zu expressions reproduce segmentation, labels and all %zu expressible relations "
                                  "(%zu relations not expressible on LOS+t)",
                                  ok, exprs.size(), expressible, dropped)};
}

// ---------------------------------------------------------------- metrics

Outcome metric_oracle() {
  std::mt19937_64 rng(8080);
  const auto golds = ink::generate_synthetic(8080, 200, 8);
  std::size_t agree = 0, exact = 0;
  for (const auto& g : golds) {
    const auto pred = hmer::testing::perturb(g.labels, rng);
    const auto a = eval::expression_metrics(pred, g.labels);
    const auto b = oracle::compare(pred, g.labels);
    agree += a.seg == b.seg && a.sym == b.sym && a.rel == b.rel && a.stru == b.stru && a.exp == b.exp;
    exact += b.exp;
  }
  return {agree == golds.size(), fmt("%zu/%zu pairs agree on Seg/Sym/Rel/Stru/Exp (%zu fully correct, %zu with errors)",
                                     agree, golds.size(), exact, golds.size() - exact)};
}

// ---------------------------------------------------------------- overfit

struct OverfitRun {
  std::size_t converged = 0;  // first epoch with both accuracies >= threshold, 0 if never
  std::vector<train::EpochRecord> history;
  double seconds = 0;
};

train::ExperimentConfig overfit_config() {
  train::ExperimentConfig c;
  c.model.hidden = 64;
  c.model.layers = 2;
  c.model.dropout = 0.0;
  c.train.learning_rate = 0.001;
  c.train.batch_size = 4;
  c.train.max_epochs = kOverfitEpochs;
  c.train.seed = 1;
  return c;
}

OverfitRun overfit(const train::ExperimentConfig& c, const std::vector<train::DatasetItem>& items) {
  const auto& vocab = labels::Vocabulary::crohme();
  const auto t0 = std::chrono::steady_clock::now();
  const auto train_set = train::prepare(items, c.data, vocab, true);
  const auto full = train::prepare(items, c.data, vocab, false);
  OverfitRun r;
  const auto fit = train::fit(train_set.samples, full.samples, c, [&](const train::EpochRecord& e, const auto&) {
    if (e.node_acc >= kOverfitAccuracy && e.edge_acc >= kOverfitAccuracy) {
      r.converged = e.epoch;
      return false;
    }
    return true;
  });
  r.history = fit.history;
  r.seconds = seconds_since(t0);
  return r;
}

Outcome overfit_acceptance() {
  std::vector<train::DatasetItem> items;
  for (auto& e : ink::generate_synthetic(1, 20, 4)) items.push_back({e.ink, e.labels});
  auto c = overfit_config();
  const auto proposed = overfit(c, items);
  c.model.aux_readout = false;
  c.model.message_concat = false;
  c.model.residual = false;
  const auto baseline = overfit(c, items);

  const auto& p_last = proposed.history.back();
  const auto& b_last = baseline.history.back();
  const bool p_ok = proposed.converged != 0 && proposed.seconds < kOverfitSeconds;
  const bool no_faster = baseline.converged == 0 || baseline.converged >= proposed.converged;
  const bool no_higher = b_last.edge_acc <= p_last.edge_acc;
  auto epoch_text = [](std::size_t e) { return e ? std::to_string(e) : std::string("never"); };
  return {p_ok && no_faster && no_higher,
          fmt("proposed: node %.4f edge %.4f at epoch %s/%zu (%.0f s < %.0f s); baseline: converged %s, final edge %.4f "
              "at epoch %zu (%.0f s); no faster %s, no higher %s",
              p_last.node_acc, p_last.edge_acc, epoch_text(proposed.converged).c_str(), kOverfitEpochs, proposed.seconds,
              kOverfitSeconds, epoch_text(baseline.converged).c_str(), b_last.edge_acc, b_last.epoch, baseline.seconds,
              no_faster ? "ok" : "VIOLATED", no_higher ? "ok" : "VIOLATED")};
}

// ---------------------------------------------------------------- determinism

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome determinism() {
  const auto root = fs::temp_directory_path() / "hmer_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  std::ofstream(root / "exp.cfg") << "[model]\nlayers = 2\nhidden = 32\ndropout = 0.2\n"
                                     "[train]\nmax_epochs = 4\nbatch_size = 4\nlearning_rate = 0.001\n"
                                     "[data]\nmax_strokes = 4\n";
  std::ostringstream sink;
  auto call = [&](std::vector<std::string> args) {
    args.insert(args.begin(), "hmer");
    return cli::run(args, sink, sink);
  };
  int codes = call({"synth", "--seed", "2", "--count", "8", "--out", (root / "data").string()});
  for (const char* run : {"a", "b"})
    codes |= call({"train", "--data", (root / "data").string(), "--out", (root / run).string(), "--config",
                   (root / "exp.cfg").string(), "--seed", "17"});
  std::size_t same = 0, bytes = 0;
  const char* files[] = {"history.csv", "checkpoint.bin", "last.bin"};
  for (const char* f : files) {
    const auto a = slurp(root / "a" / f), b = slurp(root / "b" / f);
    same += !a.empty() && a == b;
    bytes += a.size();
  }
  return {codes == 0 && same == 3, fmt("exit codes %s; %zu/3 outputs byte-identical (history.csv, checkpoint.bin, last.bin; "
                                       "%zu bytes)",
                                       codes == 0 ? "0" : "nonzero", same, bytes)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient_suite", gradient_suite},
      {"attention_normalization", attention_normalization},
      {"permutation_equivariance", permutation_equivariance},
      {"masking_soundness", masking_soundness},
      {"los_oracle", los_oracle},
      {"frpt_invariants", frpt_invariants},
      {"eslg_round_trip", eslg_round_trip},
      {"metric_oracle", metric_oracle},
      {"overfit_acceptance", overfit_acceptance},
      {"determinism", determinism},
  };
  std::vector<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    Outcome o{false, ""};
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  if (only.empty() || std::find(only.begin(), only.end(), "crohme_reference") != only.end())
    std::printf("[SKIP] crohme_reference: optional; needs the external CROHME 2023 corpus and long training\n");
  return failed ? 1 : 0;
}
