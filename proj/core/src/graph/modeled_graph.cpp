#include "hmer/graph/modeled_graph.hpp"

#include <algorithm>
#include <numeric>

#include "hmer/error.hpp"
#include "hmer/graph/frpt.hpp"
#include "hmer/graph/visibility.hpp"
#include "hmer/ink/preprocess.hpp"

namespace hmer::graph {

using tensor::Shape;
using tensor::Tensor;

void GraphConfig::validate() const {
  if (node_samples < 2) throw ArgumentError("node_samples must be at least 2");
  if (edge_samples < 1) throw ArgumentError("edge_samples must be at least 1");
  if (max_strokes < 2) throw ArgumentError("max_strokes must be at least 2");
}

ModeledGraph build_local_graph(std::span<const ink::ResampledStroke> strokes, const GraphConfig& config) {
  config.validate();
  const std::size_t n = strokes.size();
  if (n == 0) throw DataError("cannot build a graph without strokes");
  const std::size_t dn = config.node_samples;
  for (const auto& s : strokes)
    if (s.size() != dn)
      throw DataError("stroke has " + std::to_string(s.size()) + " samples, expected " + std::to_string(dn));

  ModeledGraph g;
  g.n = n;
  g.adjacency = config.full_connect ? full_connect(n) : add_temporal_edges(line_of_sight(strokes));
  g.node_features = Tensor<double>({n, 2, dn});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < dn; ++k) {
      g.node_features[(i * 2 + 0) * dn + k] = strokes[i].points[k].x;
      g.node_features[(i * 2 + 1) * dn + k] = strokes[i].points[k].y;
    }
  const std::size_t w = config.edge_width();
  g.edge_features = Tensor<double>({n, n, w});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!g.adjacency(i, j)) continue;
      const auto f = frpt_features(strokes[i], strokes[j], config.edge_samples);
      std::copy(f.begin(), f.end(), g.edge_features.data() + (i * n + j) * w);
    }
  g.node_mask.assign(n, 1);
  g.edge_mask.assign(n * n, 1);
  g.stroke_ids.resize(n);
  std::iota(g.stroke_ids.begin(), g.stroke_ids.end(), std::int64_t{0});
  return g;
}

ModeledGraph build_local_graph(const ink::InkExpression& expression, const GraphConfig& config) {
  config.validate();
  const auto strokes = ink::preprocess(expression, config.node_samples);
  return build_local_graph(strokes, config);
}

Tensor<double> node_feature_sum(const ModeledGraph& graph) {
  const std::size_t row = graph.node_features.row_size();
  Tensor<double> sum({2, row / 2});
  for (std::size_t i = graph.offset(); i < graph.n; ++i)
    for (std::size_t k = 0; k < row; ++k) sum[k] += graph.node_features[i * row + k];
  return sum;
}

ModeledGraph augment_global(const ModeledGraph& graph, const std::optional<Tensor<double>>& master_feature) {
  if (graph.has_master) throw ArgumentError("augment_global: graph already has a master node");
  const std::size_t n = graph.n;
  const std::size_t m = n + 1;
  const std::size_t row = graph.node_features.row_size();
  const std::size_t w = graph.edge_features.row_size() / std::max<std::size_t>(n, 1);
  const Tensor<double> master = master_feature ? *master_feature : node_feature_sum(graph);
  if (master.size() != row)
    throw ShapeError("augment_global: master feature " + tensor::to_string(master.shape()) +
                     " does not match node feature row of " + std::to_string(row));

  ModeledGraph g;
  g.n = m;
  g.has_master = true;
  g.adjacency = Adjacency(m);
  for (std::size_t j = 1; j < m; ++j) g.adjacency.set_symmetric(0, j);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (graph.adjacency(i, j)) g.adjacency.set(i + 1, j + 1);

  Shape node_shape = graph.node_features.shape();
  node_shape[0] = m;
  g.node_features = Tensor<double>(node_shape);
  std::copy(master.data(), master.data() + row, g.node_features.data());
  std::copy(graph.node_features.data(), graph.node_features.data() + n * row, g.node_features.data() + row);

  g.edge_features = Tensor<double>({m, m, w});
  for (std::size_t i = 0; i < n; ++i)
    std::copy(graph.edge_features.data() + i * n * w, graph.edge_features.data() + (i + 1) * n * w,
              g.edge_features.data() + ((i + 1) * m + 1) * w);

  g.node_mask.assign(m, 0);
  g.edge_mask.assign(m * m, 0);
  for (std::size_t i = 0; i < n; ++i) {
    g.node_mask[i + 1] = graph.node_mask[i];
    for (std::size_t j = 0; j < n; ++j) g.edge_mask[(i + 1) * m + j + 1] = graph.edge_mask[i * n + j];
  }
  g.stroke_ids.assign(1, kNoStroke);
  g.stroke_ids.insert(g.stroke_ids.end(), graph.stroke_ids.begin(), graph.stroke_ids.end());
  return g;
}

namespace {

// Root (smallest member) of each stroke's "*"-connected component.
std::vector<std::size_t> same_symbol_roots(const labels::Eslg& eslg, int same_symbol_class) {
  const std::size_t n = eslg.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto root = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (eslg.direction(i, j) && eslg.edge_label(i, j) == same_symbol_class) {
        const auto a = root(i), b = root(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
  for (std::size_t i = 0; i < n; ++i) parent[i] = root(i);
  return parent;
}

void check_aligned(const ModeledGraph& graph, const labels::Eslg& eslg) {
  if (graph.has_master) throw ArgumentError("expected a local graph without master node");
  if (eslg.size() != graph.n)
    throw DataError("ground truth covers " + std::to_string(eslg.size()) + " strokes but the graph has " +
                    std::to_string(graph.n));
}

}  // namespace

std::vector<GraphSample> split_subexpressions(const ModeledGraph& graph, const labels::Eslg& eslg,
                                              const GraphConfig& config, const labels::Vocabulary& vocab) {
  config.validate();
  check_aligned(graph, eslg);
  const std::size_t n = graph.n;
  const std::size_t cap = config.max_strokes;
  const std::size_t row = graph.node_features.row_size();
  const std::size_t w = graph.edge_features.row_size() / n;
  const auto roots = same_symbol_roots(eslg, vocab.same_symbol_class());
  const Tensor<double> master = node_feature_sum(graph);

  std::vector<GraphSample> out;
  for (std::size_t start = 0; start < n; start += cap) {
    const std::size_t stop = std::min(n, start + cap);
    const std::size_t real = stop - start;

    // A symbol is complete when every member of its component is in range.
    std::vector<std::uint8_t> complete(n, 1);
    for (std::size_t i = 0; i < n; ++i)
      if (i < start || i >= stop) complete[roots[i]] = 0;

    ModeledGraph g;
    g.n = cap;
    g.adjacency = Adjacency(cap);
    Shape node_shape = graph.node_features.shape();
    node_shape[0] = cap;
    g.node_features = Tensor<double>(node_shape);
    g.edge_features = Tensor<double>({cap, cap, w});
    g.node_mask.assign(cap, 0);
    g.edge_mask.assign(cap * cap, 0);
    g.stroke_ids.assign(cap, kNoStroke);

    labels::Eslg sub;
    sub.node_labels.assign(cap, 0);
    sub.edge_labels.assign(cap * cap, labels::kUnlabeled);
    sub.direction = Adjacency(cap);

    for (std::size_t a = 0; a < real; ++a) {
      const std::size_t i = start + a;
      std::copy(graph.node_features.data() + i * row, graph.node_features.data() + (i + 1) * row,
                g.node_features.data() + a * row);
      g.node_mask[a] = complete[roots[i]] && graph.node_mask[i];
      g.stroke_ids[a] = graph.stroke_ids[i];
      sub.node_labels[a] = eslg.node_labels[i];
    }
    for (std::size_t a = 0; a < real; ++a)
      for (std::size_t b = 0; b < real; ++b) {
        const std::size_t i = start + a, j = start + b;
        if (graph.adjacency(i, j)) {
          g.adjacency.set(a, b);
          std::copy(graph.edge_features.data() + (i * n + j) * w, graph.edge_features.data() + (i * n + j + 1) * w,
                    g.edge_features.data() + (a * cap + b) * w);
        }
        g.edge_mask[a * cap + b] = g.node_mask[a] && g.node_mask[b] && graph.edge_mask[i * n + j];
        if (eslg.direction(i, j)) {
          sub.direction.set(a, b);
          sub.edge_labels[a * cap + b] = eslg.edge_label(i, j);
        }
      }

    if (config.global) g = augment_global(g, master);
    out.push_back({std::move(g), std::move(sub)});
  }
  return out;
}

GraphSample full_sample(const ModeledGraph& local, const labels::Eslg& eslg, const GraphConfig& config) {
  check_aligned(local, eslg);
  return {config.global ? augment_global(local) : local, eslg};
}

}  // namespace hmer::graph
