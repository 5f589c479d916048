#include "hmer/model/batch.hpp"

#include <algorithm>

#include "hmer/error.hpp"

namespace hmer::model {

Batch make_batch(std::span<const graph::GraphSample* const> samples) {
  if (samples.empty()) throw ArgumentError("make_batch: no graphs");
  Batch b;
  const auto& first = samples.front()->graph;
  const std::size_t row = first.node_features.row_size();
  const std::size_t edge_width = first.n ? first.edge_features.row_size() / first.n : 0;

  for (const auto* s : samples) {
    const auto& g = s->graph;
    if (g.node_features.row_size() != row || (g.n && g.edge_features.row_size() / g.n != edge_width))
      throw ShapeError("make_batch: graphs disagree on feature sizes");
    if (s->eslg.size() != g.stroke_count())
      throw DataError("make_batch: ground truth covers " + std::to_string(s->eslg.size()) + " strokes, graph has " +
                      std::to_string(g.stroke_count()));
    b.graph_start.push_back(b.nodes);
    b.graph_size.push_back(g.n);
    b.nodes += g.n;
    b.width = std::max(b.width, g.n);
  }

  // Stroke inputs, sharing one row among blank strokes.
  std::vector<double> unique;
  std::size_t blank_row = static_cast<std::size_t>(-1);
  std::size_t unique_count = 0;
  for (const auto* s : samples) {
    const auto& g = s->graph;
    for (std::size_t i = 0; i < g.n; ++i) {
      b.node_local.push_back(i);
      const double* f = g.node_features.data() + i * row;
      const bool blank = std::all_of(f, f + row, [](double v) { return v == 0.0; });
      if (blank && blank_row != static_cast<std::size_t>(-1)) {
        b.stroke_row.push_back(blank_row);
        continue;
      }
      if (blank) blank_row = unique_count;
      b.stroke_row.push_back(unique_count++);
      unique.insert(unique.end(), f, f + row);
    }
  }
  tensor::Shape stroke_shape = first.node_features.shape();
  stroke_shape[0] = unique_count;
  b.strokes = tensor::Tensor<double>(stroke_shape, std::move(unique));

  b.slot_mask.assign(b.nodes * b.width, 0);
  std::vector<double> edge_values;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& g = samples[k]->graph;
    const auto& eslg = samples[k]->eslg;
    const std::size_t base = b.graph_start[k];
    const std::size_t off = g.offset();
    std::vector<std::size_t> edge_at(g.n * g.n, static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < g.n; ++i)
      for (std::size_t j = 0; j < g.n; ++j) {
        if (!g.adjacency(i, j)) continue;
        if (i == j) throw DataError("make_batch: self loop on node " + std::to_string(i));
        edge_at[i * g.n + j] = b.src.size();
        b.src.push_back(base + i);
        b.dst.push_back(base + j);
        b.slot.push_back((base + i) * b.width + j);
        b.slot_mask[(base + i) * b.width + j] = 1;
        const double* f = g.edge_features.data() + (i * g.n + j) * edge_width;
        edge_values.insert(edge_values.end(), f, f + edge_width);
      }

    b.graph_label_node_start.push_back(b.label_nodes.size());
    for (std::size_t i = 0; i < eslg.size(); ++i) {
      b.label_nodes.push_back(base + off + i);
      b.node_labels.push_back(eslg.node_labels[i]);
      b.node_mask.push_back(g.node_mask[off + i]);
    }
    b.graph_label_edge_start.push_back(b.label_edges.size());
    for (std::size_t i = 0; i < eslg.size(); ++i)
      for (std::size_t j = i + 1; j < eslg.size(); ++j) {
        if (!eslg.direction(i, j)) continue;
        const std::size_t e = edge_at[(off + i) * g.n + off + j];
        if (e == static_cast<std::size_t>(-1))
          throw DataError("make_batch: labeled pair (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") is not an edge of the graph");
        b.label_edges.push_back(e);
        b.edge_labels.push_back(eslg.edge_label(i, j));
        b.edge_mask.push_back(g.edge_mask[(off + i) * g.n + off + j]);
        b.label_edge_pairs.emplace_back(i, j);
      }
  }
  b.edge_features = tensor::Tensor<double>({b.src.size(), edge_width}, std::move(edge_values));
  return b;
}

Batch make_batch(std::span<const graph::GraphSample> samples) {
  std::vector<const graph::GraphSample*> ptrs;
  ptrs.reserve(samples.size());
  for (const auto& s : samples) ptrs.push_back(&s);
  return make_batch(ptrs);
}

}  // namespace hmer::model
