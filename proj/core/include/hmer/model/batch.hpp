#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hmer/graph/modeled_graph.hpp"
#include "hmer/tensor/tensor.hpp"

namespace hmer::model {

/// Several graphs stacked into one disconnected graph (block-diagonal
/// adjacency, stored as a directed edge list over global node indices).
struct Batch {
  std::size_t nodes = 0;
  std::size_t width = 0;  // largest graph; attention rows are this wide
  std::vector<std::size_t> graph_start;
  std::vector<std::size_t> graph_size;
  std::vector<std::size_t> node_local;  // index of each node inside its graph

  /// Distinct stroke inputs [U, 2, d_n] (blank strokes share one row) and
  /// the row used by every node.
  tensor::Tensor<double> strokes;
  std::vector<std::size_t> stroke_row;

  /// One entry per directed pair with A = 1.
  std::vector<std::size_t> src, dst;
  std::vector<std::size_t> slot;        // src * width + node_local[dst]
  std::vector<std::uint8_t> slot_mask;  // nodes * width
  tensor::Tensor<double> edge_features;  // [E, 5 d_e]

  /// Supervised primitives: every stroke node (master excluded) and every
  /// writing-order edge of the ESLG, with labels and loss masks.
  std::vector<std::size_t> label_nodes;  // global node index
  std::vector<int> node_labels;
  std::vector<std::uint8_t> node_mask;
  std::vector<std::size_t> label_edges;  // index into src/dst
  std::vector<int> edge_labels;
  std::vector<std::uint8_t> edge_mask;
  /// Per graph: first entry in label_nodes / label_edges.
  std::vector<std::size_t> graph_label_node_start;
  std::vector<std::size_t> graph_label_edge_start;
  /// Stroke-index pair (i < j, master excluded) of each label edge.
  std::vector<std::pair<std::size_t, std::size_t>> label_edge_pairs;

  std::size_t graph_count() const noexcept { return graph_start.size(); }
  std::size_t edge_count() const noexcept { return src.size(); }
};

Batch make_batch(std::span<const graph::GraphSample* const> samples);
Batch make_batch(std::span<const graph::GraphSample> samples);

}  // namespace hmer::model
