#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hmer/graph/adjacency.hpp"
#include "hmer/ink/types.hpp"
#include "hmer/labels/eslg.hpp"
#include "hmer/tensor/tensor.hpp"

namespace hmer::graph {

struct GraphConfig {
  std::size_t node_samples = 150;  // d_n
  std::size_t edge_samples = 10;   // d_e
  std::size_t max_strokes = 16;    // n_max, training sub-expression size
  bool global = true;              // add the master node
  bool full_connect = false;       // ablation: every pair adjacent

  /// Throws ArgumentError when a field is out of range.
  void validate() const;
  std::size_t edge_width() const noexcept { return 5 * edge_samples; }
};

inline constexpr std::int64_t kNoStroke = -1;

/// G = (V, A, H, B) plus loss masks.
///   node_features: [n, 2, d_n], channel 0 = x, 1 = y
///   edge_features: [n, n, 5 d_e], zero wherever A is 0
/// With a master node it sits at index 0 and is never supervised.
struct ModeledGraph {
  std::size_t n = 0;
  Adjacency adjacency;
  tensor::Tensor<double> node_features;
  tensor::Tensor<double> edge_features;
  bool has_master = false;
  std::vector<std::uint8_t> node_mask;  // n
  std::vector<std::uint8_t> edge_mask;  // n*n
  /// Original stroke index per node; kNoStroke for the master and padding.
  std::vector<std::int64_t> stroke_ids;

  /// Index of the first stroke node (1 with a master, else 0).
  std::size_t offset() const noexcept { return has_master ? 1 : 0; }
  std::size_t stroke_count() const noexcept { return n - offset(); }

  friend bool operator==(const ModeledGraph&, const ModeledGraph&) = default;
};

/// A graph paired with ground truth indexed over its stroke nodes (the
/// master, if any, excluded).
struct GraphSample {
  ModeledGraph graph;
  labels::Eslg eslg;

  friend bool operator==(const GraphSample&, const GraphSample&) = default;
};

/// LOS+t (or full-connect) graph over preprocessed strokes; masks all ones.
ModeledGraph build_local_graph(std::span<const ink::ResampledStroke> strokes, const GraphConfig& config);

/// Resamples and normalizes the expression first.
ModeledGraph build_local_graph(const ink::InkExpression& expression, const GraphConfig& config);

/// Prepends a master node adjacent to every node, with zero edge features.
/// Its node feature is `master_feature` ([2, d_n]) if given, else the sum of
/// all node features. Throws ArgumentError if the graph already has one.
ModeledGraph augment_global(const ModeledGraph& graph,
                            const std::optional<tensor::Tensor<double>>& master_feature = std::nullopt);

/// Sum of node features over the graph's stroke nodes, shape [2, d_n].
tensor::Tensor<double> node_feature_sum(const ModeledGraph& graph);

/// Training sub-expressions: consecutive chunks of at most n_max strokes,
/// each padded with blank (all-zero, unconnected) strokes to exactly n_max.
/// Padding, and every stroke of a symbol ("*"-connected in the ESLG) that
/// straddles a chunk boundary, get node_mask 0 and edge_mask 0 on incident
/// edges. With config.global each chunk gets a master node whose feature is
/// the sum over the whole expression.
std::vector<GraphSample> split_subexpressions(const ModeledGraph& graph, const labels::Eslg& eslg,
                                              const GraphConfig& config, const labels::Vocabulary& vocab);

/// Full graph for validation and inference: the local graph plus the master
/// node when config.global, masks covering every stroke.
GraphSample full_sample(const ModeledGraph& local, const labels::Eslg& eslg, const GraphConfig& config);

}  // namespace hmer::graph
