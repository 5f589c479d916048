#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hmer/graph/modeled_graph.hpp"
#include "hmer/model/batch.hpp"
#include "hmer/model/config.hpp"
#include "hmer/tensor/ops.hpp"
#include "hmer/tensor/optim.hpp"

namespace hmer::model {

using tensor::Tape;
using tensor::Var;

/// Parameters recorded as tape leaves, by name.
using Bound = std::map<std::string, Var>;

template <typename T>
Bound bind_parameters(Tape<T>& tape, const tensor::ParameterStore<T>& params, bool requires_grad);

/// Separable-convolution stroke encoder: [U, 2, d_n] -> [U, hidden].
template <typename T>
Var node_embed(Tape<T>& tape, const Bound& params, Var strokes, const ModelConfig& config);

/// Two-layer MLP with relu: [E, 5 d_e] -> [E, hidden].
template <typename T>
Var edge_embed(Tape<T>& tape, const Bound& params, Var edges, const ModelConfig& config);

template <typename T>
struct LayerOutput {
  Var nodes;      // [N, hidden]
  Var edges;      // [E, hidden]
  Var attention;  // [E, 1], alpha per directed edge
};

/// One edge-weighted attention layer (index `layer`) on the batch's edge list.
template <typename T>
LayerOutput<T> egat_layer(Tape<T>& tape, const Bound& params, std::size_t layer, Var nodes, Var edges,
                          const Batch& batch, const ModelConfig& config, bool training, std::uint64_t seed);

template <typename T>
struct ForwardOutput {
  std::vector<std::size_t> stages;  // readout stage of each logits entry
  std::vector<Var> node_logits;     // [label_nodes, C_1]
  std::vector<Var> edge_logits;     // [label_edges, C_2]
  std::vector<Var> attention;       // per layer, [E, 1]

  Var final_nodes() const { return node_logits.back(); }
  Var final_edges() const { return edge_logits.back(); }
};

/// Embedding, Q attention layers, and readouts. Readouts see the stage
/// feature concatenated with the stage-0 embedding. `seed` drives dropout.
template <typename T>
ForwardOutput<T> forward(Tape<T>& tape, const Bound& params, const Batch& batch, const ModelConfig& config,
                         bool training, std::uint64_t seed);

/// Argmax predictions for one graph, indexed over strokes (master excluded).
struct Prediction {
  std::vector<int> node_labels;
  std::vector<int> edge_labels;  // n*n, kUnlabeled outside `direction`
  graph::Adjacency direction;
};

/// Evaluation-mode predictions, `batch_size` graphs per forward pass.
template <typename T>
std::vector<Prediction> predict(const tensor::ParameterStore<T>& params, const ModelConfig& config,
                                std::span<const graph::GraphSample> samples, std::size_t batch_size = 32);

/// Last-layer attention of one graph as an [n, n] matrix over all of its
/// nodes (master included): entry (i, j) is alpha_ij, 0 without an edge.
template <typename T>
tensor::Tensor<double> attention_matrix(const tensor::ParameterStore<T>& params, const ModelConfig& config,
                                        const graph::GraphSample& sample);

}  // namespace hmer::model
