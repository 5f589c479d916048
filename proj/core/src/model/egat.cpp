#include "hmer/model/egat.hpp"

#include <algorithm>

#include "hmer/error.hpp"
#include "hmer/labels/eslg.hpp"
#include "hmer/model/parameters.hpp"

namespace hmer::model {
namespace tn = hmer::tensor;

namespace {

Var param(const Bound& params, const std::string& name) {
  const auto it = params.find(name);
  if (it == params.end()) throw ArgumentError("missing parameter '" + name + "'");
  return it->second;
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

template <typename T>
Var mlp(Tape<T>& tape, const Bound& params, const std::string& prefix, Var x) {
  Var h = tn::relu(tape, tn::linear(tape, x, param(params, prefix + "fc1.weight"), param(params, prefix + "fc1.bias")));
  return tn::linear(tape, h, param(params, prefix + "fc2.weight"), param(params, prefix + "fc2.bias"));
}

}  // namespace

template <typename T>
Bound bind_parameters(Tape<T>& tape, const tn::ParameterStore<T>& params, bool requires_grad) {
  Bound bound;
  for (const auto& [name, value] : params) bound.emplace(name, tape.leaf(value, requires_grad));
  return bound;
}

template <typename T>
Var node_embed(Tape<T>& tape, const Bound& params, Var strokes, const ModelConfig& config) {
  const auto& shape = tape.value(strokes).shape();
  if (shape.size() != 3 || shape[1] != 2)
    throw ShapeError("node_embed: expected [strokes, 2, samples], got " + tn::to_string(shape));
  Var x = strokes;
  std::size_t channels = 2;
  for (std::size_t b = 0; b < config.embed_channels.size(); ++b) {
    const std::string p = "embed.block" + std::to_string(b) + ".";
    Var dw = tn::conv1d(tape, x, param(params, p + "depthwise.weight"), param(params, p + "depthwise.bias"),
                        {1, config.embed_kernel / 2, channels});
    Var pw = tn::conv1d(tape, dw, param(params, p + "pointwise.weight"), param(params, p + "pointwise.bias"));
    Var skip = tn::conv1d(tape, x, param(params, p + "shortcut.weight"), Var{});
    x = tn::add(tape, tn::relu(tape, pw), skip);
    channels = config.embed_channels[b];
  }
  Var pooled = tn::mean(tape, x, 2);
  return tn::linear(tape, pooled, param(params, "embed.project.weight"), param(params, "embed.project.bias"));
}

template <typename T>
Var edge_embed(Tape<T>& tape, const Bound& params, Var edges, const ModelConfig& config) {
  const auto& shape = tape.value(edges).shape();
  if (shape.size() != 2 || shape[1] != config.edge_input)
    throw ShapeError("edge_embed: expected [edges, " + std::to_string(config.edge_input) + "], got " +
                     tn::to_string(shape));
  return mlp(tape, params, "edge_embed.", edges);
}

template <typename T>
LayerOutput<T> egat_layer(Tape<T>& tape, const Bound& params, std::size_t layer, Var nodes, Var edges,
                          const Batch& batch, const ModelConfig& config, bool training, std::uint64_t seed) {
  const std::string p = "egat" + std::to_string(layer) + ".";
  const std::size_t n = batch.nodes;

  Var hw = tn::matmul(tape, nodes, param(params, p + "w_h"));  // W_h h
  Var bw = tn::matmul(tape, edges, param(params, p + "w_b"));  // W_b b
  Var hw_src = tn::gather_rows(tape, hw, batch.src);
  Var hw_dst = tn::gather_rows(tape, hw, batch.dst);

  // e_ij = a^T [W_h h_i + W_b b_ij + W_h h_j], softmax over j in N(i).
  Var logits = tn::matmul(tape, tn::concat(tape, {hw_src, bw, hw_dst}, 1), param(params, p + "attention"));
  if (config.attention_activation) logits = tn::leaky_relu(tape, logits, static_cast<T>(config.attention_slope));
  Var dense = tn::reshape(tape, tn::scatter_add_rows(tape, logits, batch.slot, n * batch.width), {n, batch.width});
  Var probs = tn::reshape(tape, tn::masked_softmax(tape, dense, batch.slot_mask, 1), {n * batch.width, 1});
  Var alpha = tn::gather_rows(tape, probs, batch.slot);

  Var h = tn::scatter_add_rows(tape, tn::mul(tape, hw_dst, alpha), batch.src, n);  // sum_j alpha W_h h_j
  Var b = tn::mul(tape, bw, alpha);                                                 // alpha W_b b_ij

  Var h_out = h, b_out = b;
  if (config.message_concat) {
    Var edge_sum = tn::scatter_add_rows(tape, b, batch.src, n);
    h_out = tn::avg_pool1d(tape, tn::concat(tape, {h, edge_sum}, 1), 2, 2);
    Var h_src = tn::gather_rows(tape, h, batch.src);
    Var h_dst = tn::gather_rows(tape, h, batch.dst);
    b_out = tn::avg_pool1d(tape, tn::concat(tape, {h_src, b, h_dst}, 1), 3, 3);
  }
  if (config.residual) {
    h_out = tn::add(tape, h_out, nodes);
    b_out = tn::add(tape, b_out, edges);
  }
  h_out = tn::dropout(tape, h_out, config.dropout, mix(seed, 2 * layer + 10), training);
  b_out = tn::dropout(tape, b_out, config.dropout, mix(seed, 2 * layer + 11), training);
  return {h_out, b_out, alpha};
}

template <typename T>
ForwardOutput<T> forward(Tape<T>& tape, const Bound& params, const Batch& batch, const ModelConfig& config,
                         bool training, std::uint64_t seed) {
  config.validate();
  if (batch.edge_features.rank() != 2 || batch.edge_features.dim(1) != config.edge_input)
    throw ShapeError("forward: edge features " + tn::to_string(batch.edge_features.shape()) + " but model expects " +
                     std::to_string(config.edge_input) + " per edge");

  Var strokes = tape.constant(batch.strokes.template cast<T>());
  Var unique = node_embed(tape, params, strokes, config);
  Var h0 = tn::gather_rows(tape, unique, batch.stroke_row);
  Var b0 = edge_embed(tape, params, tape.constant(batch.edge_features.template cast<T>()), config);
  h0 = tn::dropout(tape, h0, config.dropout, mix(seed, 0), training);
  b0 = tn::dropout(tape, b0, config.dropout, mix(seed, 1), training);

  Var h0_labeled = tn::gather_rows(tape, h0, batch.label_nodes);
  Var b0_labeled = tn::gather_rows(tape, b0, batch.label_edges);

  ForwardOutput<T> out;
  auto readout = [&](std::size_t stage, Var h, Var b) {
    Var node_in = tn::concat(tape, {tn::gather_rows(tape, h, batch.label_nodes), h0_labeled}, 1);
    Var edge_in = tn::concat(tape, {tn::gather_rows(tape, b, batch.label_edges), b0_labeled}, 1);
    out.stages.push_back(stage);
    out.node_logits.push_back(mlp(tape, params, readout_name(stage, "node", ""), node_in));
    out.edge_logits.push_back(mlp(tape, params, readout_name(stage, "edge", ""), edge_in));
  };

  Var h = h0, b = b0;
  for (std::size_t q = 0; q < config.layers; ++q) {
    if (config.aux_readout) readout(q, h, b);
    const auto layer = egat_layer(tape, params, q, h, b, batch, config, training, seed);
    h = layer.nodes;
    b = layer.edges;
    out.attention.push_back(layer.attention);
  }
  readout(config.layers, h, b);
  return out;
}

namespace {

template <typename T>
int argmax_row(const tn::Tensor<T>& logits, std::size_t row) {
  const std::size_t width = logits.dim(1);
  const T* r = logits.data() + row * width;
  return static_cast<int>(std::max_element(r, r + width) - r);
}

}  // namespace

template <typename T>
std::vector<Prediction> predict(const tn::ParameterStore<T>& params, const ModelConfig& config,
                                std::span<const graph::GraphSample> samples, std::size_t batch_size) {
  check_parameters(config, params);
  if (batch_size == 0) throw ArgumentError("predict: batch_size must be positive");
  std::vector<Prediction> out;
  out.reserve(samples.size());
  for (std::size_t start = 0; start < samples.size(); start += batch_size) {
    const auto chunk = samples.subspan(start, std::min(batch_size, samples.size() - start));
    const Batch batch = make_batch(chunk);
    Tape<T> tape;
    const Bound bound = bind_parameters(tape, params, false);
    const auto result = forward(tape, bound, batch, config, false, 0);
    const auto& node_logits = tape.value(result.final_nodes());
    const auto& edge_logits = tape.value(result.final_edges());
    for (std::size_t g = 0; g < chunk.size(); ++g) {
      const std::size_t n = chunk[g].eslg.size();
      Prediction pred;
      pred.direction = graph::Adjacency(n);
      pred.edge_labels.assign(n * n, labels::kUnlabeled);
      const std::size_t node_begin = batch.graph_label_node_start[g];
      for (std::size_t i = 0; i < n; ++i) pred.node_labels.push_back(argmax_row(node_logits, node_begin + i));
      const std::size_t edge_begin = batch.graph_label_edge_start[g];
      const std::size_t edge_end =
          g + 1 < chunk.size() ? batch.graph_label_edge_start[g + 1] : batch.label_edges.size();
      for (std::size_t e = edge_begin; e < edge_end; ++e) {
        const auto [i, j] = batch.label_edge_pairs[e];
        pred.direction.set(i, j);
        pred.edge_labels[i * n + j] = argmax_row(edge_logits, e);
      }
      out.push_back(std::move(pred));
    }
  }
  return out;
}

template <typename T>
tn::Tensor<double> attention_matrix(const tn::ParameterStore<T>& params, const ModelConfig& config,
                                    const graph::GraphSample& sample) {
  check_parameters(config, params);
  const graph::GraphSample* one[] = {&sample};
  const Batch batch = make_batch(one);
  Tape<T> tape;
  const Bound bound = bind_parameters(tape, params, false);
  const auto result = forward(tape, bound, batch, config, false, 0);
  const auto& alpha = tape.value(result.attention.back());
  const std::size_t n = sample.graph.n;
  tn::Tensor<double> m({n, n});
  for (std::size_t e = 0; e < batch.edge_count(); ++e) m.at(batch.src[e], batch.dst[e]) = static_cast<double>(alpha[e]);
  return m;
}

#define HMER_INSTANTIATE_MODEL(T)                                                                                  \
  template Bound bind_parameters<T>(Tape<T>&, const tn::ParameterStore<T>&, bool);                                 \
  template Var node_embed<T>(Tape<T>&, const Bound&, Var, const ModelConfig&);                                    \
  template Var edge_embed<T>(Tape<T>&, const Bound&, Var, const ModelConfig&);                                    \
  template LayerOutput<T> egat_layer<T>(Tape<T>&, const Bound&, std::size_t, Var, Var, const Batch&,               \
                                        const ModelConfig&, bool, std::uint64_t);                                  \
  template ForwardOutput<T> forward<T>(Tape<T>&, const Bound&, const Batch&, const ModelConfig&, bool,             \
                                       std::uint64_t);                                                             \
  template std::vector<Prediction> predict<T>(const tn::ParameterStore<T>&, const ModelConfig&,                    \
                                              std::span<const graph::GraphSample>, std::size_t);                   \
  template tn::Tensor<double> attention_matrix<T>(const tn::ParameterStore<T>&, const ModelConfig&,                \
                                                  const graph::GraphSample&);

HMER_INSTANTIATE_MODEL(float)
HMER_INSTANTIATE_MODEL(double)

}  // namespace hmer::model
