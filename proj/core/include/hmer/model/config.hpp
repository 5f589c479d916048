#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hmer::model {

struct ModelConfig {
  std::size_t layers = 5;     // Q
  std::size_t hidden = 512;
  int node_classes = 101;     // C_1
  int edge_classes = 14;      // C_2
  double dropout = 0.1;
  bool aux_readout = true;
  bool message_concat = true;
  bool residual = true;
  /// leaky-relu on attention logits before the softmax
  bool attention_activation = true;
  double attention_slope = 0.2;

  std::vector<std::size_t> embed_channels = {64, 128, 256};
  std::size_t embed_kernel = 9;
  std::size_t edge_embed_hidden = 384;
  std::size_t readout_hidden = 384;
  std::size_t edge_input = 50;  // 5 * d_e

  /// Throws ArgumentError for inconsistent values.
  void validate() const;

  /// Readout stages that produce logits: 0..Q-1 are auxiliary (present only
  /// with aux_readout), Q is the final readout.
  std::size_t first_readout_stage() const noexcept { return aux_readout ? 0 : layers; }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Canonical JSON for checkpoints; from_json accepts what to_json writes.
std::string to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const std::string& text);

}  // namespace hmer::model
