#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "hmer/graph/modeled_graph.hpp"
#include "hmer/model/config.hpp"
#include "hmer/train/losses.hpp"

namespace hmer::train {

struct TrainConfig {
  double learning_rate = 0.00027;
  std::size_t batch_size = 32;  // sub-expressions per step
  LossWeights loss;
  std::size_t max_epochs = 200;
  std::size_t patience = 20;
  double decay = 0.1;
  std::uint64_t seed = 0;
  /// Split training expressions into n_max-stroke sub-expressions.
  bool split = true;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct ExperimentConfig {
  model::ModelConfig model;
  TrainConfig train;
  graph::GraphConfig data;

  /// Checks each part and that the model input matches the data layout.
  void validate() const;
};

/// Flat "key = value" text with [model], [train] and [data] sections;
/// '#' and ';' start comments. Keys not listed below are errors (ParseError
/// with the line number).
///
///   [model] layers hidden dropout aux concat residual attention_activation
///           attention_slope embed_channels (comma list) embed_kernel
///           edge_embed_hidden readout_hidden
///   [train] learning_rate batch_size lambda1 lambda2 gamma max_epochs
///           patience decay seed split
///   [data]  node_samples edge_samples max_strokes global full_connect
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

std::string format_config(const ExperimentConfig& config);

}  // namespace hmer::train
