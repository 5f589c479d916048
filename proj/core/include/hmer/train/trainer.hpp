#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hmer/graph/modeled_graph.hpp"
#include "hmer/labels/vocabulary.hpp"
#include "hmer/tensor/checkpoint.hpp"
#include "hmer/tensor/optim.hpp"
#include "hmer/train/config_file.hpp"

namespace hmer::train {

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double node_acc = 0.0;  // on the validation set
  double edge_acc = 0.0;
  double lr = 0.0;        // learning rate used during the epoch

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct Evaluation {
  double loss = 0.0;
  double node_acc = 0.0;
  double edge_acc = 0.0;
};

/// Evaluation-mode loss and primitive accuracies over unmasked nodes and
/// edges, `batch_size` graphs per pass.
Evaluation evaluate(const tensor::ParameterStore<float>& params, const ExperimentConfig& config,
                    std::span<const graph::GraphSample> samples);

struct FitResult {
  std::vector<EpochRecord> history;
  tensor::ParameterStore<float> best;   // lowest validation loss
  tensor::ParameterStore<float> last;
  std::size_t best_epoch = 0;
};

/// Called after every epoch; return false to stop early.
using EpochCallback = std::function<bool(const EpochRecord&, const tensor::ParameterStore<float>&)>;

/// Seeded shuffle, minibatches of train.batch_size graphs, Adam, plateau
/// decay driven by the validation total loss, at most train.max_epochs.
/// Throws DataError when either set is empty.
FitResult fit(std::span<const graph::GraphSample> train_set, std::span<const graph::GraphSample> val_set,
              const ExperimentConfig& config, const EpochCallback& on_epoch = {});

/// CSV: epoch,train_loss,val_loss,node_acc,edge_acc,lr
std::string history_csv(std::span<const EpochRecord> history);

/// Checkpoint holding the parameters, the configuration and the vocabulary.
tensor::Checkpoint make_checkpoint(const tensor::ParameterStore<float>& params, const ExperimentConfig& config,
                                   const labels::Vocabulary& vocab, std::size_t epoch);

struct LoadedModel {
  tensor::ParameterStore<float> params;
  ExperimentConfig config;
  labels::Vocabulary vocab;
};

LoadedModel load_model(const std::filesystem::path& path);

}  // namespace hmer::train
