#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hmer/model/batch.hpp"
#include "hmer/model/egat.hpp"
#include "hmer/tensor/ops.hpp"

namespace hmer::train {

using tensor::Tape;
using tensor::Var;

/// Mean cross-entropy over rows whose mask byte is set; a rank-0 zero with
/// no gradient path when every row is masked.
template <typename T>
Var node_loss(Tape<T>& tape, Var logits, std::span<const int> labels, std::span<const std::uint8_t> mask);

/// Mean focal loss -(1 - p_t)^gamma log p_t over unmasked rows.
template <typename T>
Var edge_loss(Tape<T>& tape, Var logits, std::span<const int> labels, std::span<const std::uint8_t> mask, T gamma);

struct LossWeights {
  double lambda1 = 0.5;  // node share of each stage loss
  double lambda2 = 0.3;  // weight of every auxiliary stage
  double gamma = 1.5;    // focal focusing parameter
};

template <typename T>
struct StageLoss {
  Var node;
  Var edge;
};

/// L = lambda1 Ln + (1 - lambda1) Le + sum_i lambda2 (lambda1 Ln^i + (1 - lambda1) Le^i)
/// where the last entry of `stages` is the final readout and the rest are
/// auxiliary.
template <typename T>
Var total_loss(Tape<T>& tape, std::span<const StageLoss<T>> stages, const LossWeights& weights);

/// Same combination on plain numbers: {node, edge} per stage, final last.
double total_loss(std::span<const std::pair<double, double>> stages, const LossWeights& weights);

template <typename T>
struct BatchLoss {
  Var total;
  std::vector<StageLoss<T>> stages;
};

/// Stage losses for every readout of `output` against the batch labels.
template <typename T>
BatchLoss<T> batch_loss(Tape<T>& tape, const model::ForwardOutput<T>& output, const model::Batch& batch,
                        const LossWeights& weights);

}  // namespace hmer::train
