#include "hmer/train/losses.hpp"

#include "hmer/error.hpp"

namespace hmer::train {
namespace {

template <typename T>
std::vector<T> mean_weights(std::span<const std::uint8_t> mask) {
  std::size_t count = 0;
  for (auto m : mask) count += m != 0;
  std::vector<T> w(mask.size(), T{0});
  if (count == 0) return w;
  const T each = T{1} / static_cast<T>(count);
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) w[i] = each;
  return w;
}

template <typename T>
Var masked_loss(Tape<T>& tape, Var logits, std::span<const int> labels, std::span<const std::uint8_t> mask, T gamma,
                bool focal) {
  if (labels.size() != mask.size())
    throw ShapeError("loss: " + std::to_string(labels.size()) + " labels but " + std::to_string(mask.size()) +
                     " mask entries");
  const auto w = mean_weights<T>(mask);
  return focal ? tensor::focal_loss(tape, logits, labels, std::span<const T>(w), gamma)
               : tensor::cross_entropy(tape, logits, labels, std::span<const T>(w));
}

}  // namespace

template <typename T>
Var node_loss(Tape<T>& tape, Var logits, std::span<const int> labels, std::span<const std::uint8_t> mask) {
  return masked_loss(tape, logits, labels, mask, T{0}, false);
}

template <typename T>
Var edge_loss(Tape<T>& tape, Var logits, std::span<const int> labels, std::span<const std::uint8_t> mask, T gamma) {
  return masked_loss(tape, logits, labels, mask, gamma, true);
}

template <typename T>
Var total_loss(Tape<T>& tape, std::span<const StageLoss<T>> stages, const LossWeights& weights) {
  if (stages.empty()) throw ArgumentError("total_loss: no stages");
  if (!(weights.lambda1 >= 0.0 && weights.lambda1 <= 1.0)) throw ArgumentError("total_loss: lambda1 must be in [0, 1]");
  const T l1 = static_cast<T>(weights.lambda1);
  Var total;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const T c = s + 1 == stages.size() ? T{1} : static_cast<T>(weights.lambda2);
    Var term = tensor::add(tape, tensor::scale(tape, stages[s].node, c * l1),
                           tensor::scale(tape, stages[s].edge, c * (T{1} - l1)));
    total = total.valid() ? tensor::add(tape, total, term) : term;
  }
  return total;
}

double total_loss(std::span<const std::pair<double, double>> stages, const LossWeights& weights) {
  if (stages.empty()) throw ArgumentError("total_loss: no stages");
  double total = 0.0;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const double c = s + 1 == stages.size() ? 1.0 : weights.lambda2;
    total += c * (weights.lambda1 * stages[s].first + (1.0 - weights.lambda1) * stages[s].second);
  }
  return total;
}

template <typename T>
BatchLoss<T> batch_loss(Tape<T>& tape, const model::ForwardOutput<T>& output, const model::Batch& batch,
                        const LossWeights& weights) {
  BatchLoss<T> out;
  for (std::size_t s = 0; s < output.node_logits.size(); ++s) {
    out.stages.push_back({node_loss(tape, output.node_logits[s], std::span<const int>(batch.node_labels),
                                    std::span<const std::uint8_t>(batch.node_mask)),
                          edge_loss(tape, output.edge_logits[s], std::span<const int>(batch.edge_labels),
                                    std::span<const std::uint8_t>(batch.edge_mask), static_cast<T>(weights.gamma))});
  }
  out.total = total_loss(tape, std::span<const StageLoss<T>>(out.stages), weights);
  return out;
}

#define HMER_INSTANTIATE_LOSSES(T)                                                                                 \
  template Var node_loss<T>(Tape<T>&, Var, std::span<const int>, std::span<const std::uint8_t>);                  \
  template Var edge_loss<T>(Tape<T>&, Var, std::span<const int>, std::span<const std::uint8_t>, T);               \
  template Var total_loss<T>(Tape<T>&, std::span<const StageLoss<T>>, const LossWeights&);                         \
  template BatchLoss<T> batch_loss<T>(Tape<T>&, const model::ForwardOutput<T>&, const model::Batch&,               \
                                      const LossWeights&);

HMER_INSTANTIATE_LOSSES(float)
HMER_INSTANTIATE_LOSSES(double)

}  // namespace hmer::train
