#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <string>

#include "hmer/tensor/tensor.hpp"

namespace hmer::tensor {

/// Named learnable tensors, iterated in name order.
template <typename T>
using ParameterStore = std::map<std::string, Tensor<T>>;

struct AdamOptions {
  double learning_rate = 0.00027;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias correction. Moments are created lazily per parameter name
/// and must keep the parameter's shape.
template <typename T>
class Adam {
 public:
  explicit Adam(AdamOptions options = {}) : options_(options) {}

  /// Applies one update to every parameter that has an entry in `grads`.
  void step(ParameterStore<T>& params, const ParameterStore<T>& grads);

  double learning_rate() const noexcept { return options_.learning_rate; }
  void set_learning_rate(double lr) noexcept { options_.learning_rate = lr; }
  const AdamOptions& options() const noexcept { return options_; }
  std::size_t step_count() const noexcept { return steps_; }

 private:
  AdamOptions options_;
  std::size_t steps_ = 0;
  ParameterStore<T> first_moment_;
  ParameterStore<T> second_moment_;
};

extern template class Adam<float>;
extern template class Adam<double>;

struct PlateauOptions {
  double factor = 0.1;
  std::size_t patience = 20;
};

// Multiplies the learning rate by `factor` once the best validation loss has
// gone `patience` consecutive epochs without strictly improving. The
// counter restarts after an improvement or a decay.
class PlateauScheduler {
 public:
  PlateauScheduler(double initial_lr, PlateauOptions options = {});

  /// Feeds one epoch's validation loss; returns the learning rate to use next.
  double step(double validation_loss);

  double learning_rate() const noexcept { return lr_; }
  double best() const noexcept { return best_; }
  std::size_t bad_epochs() const noexcept { return bad_epochs_; }

 private:
  double lr_;
  PlateauOptions options_;
  double best_ = std::numeric_limits<double>::infinity();
  std::size_t bad_epochs_ = 0;
};

}  // namespace hmer::tensor
