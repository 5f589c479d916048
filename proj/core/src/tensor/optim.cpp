#include "hmer/tensor/optim.hpp"

#include <cmath>

#include "hmer/error.hpp"

namespace hmer::tensor {

template <typename T>
void Adam<T>::step(ParameterStore<T>& params, const ParameterStore<T>& grads) {
  ++steps_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (auto& [name, param] : params) {
    auto g_it = grads.find(name);
    if (g_it == grads.end()) continue;
    const Tensor<T>& g = g_it->second;
    if (g.shape() != param.shape()) {
      throw ShapeError("adam: gradient for '" + name + "' has shape " + to_string(g.shape()) + ", parameter " +
                       to_string(param.shape()));
    }
    auto [m_it, m_new] = first_moment_.try_emplace(name, param.shape());
    auto [v_it, v_new] = second_moment_.try_emplace(name, param.shape());
    Tensor<T>& m = m_it->second;
    Tensor<T>& v = v_it->second;
    for (std::size_t i = 0; i < param.size(); ++i) {
      const double gi = g[i];
      const double mi = b1 * m[i] + (1.0 - b1) * gi;
      const double vi = b2 * v[i] + (1.0 - b2) * gi * gi;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      const double m_hat = mi / correction1;
      const double v_hat = vi / correction2;
      param[i] = static_cast<T>(param[i] - options_.learning_rate * m_hat / (std::sqrt(v_hat) + options_.epsilon));
    }
  }
}

template class Adam<float>;
template class Adam<double>;

PlateauScheduler::PlateauScheduler(double initial_lr, PlateauOptions options) : lr_(initial_lr), options_(options) {
  if (options.patience == 0) throw ArgumentError("plateau patience must be positive");
}

double PlateauScheduler::step(double validation_loss) {
  if (validation_loss < best_) {
    best_ = validation_loss;
    bad_epochs_ = 0;
    return lr_;
  }
  if (++bad_epochs_ >= options_.patience) {
    lr_ *= options_.factor;
    bad_epochs_ = 0;
  }
  return lr_;
}

}  // namespace hmer::tensor
