#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "hmer/tensor/ops.hpp"
#include "hmer/tensor/tape.hpp"

namespace hmer::testing {

using tensor::Shape;
using tensor::Tape;
using tensor::Tensor;
using tensor::Var;

inline Tensor<double> random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  Tensor<double> t(std::move(shape));
  std::uniform_real_distribution<double> u(lo, hi);
  for (auto& v : t.values()) v = u(rng);
  return t;
}

// Values bounded away from 0 so relu-like kinks stay out of the finite
// difference stencil.
inline Tensor<double> away_from_zero(Shape shape, std::mt19937_64& rng) {
  Tensor<double> t(std::move(shape));
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::bernoulli_distribution sign(0.5);
  for (auto& v : t.values()) v = sign(rng) ? u(rng) : -u(rng);
  return t;
}

using Builder = std::function<Var(Tape<double>&, const std::vector<Var>&)>;

// Largest relative error ||analytic - numeric|| / (||analytic|| + ||numeric||)
// over the inputs, with the output projected onto fixed random weights.
inline double gradient_error(const std::vector<Tensor<double>>& inputs, const Builder& build, double eps = 1e-6,
                             std::uint64_t seed = 7) {
  Tensor<double> proj;
  auto evaluate = [&](const std::vector<Tensor<double>>& xs, std::vector<Tensor<double>>* grads) {
    Tape<double> tape;
    std::vector<Var> vars;
    for (const auto& x : xs) vars.push_back(tape.leaf(x, true));
    Var out = build(tape, vars);
    if (proj.empty()) {
      std::mt19937_64 rng(seed);
      proj = random_tensor(tape.value(out).shape(), rng);
    }
    Var p = tape.constant(proj);
    Var loss = tensor::sum_all(tape, tensor::mul(tape, out, p));
    const double value = tape.value(loss)[0];
    if (grads) {
      tape.backward(loss);
      for (Var v : vars) grads->push_back(tape.grad(v));
    }
    return value;
  };

  std::vector<Tensor<double>> analytic;
  evaluate(inputs, &analytic);
  double worst = 0.0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    double diff = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < inputs[k].size(); ++i) {
      auto xs = inputs;
      xs[k][i] += eps;
      const double up = evaluate(xs, nullptr);
      xs[k][i] -= 2 * eps;
      const double down = evaluate(xs, nullptr);
      const double numeric = (up - down) / (2 * eps);
      const double a = analytic[k][i];
      diff += (a - numeric) * (a - numeric);
      norm += a * a + numeric * numeric;
    }
    if (norm > 0) worst = std::max(worst, std::sqrt(diff) / (std::sqrt(norm) + 1e-300));
  }
  return worst;
}

}  // namespace hmer::testing
