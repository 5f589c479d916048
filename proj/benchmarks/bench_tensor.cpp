#include <benchmark/benchmark.h>

#include <random>

#include "hmer/tensor/ops.hpp"

namespace {

using hmer::tensor::Tape;
using hmer::tensor::Tensor;

Tensor<float> random_tensor(hmer::tensor::Shape shape, std::uint64_t seed) {
  Tensor<float> t(std::move(shape));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-1.f, 1.f);
  for (auto& x : t.values()) x = u(rng);
  return t;
}

void BM_Matmul(benchmark::State& state) {
  const std::size_t n = state.range(0);
  const auto a = random_tensor({n, n}, 1), b = random_tensor({n, n}, 2);
  for (auto _ : state) {
    Tape<float> tape;
    auto y = hmer::tensor::matmul(tape, tape.leaf(a), tape.leaf(b));
    benchmark::DoNotOptimize(tape.value(y).data());
  }
  state.SetItemsProcessed(state.iterations() * 2 * n * n * n);
}
BENCHMARK(BM_Matmul)->RangeMultiplier(2)->Range(64, 512);

void BM_MatmulBackward(benchmark::State& state) {
  const std::size_t n = state.range(0);
  const auto a = random_tensor({n, n}, 1), b = random_tensor({n, n}, 2);
  for (auto _ : state) {
    Tape<float> tape;
    auto y = hmer::tensor::matmul(tape, tape.leaf(a, true), tape.leaf(b, true));
    tape.backward(hmer::tensor::sum_all(tape, y));
  }
}
BENCHMARK(BM_MatmulBackward)->RangeMultiplier(2)->Range(64, 256);

// Depthwise stroke convolution at the default sizes: d_n = 150, kernel 9.
void BM_DepthwiseConv(benchmark::State& state) {
  const std::size_t batch = state.range(0), channels = 64;
  const auto x = random_tensor({batch, channels, 150}, 3);
  const auto w = random_tensor({channels, 1, 9}, 4);
  const auto b = random_tensor({channels}, 5);
  for (auto _ : state) {
    Tape<float> tape;
    auto y = hmer::tensor::conv1d(tape, tape.leaf(x), tape.leaf(w), tape.leaf(b), {1, 4, channels});
    benchmark::DoNotOptimize(tape.value(y).data());
  }
}
BENCHMARK(BM_DepthwiseConv)->Arg(16)->Arg(64);

void BM_MaskedSoftmax(benchmark::State& state) {
  const std::size_t n = state.range(0);
  const auto x = random_tensor({n, n}, 6);
  std::vector<std::uint8_t> mask(n * n);
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = (i * 7) % 3 != 0;
  for (auto _ : state) {
    Tape<float> tape;
    auto y = hmer::tensor::masked_softmax(tape, tape.leaf(x), mask, 1);
    benchmark::DoNotOptimize(tape.value(y).data());
  }
}
BENCHMARK(BM_MaskedSoftmax)->Arg(17)->Arg(64);

}  // namespace
