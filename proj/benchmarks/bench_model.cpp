#include <benchmark/benchmark.h>

#include "hmer/labels/vocabulary.hpp"
#include "hmer/model/batch.hpp"
#include "hmer/model/egat.hpp"
#include "hmer/model/parameters.hpp"
#include "hmer/train/dataset.hpp"
#include "hmer/train/losses.hpp"
#include "hmer/ink/synthetic.hpp"

namespace {

struct Fixture {
  hmer::model::ModelConfig config;
  hmer::tensor::ParameterStore<float> params;
  hmer::model::Batch batch;
};

// A batch of training sub-expressions; state.range(0) is the hidden size.
Fixture make_fixture(std::size_t hidden, std::size_t graphs) {
  Fixture f;
  f.config.hidden = hidden;
  f.config.layers = 2;
  f.params = hmer::model::init_parameters<float>(f.config, 1);
  std::vector<hmer::train::DatasetItem> items;
  for (auto& e : hmer::ink::generate_synthetic(4, graphs, 4)) items.push_back({e.ink, e.labels});
  const auto set = hmer::train::prepare(items, {}, hmer::labels::Vocabulary::crohme(), true);
  f.batch = hmer::model::make_batch(set.samples);
  return f;
}

void BM_Forward(benchmark::State& state) {
  const auto f = make_fixture(state.range(0), 8);
  for (auto _ : state) {
    hmer::tensor::Tape<float> tape;
    auto out = hmer::model::forward(tape, hmer::model::bind_parameters(tape, f.params, false), f.batch, f.config, false, 0);
    benchmark::DoNotOptimize(tape.value(out.final_nodes()).data());
  }
  state.counters["nodes"] = double(f.batch.nodes);
}
BENCHMARK(BM_Forward)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  const auto f = make_fixture(state.range(0), 8);
  for (auto _ : state) {
    hmer::tensor::Tape<float> tape;
    const auto bound = hmer::model::bind_parameters(tape, f.params, true);
    auto out = hmer::model::forward(tape, bound, f.batch, f.config, true, 1);
    tape.backward(hmer::train::batch_loss(tape, out, f.batch, {}).total);
  }
}
BENCHMARK(BM_TrainStep)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace
