#include <benchmark/benchmark.h>

#include "hmer/graph/frpt.hpp"
#include "hmer/graph/modeled_graph.hpp"
#include "hmer/graph/visibility.hpp"
#include "hmer/ink/preprocess.hpp"
#include "hmer/ink/synthetic.hpp"

namespace {

hmer::ink::InkExpression expression_with_strokes(std::size_t want) {
  for (const auto& e : hmer::ink::generate_synthetic(9, 200, 12))
    if (e.ink.strokes.size() >= want) return e.ink;
  return hmer::ink::generate_synthetic(9, 1, 12).front().ink;
}

void BM_Resample(benchmark::State& state) {
  const auto ink = expression_with_strokes(1);
  for (auto _ : state) {
    for (const auto& s : ink.strokes) benchmark::DoNotOptimize(hmer::ink::resample_stroke(s, 150));
  }
}
BENCHMARK(BM_Resample);

void BM_LineOfSight(benchmark::State& state) {
  const auto ink = expression_with_strokes(state.range(0));
  const auto strokes = hmer::ink::preprocess(ink, 150);
  for (auto _ : state) benchmark::DoNotOptimize(hmer::graph::line_of_sight(strokes));
  state.counters["strokes"] = double(strokes.size());
}
BENCHMARK(BM_LineOfSight)->Arg(4)->Arg(12);

void BM_Frpt(benchmark::State& state) {
  const auto strokes = hmer::ink::preprocess(expression_with_strokes(2), 150);
  for (auto _ : state) benchmark::DoNotOptimize(hmer::graph::frpt_features(strokes[0], strokes[1], 10));
}
BENCHMARK(BM_Frpt);

void BM_BuildLocalGraph(benchmark::State& state) {
  const auto ink = expression_with_strokes(state.range(0));
  const hmer::graph::GraphConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(hmer::graph::build_local_graph(ink, config));
}
BENCHMARK(BM_BuildLocalGraph)->Arg(4)->Arg(12);

}  // namespace
