#pragma once

#include <span>
#include <string>
#include <vector>

#include "hmer/eval/confusion.hpp"
#include "hmer/eval/metrics.hpp"
#include "hmer/graph/modeled_graph.hpp"
#include "hmer/labels/vocabulary.hpp"
#include "hmer/tensor/optim.hpp"
#include "hmer/tensor/tensor.hpp"
#include "hmer/train/config_file.hpp"
#include "hmer/train/dataset.hpp"

namespace hmer::eval {

/// Full-expression graph of unlabeled ink; every label is kUnlabeled.
graph::GraphSample inference_sample(const ink::InkExpression& ink, const graph::GraphConfig& config);

/// Decoded stroke label graph per item, in order.
std::vector<labels::LabelGraph> infer(const tensor::ParameterStore<float>& params, const train::ExperimentConfig& config,
                                      const labels::Vocabulary& vocab, std::span<const train::DatasetItem> items);

struct EvaluatedSet {
  MetricsReport report;
  std::vector<labels::LabelGraph> predicted;
  std::vector<labels::LabelGraph> gold;
};

/// Predicts every labeled item on its full graph and scores it. Items
/// without labels raise DataError.
EvaluatedSet evaluate_items(const tensor::ParameterStore<float>& params, const train::ExperimentConfig& config,
                            const labels::Vocabulary& vocab, std::span<const train::DatasetItem> items);

/// Final-layer attention of an expression's full graph.
tensor::Tensor<double> export_attention(const tensor::ParameterStore<float>& params,
                                        const train::ExperimentConfig& config, const ink::InkExpression& ink);

/// One row per expression, then an "ALL" row holding the set-level rates.
std::string metrics_csv(const MetricsReport& report);

/// length,count,correct,rate
std::string length_csv(std::span<const LengthBucket> buckets);

/// {"symbols": {gold: {occurrences, errors, confusions: {pred: n}}}, "pairs": {...}}
std::string confusion_json(const ConfusionTables& tables);

/// Row i, column j holds entry (i, j).
std::string matrix_csv(const tensor::Tensor<double>& matrix);

}  // namespace hmer::eval
