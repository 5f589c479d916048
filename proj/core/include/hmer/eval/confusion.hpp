#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>

#include "hmer/labels/label_graph.hpp"

namespace hmer::eval {

/// Marks a symbol pair whose relation the prediction misses.
inline const std::string kMissingRelation = "∥";

struct ConfusionRow {
  std::size_t occurrences = 0;
  std::size_t errors = 0;
  std::map<std::string, std::size_t> confusions;  // wrong prediction -> count; sums to errors

  friend bool operator==(const ConfusionRow&, const ConfusionRow&) = default;
};

/// Symbol table keyed by gold label; pair table keyed by "A Rel B" over gold
/// relation triples. A gold symbol's prediction is the majority predicted
/// label over its strokes; a pair's prediction is "A' Rel' B'" with Rel' the
/// first predicted relation from any stroke of the first symbol to any
/// stroke of the second, or kMissingRelation.
struct ConfusionTables {
  std::map<std::string, ConfusionRow> symbols;
  std::map<std::string, ConfusionRow> pairs;

  friend bool operator==(const ConfusionTables&, const ConfusionTables&) = default;
};

void accumulate_confusion(ConfusionTables& tables, const labels::LabelGraph& predicted, const labels::LabelGraph& gold);

ConfusionTables confusion_histograms(std::span<const std::pair<labels::LabelGraph, labels::LabelGraph>> pred_gold);

/// Drops rows without errors.
ConfusionTables errors_only(const ConfusionTables& tables);

}  // namespace hmer::eval
