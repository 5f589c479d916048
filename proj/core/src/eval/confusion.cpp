#include "hmer/eval/confusion.hpp"

#include "hmer/error.hpp"
#include "hmer/eval/metrics.hpp"

namespace hmer::eval {

void accumulate_confusion(ConfusionTables& tables, const labels::LabelGraph& predicted, const labels::LabelGraph& gold) {
  if (predicted.size() != gold.size()) throw DataError("confusion: stroke counts differ");
  for (const auto& seg : labels::segments(gold)) {
    const std::string truth = labels::segment_label(gold, seg);
    const std::string guess = labels::segment_label(predicted, seg);
    auto& row = tables.symbols[truth];
    ++row.occurrences;
    if (guess != truth) {
      ++row.errors;
      ++row.confusions[guess];
    }
  }
  for (const auto& [a, b, rel] : relation_triples(gold)) {
    const std::string key = labels::segment_label(gold, a) + " " + rel + " " + labels::segment_label(gold, b);
    std::string predicted_rel = kMissingRelation;
    for (auto s : a) {
      for (auto t : b) {
        const auto it = predicted.edges.find({s, t});
        if (it != predicted.edges.end() && it->second != labels::kSameSymbol) {
          predicted_rel = it->second;
          break;
        }
      }
      if (predicted_rel != kMissingRelation) break;
    }
    const std::string guess =
        labels::segment_label(predicted, a) + " " + predicted_rel + " " + labels::segment_label(predicted, b);
    auto& row = tables.pairs[key];
    ++row.occurrences;
    if (guess != key) {
      ++row.errors;
      ++row.confusions[guess];
    }
  }
}

ConfusionTables confusion_histograms(std::span<const std::pair<labels::LabelGraph, labels::LabelGraph>> pred_gold) {
  ConfusionTables tables;
  for (const auto& [pred, gold] : pred_gold) accumulate_confusion(tables, pred, gold);
  return tables;
}

ConfusionTables errors_only(const ConfusionTables& tables) {
  ConfusionTables out;
  for (const auto& [k, row] : tables.symbols)
    if (row.errors) out.symbols.emplace(k, row);
  for (const auto& [k, row] : tables.pairs)
    if (row.errors) out.pairs.emplace(k, row);
  return out;
}

}  // namespace hmer::eval
