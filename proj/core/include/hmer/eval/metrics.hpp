#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "hmer/labels/eslg.hpp"
#include "hmer/labels/label_graph.hpp"

namespace hmer::eval {

struct PrimitiveCounts {
  std::size_t nodes = 0, nodes_correct = 0;
  std::size_t edges = 0, edges_correct = 0;

  double node_acc() const { return nodes ? static_cast<double>(nodes_correct) / static_cast<double>(nodes) : 1.0; }
  double edge_acc() const { return edges ? static_cast<double>(edges_correct) / static_cast<double>(edges) : 1.0; }
  PrimitiveCounts& operator+=(const PrimitiveCounts& o);
};

/// Node and edge classification counts over the gold ESLG's support. Throws
/// DataError when the two graphs disagree on size or direction matrix.
PrimitiveCounts primitive_accuracy(const labels::Eslg& predicted, const labels::Eslg& gold);

struct ExpressionResult {
  bool seg = false;   // same symbol partition
  bool sym = false;   // seg and same symbol labels
  bool rel = false;   // same segment-anchored relation triples
  bool stru = false;  // seg and rel
  bool exp = false;   // sym and rel

  friend bool operator==(const ExpressionResult&, const ExpressionResult&) = default;
};

/// A relation between two symbols, each given as its sorted stroke set.
using Triple = std::tuple<std::vector<std::size_t>, std::vector<std::size_t>, std::string>;

/// Relation triples of a label graph: every non-"*" stroke edge whose ends
/// lie in different symbols, lifted to those symbols.
std::set<Triple> relation_triples(const labels::LabelGraph& graph);

/// Throws DataError when the stroke counts differ.
ExpressionResult expression_metrics(const labels::LabelGraph& predicted, const labels::LabelGraph& gold);

struct ExpressionRecord {
  std::string id;
  std::size_t strokes = 0;
  std::size_t symbols = 0;  // gold symbol count
  ExpressionResult result;
  PrimitiveCounts primitives;
  std::size_t dropped_relations = 0;
  std::size_t gold_relations = 0;
};

struct MetricsReport {
  PrimitiveCounts primitives;
  double seg_rate = 0, sym_rate = 0, rel_rate = 0, stru_rate = 0, exp_rate = 0;
  /// Gold relations the modeled graph cannot express, summed over the set.
  std::size_t dropped_relations = 0;
  std::size_t gold_relations = 0;
  std::vector<ExpressionRecord> expressions;
};

MetricsReport summarize(std::vector<ExpressionRecord> records);

enum class LengthKey { strokes, symbols };

struct LengthBucket {
  std::size_t length = 0;
  std::size_t count = 0;
  std::size_t correct = 0;
  double rate() const { return count ? static_cast<double>(correct) / static_cast<double>(count) : 0.0; }
};

/// Expression recognition rate grouped by length, ascending.
std::vector<LengthBucket> length_breakdown(std::span<const ExpressionRecord> records, LengthKey key);

}  // namespace hmer::eval
