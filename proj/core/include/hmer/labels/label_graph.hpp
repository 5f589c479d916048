#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace hmer::labels {

/// Relation label marking two strokes of the same symbol.
inline const std::string kSameSymbol = "*";

/// Stroke label graph: one symbol label per stroke (writing order) and
/// directed labeled edges between strokes. Edge labels are either positional
/// relations or kSameSymbol.
struct LabelGraph {
  std::vector<std::string> node_labels;
  std::map<std::pair<std::size_t, std::size_t>, std::string> edges;

  std::size_t size() const noexcept { return node_labels.size(); }

  /// Throws DataError on an out-of-range index or a self edge.
  void add_edge(std::size_t src, std::size_t dst, std::string label);

  friend bool operator==(const LabelGraph&, const LabelGraph&) = default;
};

/// "N, s{i}, label, 1.0" per stroke then "E, s{i}, s{j}, label, 1.0" per edge,
/// LF line endings. parse_lg reads it back to an equal graph.
std::string serialize_lg(const LabelGraph& graph);

/// Symbols as stroke sets: connected components over kSameSymbol edges
/// (either direction). Each component is sorted; components are ordered by
/// their first stroke.
std::vector<std::vector<std::size_t>> segments(const LabelGraph& graph);

/// Majority label over the member strokes; ties go to the earliest stroke.
std::string segment_label(const LabelGraph& graph, const std::vector<std::size_t>& members);

}  // namespace hmer::labels
