#pragma once

#include <cstddef>
#include <vector>

#include "hmer/graph/adjacency.hpp"
#include "hmer/labels/label_graph.hpp"
#include "hmer/labels/vocabulary.hpp"

namespace hmer::labels {

inline constexpr int kUnlabeled = -1;

/// Ground truth aligned with a modeled adjacency: one directed edge per
/// adjacent pair, pointing from the earlier to the later stroke.
struct Eslg {
  std::vector<int> node_labels;  // n symbol class ids
  std::vector<int> edge_labels;  // n*n edge class ids; kUnlabeled outside `direction`
  graph::Adjacency direction;    // 1 at (i, j) iff j > i and A(i, j) = 1

  std::size_t size() const noexcept { return node_labels.size(); }
  int edge_label(std::size_t i, std::size_t j) const { return edge_labels[i * size() + j]; }

  friend bool operator==(const Eslg&, const Eslg&) = default;
};

struct EslgConversion {
  Eslg eslg;
  /// Positional relations between strokes that the adjacency cannot express.
  std::size_t dropped_relations = 0;
  /// Same-symbol links between non-adjacent strokes.
  std::size_t dropped_memberships = 0;
};

/// Keeps the upper-triangular part of `adjacency` and labels every kept pair:
/// "*" if the strokes share a symbol, r for an SLG edge i->j labeled r,
/// opposite(r) for an edge j->i, "NoE" otherwise.
EslgConversion to_eslg(const LabelGraph& slg, const graph::Adjacency& adjacency, const Vocabulary& vocab);

/// Decodes class ids back to a stroke label graph. Symbols are connected
/// components over "*" edges, labeled by majority vote (earliest stroke wins
/// ties); opposite classes are emitted reversed; "NoE" and positional edges
/// inside a symbol are dropped.
LabelGraph eslg_to_slg(const std::vector<int>& node_labels, const std::vector<int>& edge_labels,
                       const graph::Adjacency& direction, const Vocabulary& vocab);

inline LabelGraph eslg_to_slg(const Eslg& eslg, const Vocabulary& vocab) {
  return eslg_to_slg(eslg.node_labels, eslg.edge_labels, eslg.direction, vocab);
}

}  // namespace hmer::labels
