#include "hmer/labels/eslg.hpp"

#include <numeric>

#include "hmer/error.hpp"

namespace hmer::labels {

EslgConversion to_eslg(const LabelGraph& slg, const graph::Adjacency& adjacency, const Vocabulary& vocab) {
  const std::size_t n = slg.size();
  if (adjacency.size() != n)
    throw DataError("label graph has " + std::to_string(n) + " strokes but adjacency is " +
                    std::to_string(adjacency.size()) + "x" + std::to_string(adjacency.size()));

  EslgConversion result;
  Eslg& eslg = result.eslg;
  eslg.node_labels.reserve(n);
  for (const auto& label : slg.node_labels) eslg.node_labels.push_back(vocab.symbol_id(label));
  eslg.edge_labels.assign(n * n, kUnlabeled);
  eslg.direction = graph::Adjacency(n);

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (adjacency(i, j)) {
        eslg.direction.set(i, j);
        eslg.edge_labels[i * n + j] = vocab.no_edge_class();
      }

  // Same-symbol links take precedence over any positional label on the pair.
  for (const auto& [key, label] : slg.edges) {
    if (label != kSameSymbol) continue;
    const auto i = std::min(key.first, key.second);
    const auto j = std::max(key.first, key.second);
    if (eslg.direction(i, j)) eslg.edge_labels[i * n + j] = vocab.same_symbol_class();
  }
  for (const auto& [key, label] : slg.edges) {
    if (label == kSameSymbol) {
      const auto i = std::min(key.first, key.second);
      const auto j = std::max(key.first, key.second);
      // Count each unordered pair once even when stored both ways.
      if (!eslg.direction(i, j) && (key.first < key.second || !slg.edges.count({key.second, key.first})))
        ++result.dropped_memberships;
      continue;
    }
    const int r = vocab.relation_class(label);
    const auto [src, dst] = key;
    const auto i = std::min(src, dst);
    const auto j = std::max(src, dst);
    if (!eslg.direction(i, j)) {
      ++result.dropped_relations;
      continue;
    }
    int& slot = eslg.edge_labels[i * n + j];
    if (slot == vocab.same_symbol_class()) continue;
    // A positional i->j label wins over a reversed j->i one.
    if (src < dst) slot = r;
    else if (slot == vocab.no_edge_class()) slot = vocab.opposite(r);
  }
  return result;
}

LabelGraph eslg_to_slg(const std::vector<int>& node_labels, const std::vector<int>& edge_labels,
                       const graph::Adjacency& direction, const Vocabulary& vocab) {
  const std::size_t n = node_labels.size();
  if (direction.size() != n || edge_labels.size() != n * n)
    throw DataError("ESLG shapes disagree: " + std::to_string(n) + " nodes, " + std::to_string(edge_labels.size()) +
                    " edge slots, " + std::to_string(direction.size()) + "-node direction matrix");

  LabelGraph stroke_graph;
  for (int id : node_labels) stroke_graph.node_labels.push_back(vocab.symbol(id));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (direction(i, j) && edge_labels[i * n + j] == vocab.same_symbol_class())
        stroke_graph.edges[{i, j}] = kSameSymbol;

  // Close the membership relation and relabel by majority vote.
  const auto groups = segments(stroke_graph);
  std::vector<std::size_t> group_of(n);
  LabelGraph out;
  out.node_labels.resize(n);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::string label = segment_label(stroke_graph, groups[g]);
    for (auto s : groups[g]) {
      group_of[s] = g;
      out.node_labels[s] = label;
    }
    for (auto a : groups[g])
      for (auto b : groups[g])
        if (a != b) out.edges[{a, b}] = kSameSymbol;
  }

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!direction(i, j) || group_of[i] == group_of[j]) continue;
      const int c = edge_labels[i * n + j];
      if (vocab.is_positional(c)) out.edges[{i, j}] = vocab.relations()[static_cast<std::size_t>(c)];
      else if (vocab.is_opposite(c))
        out.edges[{j, i}] = vocab.relations()[static_cast<std::size_t>(vocab.opposite(c))];
    }
  return out;
}

}  // namespace hmer::labels
