#include "hmer/labels/label_graph.hpp"

#include <map>
#include <numeric>

#include "hmer/error.hpp"

namespace hmer::labels {

void LabelGraph::add_edge(std::size_t src, std::size_t dst, std::string label) {
  if (src >= size() || dst >= size())
    throw DataError("edge (" + std::to_string(src) + ", " + std::to_string(dst) + ") out of range for " +
                    std::to_string(size()) + " strokes");
  if (src == dst) throw DataError("self edge on stroke " + std::to_string(src));
  edges[{src, dst}] = std::move(label);
}

std::string serialize_lg(const LabelGraph& graph) {
  std::string out;
  for (std::size_t i = 0; i < graph.size(); ++i)
    out += "N, s" + std::to_string(i) + ", " + graph.node_labels[i] + ", 1.0\n";
  for (const auto& [key, label] : graph.edges)
    out += "E, s" + std::to_string(key.first) + ", s" + std::to_string(key.second) + ", " + label + ", 1.0\n";
  return out;
}

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

std::vector<std::vector<std::size_t>> segments(const LabelGraph& graph) {
  std::vector<std::size_t> parent(graph.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (const auto& [key, label] : graph.edges) {
    if (label != kSameSymbol) continue;
    const auto a = find_root(parent, key.first);
    const auto b = find_root(parent, key.second);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  // Roots are always the smallest member, so visiting strokes in order
  // yields components ordered by first stroke.
  std::map<std::size_t, std::size_t> slot;
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const auto root = find_root(parent, i);
    auto [it, fresh] = slot.emplace(root, out.size());
    if (fresh) out.emplace_back();
    out[it->second].push_back(i);
  }
  return out;
}

std::string segment_label(const LabelGraph& graph, const std::vector<std::size_t>& members) {
  std::map<std::string, std::size_t> votes;
  for (auto m : members) ++votes[graph.node_labels[m]];
  std::string best;
  std::size_t best_count = 0;
  // members are ascending, so the first label reaching the max is the earliest.
  for (auto m : members) {
    const auto& label = graph.node_labels[m];
    if (votes[label] > best_count) {
      best = label;
      best_count = votes[label];
    }
  }
  return best;
}

}  // namespace hmer::labels
