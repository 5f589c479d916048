#pragma once

#include <random>

#include "hmer/labels/label_graph.hpp"

namespace hmer::testing {

// A prediction derived from `gold` by zero to two random edits: relabel a
// stroke, merge or split symbols, change, drop, add or reverse a relation.
inline labels::LabelGraph perturb(const labels::LabelGraph& gold, std::mt19937_64& rng) {
  static const char* kSymbols[] = {"1", "x", "X", "+", "-", "2"};
  static const char* kRelations[] = {"Right", "Sup", "Sub", "Above", "Below"};
  labels::LabelGraph g = gold;
  const std::size_t n = g.size();
  std::uniform_int_distribution<std::size_t> stroke(0, n - 1);
  std::uniform_int_distribution<int> edits(0, 2), kind(0, 6), sym(0, 5), rel(0, 4);
  const int count = edits(rng);
  for (int e = 0; e < count; ++e) {
    const std::size_t a = stroke(rng), b = stroke(rng);
    switch (kind(rng)) {
      case 0:
        g.node_labels[a] = kSymbols[sym(rng)];
        break;
      case 1:
        if (a != b) {
          g.edges[{a, b}] = "*";
          g.edges[{b, a}] = "*";
        }
        break;
      case 2:
        for (auto it = g.edges.begin(); it != g.edges.end();)
          it = (it->second == "*" && (it->first.first == a || it->first.second == a)) ? g.edges.erase(it) : std::next(it);
        break;
      case 3:
        for (auto& [k, l] : g.edges)
          if (l != "*" && k.first == a) {
            l = kRelations[rel(rng)];
            break;
          }
        break;
      case 4:
        for (auto it = g.edges.begin(); it != g.edges.end(); ++it)
          if (it->second != "*" && it->first.first == a) {
            g.edges.erase(it);
            break;
          }
        break;
      case 5:
        if (a != b && !g.edges.count({a, b})) g.edges[{a, b}] = kRelations[rel(rng)];
        break;
      default:
        for (auto it = g.edges.begin(); it != g.edges.end(); ++it)
          if (it->second != "*" && it->first.first == a && !g.edges.count({it->first.second, a})) {
            const auto key = it->first;
            const auto label = it->second;
            g.edges.erase(it);
            g.edges[{key.second, key.first}] = label;
            break;
          }
        break;
    }
  }
  return g;
}

}  // namespace hmer::testing
