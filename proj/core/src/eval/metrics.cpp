#include "hmer/eval/metrics.hpp"

#include <map>

#include "hmer/error.hpp"

namespace hmer::eval {

PrimitiveCounts& PrimitiveCounts::operator+=(const PrimitiveCounts& o) {
  nodes += o.nodes;
  nodes_correct += o.nodes_correct;
  edges += o.edges;
  edges_correct += o.edges_correct;
  return *this;
}

PrimitiveCounts primitive_accuracy(const labels::Eslg& predicted, const labels::Eslg& gold) {
  if (predicted.size() != gold.size()) throw DataError("primitive_accuracy: node counts differ");
  if (!(predicted.direction == gold.direction)) throw DataError("primitive_accuracy: edge supports differ");
  PrimitiveCounts c;
  const std::size_t n = gold.size();
  for (std::size_t i = 0; i < n; ++i) {
    ++c.nodes;
    c.nodes_correct += predicted.node_labels[i] == gold.node_labels[i];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (gold.direction(i, j)) {
        ++c.edges;
        c.edges_correct += predicted.edge_label(i, j) == gold.edge_label(i, j);
      }
  return c;
}

std::set<Triple> relation_triples(const labels::LabelGraph& graph) {
  const auto segs = labels::segments(graph);
  std::vector<std::size_t> seg_of(graph.size());
  for (std::size_t s = 0; s < segs.size(); ++s)
    for (auto stroke : segs[s]) seg_of[stroke] = s;
  std::set<Triple> out;
  for (const auto& [key, label] : graph.edges) {
    if (label == labels::kSameSymbol) continue;
    const auto a = seg_of[key.first], b = seg_of[key.second];
    if (a != b) out.emplace(segs[a], segs[b], label);
  }
  return out;
}

ExpressionResult expression_metrics(const labels::LabelGraph& predicted, const labels::LabelGraph& gold) {
  if (predicted.size() != gold.size())
    throw DataError("expression_metrics: " + std::to_string(predicted.size()) + " predicted strokes vs " +
                    std::to_string(gold.size()) + " gold");
  ExpressionResult r;
  const auto pred_segs = labels::segments(predicted);
  const auto gold_segs = labels::segments(gold);
  r.seg = pred_segs == gold_segs;
  if (r.seg) {
    r.sym = true;
    for (const auto& s : gold_segs)
      if (labels::segment_label(predicted, s) != labels::segment_label(gold, s)) r.sym = false;
  }
  r.rel = relation_triples(predicted) == relation_triples(gold);
  r.stru = r.seg && r.rel;
  r.exp = r.sym && r.rel;
  return r;
}

MetricsReport summarize(std::vector<ExpressionRecord> records) {
  MetricsReport m;
  std::size_t seg = 0, sym = 0, rel = 0, stru = 0, exp = 0;
  for (const auto& r : records) {
    m.primitives += r.primitives;
    m.dropped_relations += r.dropped_relations;
    m.gold_relations += r.gold_relations;
    seg += r.result.seg;
    sym += r.result.sym;
    rel += r.result.rel;
    stru += r.result.stru;
    exp += r.result.exp;
  }
  const double n = records.empty() ? 1.0 : static_cast<double>(records.size());
  m.seg_rate = static_cast<double>(seg) / n;
  m.sym_rate = static_cast<double>(sym) / n;
  m.rel_rate = static_cast<double>(rel) / n;
  m.stru_rate = static_cast<double>(stru) / n;
  m.exp_rate = static_cast<double>(exp) / n;
  m.expressions = std::move(records);
  return m;
}

std::vector<LengthBucket> length_breakdown(std::span<const ExpressionRecord> records, LengthKey key) {
  std::map<std::size_t, LengthBucket> buckets;
  for (const auto& r : records) {
    const std::size_t len = key == LengthKey::strokes ? r.strokes : r.symbols;
    auto& b = buckets[len];
    b.length = len;
    ++b.count;
    b.correct += r.result.exp;
  }
  std::vector<LengthBucket> out;
  for (const auto& [len, b] : buckets) out.push_back(b);
  return out;
}

}  // namespace hmer::eval
