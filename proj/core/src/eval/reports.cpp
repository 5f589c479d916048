#include "hmer/eval/reports.hpp"

#include <cstdio>

#include "hmer/error.hpp"
#include "hmer/ink/preprocess.hpp"
#include "hmer/labels/eslg.hpp"
#include "hmer/model/egat.hpp"
#include "json.hpp"

namespace hmer::eval {

namespace {

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.8f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::size_t positional_edges(const labels::LabelGraph& g) {
  std::size_t n = 0;
  for (const auto& [key, label] : g.edges) n += label != labels::kSameSymbol;
  return n;
}

labels::LabelGraph decode(const model::Prediction& p, const labels::Vocabulary& vocab) {
  return labels::eslg_to_slg(p.node_labels, p.edge_labels, p.direction, vocab);
}

}  // namespace

graph::GraphSample inference_sample(const ink::InkExpression& ink, const graph::GraphConfig& config) {
  const auto local = graph::build_local_graph(ink, config);
  const std::size_t n = local.n;
  labels::Eslg eslg;
  eslg.node_labels.assign(n, labels::kUnlabeled);
  eslg.edge_labels.assign(n * n, labels::kUnlabeled);
  eslg.direction = graph::Adjacency(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (local.adjacency(i, j)) eslg.direction.set(i, j);
  return graph::full_sample(local, eslg, config);
}

std::vector<labels::LabelGraph> infer(const tensor::ParameterStore<float>& params, const train::ExperimentConfig& config,
                                      const labels::Vocabulary& vocab, std::span<const train::DatasetItem> items) {
  std::vector<graph::GraphSample> samples;
  samples.reserve(items.size());
  for (const auto& item : items) samples.push_back(inference_sample(item.ink, config.data));
  const auto preds = model::predict(params, config.model, samples, config.train.batch_size);
  std::vector<labels::LabelGraph> out;
  out.reserve(preds.size());
  for (const auto& p : preds) out.push_back(decode(p, vocab));
  return out;
}

EvaluatedSet evaluate_items(const tensor::ParameterStore<float>& params, const train::ExperimentConfig& config,
                            const labels::Vocabulary& vocab, std::span<const train::DatasetItem> items) {
  const auto prepared = train::prepare(items, config.data, vocab, false);
  if (prepared.samples.size() != items.size()) throw DataError("evaluate_items: expected one graph per expression");
  const auto preds = model::predict(params, config.model, prepared.samples, config.train.batch_size);

  EvaluatedSet out;
  std::vector<ExpressionRecord> records;
  for (std::size_t k = 0; k < items.size(); ++k) {
    const auto& gold_eslg = prepared.samples[k].eslg;
    const auto& gold = *items[k].labels;
    ExpressionRecord r;
    r.id = items[k].ink.id;
    r.strokes = gold.size();
    r.symbols = labels::segments(gold).size();
    const labels::Eslg predicted{preds[k].node_labels, preds[k].edge_labels, preds[k].direction};
    r.primitives = primitive_accuracy(predicted, gold_eslg);
    const auto& g = prepared.samples[k].graph;
    graph::Adjacency local(gold.size());
    for (std::size_t i = 0; i < gold.size(); ++i)
      for (std::size_t j = 0; j < gold.size(); ++j)
        if (g.adjacency(i + g.offset(), j + g.offset())) local.set(i, j);
    const auto conv = labels::to_eslg(gold, local, vocab);
    r.dropped_relations = conv.dropped_relations;
    r.gold_relations = positional_edges(gold);
    out.predicted.push_back(decode(preds[k], vocab));
    out.gold.push_back(gold);
    r.result = expression_metrics(out.predicted.back(), gold);
    records.push_back(std::move(r));
  }
  out.report = summarize(std::move(records));
  return out;
}

tensor::Tensor<double> export_attention(const tensor::ParameterStore<float>& params,
                                        const train::ExperimentConfig& config, const ink::InkExpression& ink) {
  return model::attention_matrix(params, config.model, inference_sample(ink, config.data));
}

std::string metrics_csv(const MetricsReport& report) {
  std::string out = "id,strokes,symbols,seg,sym,rel,stru,exp,node_acc,edge_acc,dropped_relations,gold_relations\n";
  for (const auto& r : report.expressions) {
    out += csv_field(r.id) + ',' + std::to_string(r.strokes) + ',' + std::to_string(r.symbols) + ',' +
           std::to_string(int(r.result.seg)) + ',' + std::to_string(int(r.result.sym)) + ',' +
           std::to_string(int(r.result.rel)) + ',' + std::to_string(int(r.result.stru)) + ',' +
           std::to_string(int(r.result.exp)) + ',' + fixed(r.primitives.node_acc()) + ',' +
           fixed(r.primitives.edge_acc()) + ',' + std::to_string(r.dropped_relations) + ',' +
           std::to_string(r.gold_relations) + '\n';
  }
  std::size_t strokes = 0, symbols = 0;
  for (const auto& r : report.expressions) {
    strokes += r.strokes;
    symbols += r.symbols;
  }
  out += "ALL," + std::to_string(strokes) + ',' + std::to_string(symbols) + ',' + fixed(report.seg_rate) + ',' +
         fixed(report.sym_rate) + ',' + fixed(report.rel_rate) + ',' + fixed(report.stru_rate) + ',' +
         fixed(report.exp_rate) + ',' + fixed(report.primitives.node_acc()) + ',' +
         fixed(report.primitives.edge_acc()) + ',' + std::to_string(report.dropped_relations) + ',' +
         std::to_string(report.gold_relations) + '\n';
  return out;
}

std::string length_csv(std::span<const LengthBucket> buckets) {
  std::string out = "length,count,correct,rate\n";
  for (const auto& b : buckets)
    out += std::to_string(b.length) + ',' + std::to_string(b.count) + ',' + std::to_string(b.correct) + ',' +
           fixed(b.rate()) + '\n';
  return out;
}

std::string confusion_json(const ConfusionTables& tables) {
  auto table = [](const std::map<std::string, ConfusionRow>& rows) {
    nlohmann::ordered_json t = nlohmann::ordered_json::object();
    for (const auto& [key, row] : rows) {
      nlohmann::ordered_json c = nlohmann::ordered_json::object();
      for (const auto& [pred, count] : row.confusions) c[pred] = count;
      t[key] = {{"occurrences", row.occurrences}, {"errors", row.errors}, {"confusions", c}};
    }
    return t;
  };
  nlohmann::ordered_json j;
  j["symbols"] = table(tables.symbols);
  j["pairs"] = table(tables.pairs);
  return j.dump(2) + '\n';
}

std::string matrix_csv(const tensor::Tensor<double>& matrix) {
  if (matrix.shape().size() != 2) throw ShapeError("matrix_csv: expected a rank-2 tensor");
  const std::size_t rows = matrix.shape()[0], cols = matrix.shape()[1];
  std::string out;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (j) out += ',';
      out += fixed(matrix.at(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace hmer::eval
