#include "hmer/train/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <numeric>

#include "hmer/error.hpp"
#include "hmer/model/egat.hpp"
#include "hmer/model/parameters.hpp"
#include "hmer/train/losses.hpp"
#include "json.hpp"

namespace hmer::train {
namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Fisher-Yates driven by splitmix, so the order does not depend on the
// standard library's distributions.
void shuffle(std::vector<std::size_t>& order, std::uint64_t seed) {
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(mix(seed, i) % i);
    std::swap(order[i - 1], order[j]);
  }
}

template <typename T>
int argmax_row(const tensor::Tensor<T>& logits, std::size_t row) {
  const std::size_t width = logits.dim(1);
  const T* r = logits.data() + row * width;
  return static_cast<int>(std::max_element(r, r + width) - r);
}

std::string number(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 8);
  return std::string(buf, end);
}

}  // namespace

Evaluation evaluate(const tensor::ParameterStore<float>& params, const ExperimentConfig& config,
                    std::span<const graph::GraphSample> samples) {
  if (samples.empty()) throw DataError("evaluate: empty dataset");
  const std::size_t step = config.train.batch_size;
  double loss_sum = 0.0;
  std::size_t batches = 0, nodes = 0, nodes_ok = 0, edges = 0, edges_ok = 0;
  for (std::size_t start = 0; start < samples.size(); start += step) {
    const auto chunk = samples.subspan(start, std::min(step, samples.size() - start));
    const model::Batch batch = model::make_batch(chunk);
    tensor::Tape<float> tape;
    const auto bound = model::bind_parameters(tape, params, false);
    const auto out = model::forward(tape, bound, batch, config.model, false, 0);
    const auto loss = batch_loss(tape, out, batch, config.train.loss);
    loss_sum += static_cast<double>(tape.value(loss.total)[0]);
    ++batches;
    const auto& nl = tape.value(out.final_nodes());
    for (std::size_t r = 0; r < batch.label_nodes.size(); ++r) {
      if (!batch.node_mask[r]) continue;
      ++nodes;
      nodes_ok += argmax_row(nl, r) == batch.node_labels[r];
    }
    const auto& el = tape.value(out.final_edges());
    for (std::size_t r = 0; r < batch.label_edges.size(); ++r) {
      if (!batch.edge_mask[r]) continue;
      ++edges;
      edges_ok += argmax_row(el, r) == batch.edge_labels[r];
    }
  }
  Evaluation e;
  e.loss = loss_sum / static_cast<double>(batches);
  e.node_acc = nodes ? static_cast<double>(nodes_ok) / static_cast<double>(nodes) : 1.0;
  e.edge_acc = edges ? static_cast<double>(edges_ok) / static_cast<double>(edges) : 1.0;
  return e;
}

FitResult fit(std::span<const graph::GraphSample> train_set, std::span<const graph::GraphSample> val_set,
              const ExperimentConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.empty()) throw DataError("fit: empty training set");
  if (val_set.empty()) throw DataError("fit: empty validation set");
  const auto& tc = config.train;

  FitResult result;
  tensor::ParameterStore<float> params = model::init_parameters<float>(config.model, tc.seed);
  tensor::Adam<float> adam(tensor::AdamOptions{tc.learning_rate, 0.9, 0.999, 1e-8});
  tensor::PlateauScheduler scheduler(tc.learning_rate, {tc.decay, tc.patience});
  double best_val = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> order(train_set.size());
  std::uint64_t step = 0;
  for (std::size_t epoch = 1; epoch <= tc.max_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(order, mix(tc.seed, 0x5EED0000 + epoch));
    const double lr = adam.learning_rate();

    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
      std::vector<const graph::GraphSample*> chunk;
      for (std::size_t k = start; k < std::min(order.size(), start + tc.batch_size); ++k)
        chunk.push_back(&train_set[order[k]]);
      const model::Batch batch = model::make_batch(chunk);
      tensor::Tape<float> tape;
      const auto bound = model::bind_parameters(tape, params, true);
      const auto out = model::forward(tape, bound, batch, config.model, true, mix(tc.seed, ++step));
      const auto loss = batch_loss(tape, out, batch, tc.loss);
      tape.backward(loss.total);
      tensor::ParameterStore<float> grads;
      for (const auto& [name, var] : bound) grads.emplace(name, tape.grad(var));
      adam.step(params, grads);
      loss_sum += static_cast<double>(tape.value(loss.total)[0]);
      ++batches;
    }

    const Evaluation val = evaluate(params, config, val_set);
    EpochRecord rec{epoch, loss_sum / static_cast<double>(batches), val.loss, val.node_acc, val.edge_acc, lr};
    result.history.push_back(rec);
    if (val.loss < best_val) {
      best_val = val.loss;
      result.best = params;
      result.best_epoch = epoch;
    }
    adam.set_learning_rate(scheduler.step(val.loss));
    if (on_epoch && !on_epoch(rec, params)) break;
  }
  result.last = std::move(params);
  return result;
}

std::string history_csv(std::span<const EpochRecord> history) {
  std::string out = "epoch,train_loss,val_loss,node_acc,edge_acc,lr\n";
  for (const auto& r : history) {
    char lr[64];
    const auto [end, ec] = std::to_chars(lr, lr + sizeof lr, r.lr, std::chars_format::scientific, 6);
    out += std::to_string(r.epoch) + "," + number(r.train_loss) + "," + number(r.val_loss) + "," + number(r.node_acc) +
           "," + number(r.edge_acc) + "," + std::string(lr, end) + "\n";
  }
  return out;
}

tensor::Checkpoint make_checkpoint(const tensor::ParameterStore<float>& params, const ExperimentConfig& config,
                                   const labels::Vocabulary& vocab, std::size_t epoch) {
  nlohmann::ordered_json meta;
  meta["config"] = format_config(config);
  meta["model"] = nlohmann::json::parse(model::to_json(config.model));
  meta["vocabulary"] = {{"symbols", vocab.symbols()}, {"relations", vocab.relations()}};
  meta["adam"] = {{"beta1", 0.9}, {"beta2", 0.999}, {"epsilon", 1e-8}};
  meta["epoch"] = epoch;
  tensor::Checkpoint ck;
  ck.metadata_json = meta.dump();
  ck.add_parameters(params);
  return ck;
}

LoadedModel load_model(const std::filesystem::path& path) {
  const tensor::Checkpoint ck = tensor::load_checkpoint(path);
  std::string config_text;
  std::vector<std::string> symbols, relations;
  try {
    const auto meta = nlohmann::json::parse(ck.metadata_json);
    config_text = meta.at("config").get<std::string>();
    symbols = meta.at("vocabulary").at("symbols").get<std::vector<std::string>>();
    relations = meta.at("vocabulary").at("relations").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": checkpoint metadata is incomplete: " + e.what());
  }
  LoadedModel m{ck.parameters<float>(), parse_config(config_text), labels::Vocabulary(symbols, relations)};
  m.config.model.node_classes = m.vocab.symbol_count();
  m.config.model.edge_classes = m.vocab.edge_class_count();
  model::check_parameters(m.config.model, m.params);
  return m;
}

}  // namespace hmer::train
