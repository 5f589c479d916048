#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "hmer/error.hpp"
#include "hmer/ink/synthetic.hpp"
#include "hmer/model/batch.hpp"
#include "hmer/model/parameters.hpp"
#include "hmer/train/config_file.hpp"
#include "hmer/train/dataset.hpp"
#include "hmer/train/losses.hpp"
#include "hmer/train/trainer.hpp"
#include "model_support.hpp"

using namespace hmer;
using namespace hmer::train;
using tensor::Tape;
using tensor::Tensor;

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("hmer_train_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentConfig tiny_experiment() {
  ExperimentConfig c;
  c.data = hmer::testing::small_graph_config();
  c.model = hmer::testing::toy_model(16, 2);
  c.model.node_classes = 101;
  c.model.edge_classes = 14;
  c.train.batch_size = 4;
  c.train.max_epochs = 3;
  c.train.learning_rate = 0.003;
  return c;
}

std::vector<DatasetItem> synthetic_items(std::uint64_t seed, std::size_t count) {
  std::vector<DatasetItem> items;
  for (auto& e : ink::generate_synthetic(seed, count, 5)) items.push_back({e.ink, e.labels});
  return items;
}

}  // namespace

TEST(Losses, CrossEntropyOnKnownLogits) {
  Tape<double> tape;
  Var logits = tape.leaf(Tensor<double>({2, 3}, {0, 0, 0, 1, 2, 3}));
  const std::vector<int> labels{1, 2};
  const std::vector<std::uint8_t> mask{1, 1};
  const double want = (std::log(3.0) + (std::log(std::exp(1) + std::exp(2) + std::exp(3)) - 3)) / 2;
  EXPECT_NEAR(tape.value(node_loss(tape, logits, labels, mask))[0], want, 1e-12);
  const std::vector<std::uint8_t> half{0, 1};
  EXPECT_NEAR(tape.value(node_loss(tape, logits, labels, half))[0], want * 2 - std::log(3.0), 1e-12);
}

TEST(Losses, FocalReducesToCrossEntropyAtGammaZero) {
  Tape<double> tape;
  Var logits = tape.leaf(Tensor<double>({2, 3}, {0.5, -1, 2, 1, 0, 3}));
  const std::vector<int> labels{0, 2};
  const std::vector<std::uint8_t> mask{1, 1};
  EXPECT_NEAR(tape.value(edge_loss(tape, logits, labels, mask, 0.0))[0],
              tape.value(node_loss(tape, logits, labels, mask))[0], 1e-12);
  // gamma > 0 down-weights: each term shrinks by (1 - p_t)^gamma.
  EXPECT_LT(tape.value(edge_loss(tape, logits, labels, mask, 1.5))[0],
            tape.value(node_loss(tape, logits, labels, mask))[0]);
}

TEST(Losses, TotalCombination) {
  const std::vector<std::pair<double, double>> stages{{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}};
  LossWeights w;
  const double final_stage = 0.5 * 5 + 0.5 * 6;
  const double aux = 0.3 * (0.5 * 1 + 0.5 * 2) + 0.3 * (0.5 * 3 + 0.5 * 4);
  EXPECT_DOUBLE_EQ(total_loss(stages, w), final_stage + aux);
}

TEST(Config, ParseAndFormatRoundTrip) {
  const auto c = parse_config(
      "# experiment\n"
      "[model]\nlayers = 3\nhidden = 64\nembed_channels = 8, 16\nconcat = false\n"
      "[train]\nlearning_rate = 0.001 ; inline comment\nseed = 42\n"
      "[data]\nedge_samples = 4\nglobal = false\n");
  EXPECT_EQ(c.model.layers, 3u);
  EXPECT_EQ(c.model.embed_channels, (std::vector<std::size_t>{8, 16}));
  EXPECT_FALSE(c.model.message_concat);
  EXPECT_EQ(c.train.seed, 42u);
  EXPECT_DOUBLE_EQ(c.train.learning_rate, 0.001);
  EXPECT_EQ(c.model.edge_input, 20u);
  EXPECT_FALSE(c.data.global);
  const auto again = parse_config(format_config(c));
  EXPECT_EQ(format_config(again), format_config(c));
  EXPECT_EQ(again.model, c.model);
}

TEST(Config, Errors) {
  try {
    parse_config("[model]\nlayers = 2\nbogus = 1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 3u);
  }
  EXPECT_THROW(parse_config("[model]\nlayers = x\n"), ParseError);
  EXPECT_THROW(parse_config("layers = 2\n"), ParseError);
  EXPECT_THROW(parse_config("[train]\nbatch_size = 0\n"), Error);
}

TEST(Config, Defaults) {
  const ExperimentConfig c;
  EXPECT_DOUBLE_EQ(c.train.learning_rate, 0.00027);
  EXPECT_EQ(c.train.batch_size, 32u);
  EXPECT_DOUBLE_EQ(c.train.loss.lambda1, 0.5);
  EXPECT_DOUBLE_EQ(c.train.loss.lambda2, 0.3);
  EXPECT_DOUBLE_EQ(c.train.loss.gamma, 1.5);
  EXPECT_EQ(c.model.layers, 5u);
  EXPECT_EQ(c.model.hidden, 512u);
  EXPECT_EQ(c.data.node_samples, 150u);
  EXPECT_EQ(c.data.edge_samples, 10u);
  EXPECT_EQ(c.data.max_strokes, 16u);
}

TEST(Dataset, PackRoundTrip) {
  auto items = synthetic_items(4, 12);
  items[3].labels.reset();
  const auto dir = scratch("pack");
  write_dataset(dir / "d.pack", items);
  EXPECT_EQ(read_dataset(dir / "d.pack"), items);

  std::ofstream(dir / "bad.pack") << "NOTAPACK";
  EXPECT_THROW(read_dataset(dir / "bad.pack"), DataError);
}

TEST(Dataset, PrepareSplitsAndMasks) {
  const auto items = synthetic_items(9, 10);
  const auto c = tiny_experiment();
  const auto& vocab = labels::Vocabulary::crohme();
  const auto full = prepare(items, c.data, vocab, false);
  EXPECT_EQ(full.samples.size(), items.size());
  const auto split = prepare(items, c.data, vocab, true);
  EXPECT_GE(split.samples.size(), items.size());
  for (std::size_t k = 0; k < split.samples.size(); ++k) EXPECT_LT(split.source[k], items.size());
  auto unlabeled = items;
  unlabeled[0].labels.reset();
  EXPECT_THROW(prepare(unlabeled, c.data, vocab, false), DataError);
}

TEST(Trainer, DeterministicHistoryAndParameters) {
  const auto c = tiny_experiment();
  const auto& vocab = labels::Vocabulary::crohme();
  const auto set = prepare(synthetic_items(2, 6), c.data, vocab, true);
  const auto a = fit(set.samples, set.samples, c);
  const auto b = fit(set.samples, set.samples, c);
  EXPECT_EQ(a.history, b.history);
  EXPECT_EQ(a.best, b.best);
  EXPECT_EQ(a.history.size(), 3u);
  EXPECT_LT(a.history.back().train_loss, a.history.front().train_loss);
  const auto csv = history_csv(a.history);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "epoch,train_loss,val_loss,node_acc,edge_acc,lr");
  EXPECT_NE(csv.find("3.000000e-03"), std::string::npos);
}

TEST(Trainer, EarlyStopCallback) {
  const auto c = tiny_experiment();
  const auto set = prepare(synthetic_items(2, 4), c.data, labels::Vocabulary::crohme(), true);
  const auto r = fit(set.samples, set.samples, c, [](const EpochRecord& e, const auto&) { return e.epoch < 2; });
  EXPECT_EQ(r.history.size(), 2u);
  EXPECT_THROW(fit({}, set.samples, c), DataError);
}

TEST(Trainer, CheckpointLoadsBack) {
  const auto c = tiny_experiment();
  const auto& vocab = labels::Vocabulary::crohme();
  const auto params = model::init_parameters<float>(c.model, 3);
  const auto dir = scratch("ckpt");
  tensor::save_checkpoint(make_checkpoint(params, c, vocab, 7), dir / "m.bin");
  const auto m = load_model(dir / "m.bin");
  EXPECT_EQ(m.params, params);
  EXPECT_EQ(m.config.model, c.model);
  EXPECT_EQ(format_config(m.config), format_config(c));
  EXPECT_EQ(m.vocab, vocab);
}
