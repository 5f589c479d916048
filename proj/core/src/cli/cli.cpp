#include "hmer/cli/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <vector>

#include "CLI11.hpp"
#include "hmer/error.hpp"
#include "hmer/eval/confusion.hpp"
#include "hmer/eval/reports.hpp"
#include "hmer/graph/graph_dump.hpp"
#include "hmer/ink/inkml.hpp"
#include "hmer/ink/synthetic.hpp"
#include "hmer/labels/vocabulary.hpp"
#include "hmer/train/trainer.hpp"

namespace hmer::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string data;
  std::string lg;
  std::string out;
  std::string checkpoint;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
  std::size_t count = 20;
  std::size_t max_symbols = 4;
  bool global = true;
  bool fc = false;
  bool no_aux = false;
  bool no_concat = false;
  bool no_residual = false;
  std::vector<CLI::Option*> global_opts;
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  f << text;
  if (!f) throw DataError("write failed: " + path.string());
}

std::string file_stem(const std::string& id, std::size_t k) {
  std::string s;
  for (char c : id) s += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
  if (s.empty() || s == "." || s == "..") s = "expr" + std::to_string(k);
  return s;
}

std::vector<train::DatasetItem> load_data(const Options& o) {
  const fs::path dir(o.data);
  const fs::path pack = fs::is_directory(dir) ? dir / "dataset.pack" : dir;
  if (!fs::exists(pack)) throw DataError("no dataset at " + pack.string());
  return train::read_dataset(pack);
}

train::ExperimentConfig experiment(const Options& o) {
  train::ExperimentConfig c = o.config.empty() ? train::ExperimentConfig{} : train::load_config(o.config);
  if (o.seed) c.train.seed = *o.seed;
  if (o.epochs) c.train.max_epochs = *o.epochs;
  for (const auto* opt : o.global_opts)
    if (opt->count()) c.data.global = o.global;
  if (o.fc) c.data.full_connect = true;
  if (o.no_aux) c.model.aux_readout = false;
  if (o.no_concat) c.model.message_concat = false;
  if (o.no_residual) c.model.residual = false;
  c.validate();
  return c;
}

train::LoadedModel model(const Options& o) {
  fs::path path = o.checkpoint;
  if (fs::is_directory(path)) path /= "checkpoint.bin";
  if (!fs::exists(path)) throw DataError("no checkpoint at " + path.string());
  return train::load_model(path);
}

int cmd_ingest(const Options& o, std::ostream& out) {
  const std::string lg = o.lg.empty() ? o.data : o.lg;
  const auto items = train::ingest_directory(o.data, lg);
  if (items.empty()) throw DataError("no .inkml files in " + o.data);
  fs::create_directories(o.out);
  train::write_dataset(fs::path(o.out) / "dataset.pack", items);
  std::size_t labeled = 0;
  for (const auto& item : items) labeled += item.labels.has_value();
  out << "ingested " << items.size() << " expressions (" << labeled << " labeled)\n";
  return kExitOk;
}

int cmd_synth(const Options& o, std::ostream& out) {
  const auto exprs = ink::generate_synthetic(o.seed.value_or(0), o.count, o.max_symbols);
  std::vector<train::DatasetItem> items;
  const fs::path root(o.out);
  for (std::size_t k = 0; k < exprs.size(); ++k) {
    const auto& e = exprs[k];
    const std::string stem = file_stem(e.ink.id, k);
    write_text(root / "inkml" / (stem + ".inkml"), ink::write_inkml(e.ink));
    write_text(root / "lg" / (stem + ".lg"), labels::serialize_lg(e.labels));
    items.push_back({e.ink, e.labels});
  }
  train::write_dataset(root / "dataset.pack", items);
  out << "wrote " << items.size() << " synthetic expressions\n";
  return kExitOk;
}

int cmd_build_graph(const Options& o, std::ostream& out) {
  const auto config = experiment(o);
  const auto items = load_data(o);
  for (std::size_t k = 0; k < items.size(); ++k) {
    const auto sample = eval::inference_sample(items[k].ink, config.data);
    write_text(fs::path(o.out) / "graphs" / (file_stem(items[k].ink.id, k) + ".json"),
               graph::dump_graph_json(sample.graph));
  }
  out << "built " << items.size() << " graphs\n";
  return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out) {
  const auto config = experiment(o);
  const auto& vocab = labels::Vocabulary::crohme();
  const auto items = load_data(o);
  const fs::path val_pack = fs::path(o.data) / "val.pack";
  const auto val_items = fs::is_directory(o.data) && fs::exists(val_pack) ? train::read_dataset(val_pack) : items;

  const auto train_set = train::prepare(items, config.data, vocab, config.train.split);
  const auto val_set = train::prepare(val_items, config.data, vocab, config.train.split);
  const auto result = train::fit(train_set.samples, val_set.samples, config,
                                 [&](const train::EpochRecord& r, const tensor::ParameterStore<float>&) {
                                   out << "epoch " << r.epoch << " train " << r.train_loss << " val " << r.val_loss
                                       << " node " << r.node_acc << " edge " << r.edge_acc << '\n';
                                   return true;
                                 });

  const fs::path root(o.out);
  write_text(root / "history.csv", train::history_csv(result.history));
  write_text(root / "config.txt", train::format_config(config));
  tensor::save_checkpoint(train::make_checkpoint(result.best, config, vocab, result.best_epoch),
                          root / "checkpoint.bin");
  tensor::save_checkpoint(train::make_checkpoint(result.last, config, vocab, result.history.size()),
                          root / "last.bin");
  out << "best epoch " << result.best_epoch << "; dropped relations " << train_set.dropped_relations << '\n';
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const auto m = model(o);
  const auto items = load_data(o);
  const auto set = eval::evaluate_items(m.params, m.config, m.vocab, items);
  const fs::path root(o.out);
  write_text(root / "metrics.csv", eval::metrics_csv(set.report));
  const auto& records = set.report.expressions;
  write_text(root / "length_strokes.csv",
             eval::length_csv(eval::length_breakdown(records, eval::LengthKey::strokes)));
  write_text(root / "length_symbols.csv",
             eval::length_csv(eval::length_breakdown(records, eval::LengthKey::symbols)));
  const auto& r = set.report;
  out << "node_acc " << r.primitives.node_acc() << " edge_acc " << r.primitives.edge_acc() << " seg " << r.seg_rate
      << " sym " << r.sym_rate << " rel " << r.rel_rate << " stru " << r.stru_rate << " exp " << r.exp_rate
      << " dropped " << r.dropped_relations << '/' << r.gold_relations << '\n';
  return kExitOk;
}

int cmd_infer(const Options& o, std::ostream& out) {
  const auto m = model(o);
  const auto items = load_data(o);
  const auto preds = eval::infer(m.params, m.config, m.vocab, items);
  for (std::size_t k = 0; k < items.size(); ++k)
    write_text(fs::path(o.out) / "pred" / (file_stem(items[k].ink.id, k) + ".lg"), labels::serialize_lg(preds[k]));
  out << "wrote " << preds.size() << " predictions\n";
  return kExitOk;
}

int cmd_attention(const Options& o, std::ostream& out) {
  const auto m = model(o);
  const auto items = load_data(o);
  for (std::size_t k = 0; k < items.size(); ++k)
    write_text(fs::path(o.out) / "attention" / (file_stem(items[k].ink.id, k) + ".csv"),
               eval::matrix_csv(eval::export_attention(m.params, m.config, items[k].ink)));
  out << "wrote " << items.size() << " attention matrices\n";
  return kExitOk;
}

int cmd_confusion(const Options& o, std::ostream& out) {
  const auto m = model(o);
  const auto items = load_data(o);
  const auto set = eval::evaluate_items(m.params, m.config, m.vocab, items);
  eval::ConfusionTables tables;
  for (std::size_t k = 0; k < set.gold.size(); ++k) eval::accumulate_confusion(tables, set.predicted[k], set.gold[k]);
  write_text(fs::path(o.out) / "confusion.json", eval::confusion_json(eval::errors_only(tables)));
  std::size_t errors = 0;
  for (const auto& [k, row] : tables.symbols) errors += row.errors;
  out << "symbol errors " << errors << '\n';
  return kExitOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stroke-graph handwritten math recognition", args.empty() ? "hmer" : args[0]};
  app.require_subcommand(1);
  Options o;

  auto add_config = [&](CLI::App* c) { c->add_option("--config", o.config, "Experiment config file")->check(CLI::ExistingFile); };
  auto add_model_flags = [&](CLI::App* c) {
    o.global_opts.push_back(c->add_flag("--global,!--local", o.global, "Add the master node (--local: local graph only)"));
    c->add_flag("--fc", o.fc, "Fully connected graph instead of line of sight");
    c->add_flag("--no-aux", o.no_aux, "Disable auxiliary readouts");
    c->add_flag("--no-concat", o.no_concat, "Disable message concatenation");
    c->add_flag("--no-residual", o.no_residual, "Disable residual connections");
  };
  auto need = [](CLI::App* c, const char* name, std::string& target, const char* help) {
    c->add_option(name, target, help)->required();
  };

  auto* ingest = app.add_subcommand("ingest", "Pack a directory of InkML (+ LG) files");
  need(ingest, "--data", o.data, "Directory of .inkml files");
  ingest->add_option("--lg", o.lg, "Directory of .lg files (default: --data)");
  need(ingest, "--out", o.out, "Output directory");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled set");
  need(synth, "--out", o.out, "Output directory");
  synth->add_option("--seed", o.seed, "Generator seed");
  synth->add_option("--count", o.count, "Number of expressions")->check(CLI::PositiveNumber);
  synth->add_option("--max-symbols", o.max_symbols, "Symbols per expression at most")->check(CLI::PositiveNumber);

  auto* build = app.add_subcommand("build-graph", "Dump modeled graphs as JSON");
  need(build, "--data", o.data, "Dataset directory or pack");
  need(build, "--out", o.out, "Output directory");
  add_config(build);
  add_model_flags(build);

  auto* train_cmd = app.add_subcommand("train", "Train a model");
  need(train_cmd, "--data", o.data, "Dataset directory (dataset.pack, optional val.pack)");
  need(train_cmd, "--out", o.out, "Output directory");
  add_config(train_cmd);
  add_model_flags(train_cmd);
  train_cmd->add_option("--seed", o.seed, "Training seed");
  train_cmd->add_option("--epochs", o.epochs, "Override max_epochs")->check(CLI::PositiveNumber);

  std::vector<std::pair<CLI::App*, int (*)(const Options&, std::ostream&)>> with_model;
  for (const auto& [name, help, fn] :
       {std::tuple{"eval", "Score a checkpoint on a labeled set", &cmd_eval},
        std::tuple{"infer", "Write predicted LG files", &cmd_infer},
        std::tuple{"attention", "Export last-layer attention matrices", &cmd_attention},
        std::tuple{"confusion", "Write symbol and symbol-pair confusion tables", &cmd_confusion}}) {
    auto* c = app.add_subcommand(name, help);
    need(c, "--checkpoint", o.checkpoint, "Checkpoint file or training output directory");
    need(c, "--data", o.data, "Dataset directory or pack");
    need(c, "--out", o.out, "Output directory");
    with_model.emplace_back(c, fn);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*ingest) return cmd_ingest(o, out);
    if (*synth) return cmd_synth(o, out);
    if (*build) return cmd_build_graph(o, out);
    if (*train_cmd) return cmd_train(o, out);
    for (const auto& [c, fn] : with_model)
      if (*c) return fn(o, out);
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace hmer::cli
