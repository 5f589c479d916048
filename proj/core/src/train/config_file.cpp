#include "hmer/train/config_file.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "hmer/error.hpp"

namespace hmer::train {

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw ArgumentError("train: learning_rate must be >= 0");
  if (batch_size == 0) throw ArgumentError("train: batch_size must be positive");
  if (!(loss.lambda1 >= 0.0 && loss.lambda1 <= 1.0)) throw ArgumentError("train: lambda1 must be in [0, 1]");
  if (!(loss.lambda2 >= 0.0)) throw ArgumentError("train: lambda2 must be >= 0");
  if (!(loss.gamma >= 0.0)) throw ArgumentError("train: gamma must be >= 0");
  if (max_epochs == 0) throw ArgumentError("train: max_epochs must be positive");
  if (patience == 0) throw ArgumentError("train: patience must be positive");
  if (!(decay > 0.0 && decay <= 1.0)) throw ArgumentError("train: decay must be in (0, 1]");
}

void ExperimentConfig::validate() const {
  model.validate();
  train.validate();
  data.validate();
  if (model.edge_input != data.edge_width())
    throw ArgumentError("model edge_input " + std::to_string(model.edge_input) + " does not match 5 * edge_samples = " +
                        std::to_string(data.edge_width()));
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

struct Field {
  std::function<void(std::string_view)> set;
  std::function<std::string()> get;
};

template <typename N>
N parse_number(std::string_view v) {
  N out{};
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) throw ArgumentError("not a number: '" + std::string(v) + "'");
  return out;
}

bool parse_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ArgumentError("not a boolean: '" + std::string(v) + "'");
}

std::string show(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <typename N>
Field number(N& slot) {
  return {[&slot](std::string_view v) { slot = parse_number<N>(v); },
          [&slot] {
            if constexpr (std::is_floating_point_v<N>) return show(slot);
            else return std::to_string(slot);
          }};
}

Field boolean(bool& slot) {
  return {[&slot](std::string_view v) { slot = parse_bool(v); }, [&slot] { return std::string(slot ? "true" : "false"); }};
}

Field size_list(std::vector<std::size_t>& slot) {
  return {[&slot](std::string_view v) {
            slot.clear();
            std::size_t start = 0;
            for (;;) {
              const auto comma = v.find(',', start);
              slot.push_back(parse_number<std::size_t>(trim(v.substr(start, comma - start))));
              if (comma == std::string_view::npos) break;
              start = comma + 1;
            }
          },
          [&slot] {
            std::string s;
            for (std::size_t i = 0; i < slot.size(); ++i) s += (i ? "," : "") + std::to_string(slot[i]);
            return s;
          }};
}

using Table = std::map<std::string, std::map<std::string, Field>>;

Table fields(ExperimentConfig& c) {
  Table t;
  auto& m = t["model"];
  m["layers"] = number(c.model.layers);
  m["hidden"] = number(c.model.hidden);
  m["dropout"] = number(c.model.dropout);
  m["aux"] = boolean(c.model.aux_readout);
  m["concat"] = boolean(c.model.message_concat);
  m["residual"] = boolean(c.model.residual);
  m["attention_activation"] = boolean(c.model.attention_activation);
  m["attention_slope"] = number(c.model.attention_slope);
  m["embed_channels"] = size_list(c.model.embed_channels);
  m["embed_kernel"] = number(c.model.embed_kernel);
  m["edge_embed_hidden"] = number(c.model.edge_embed_hidden);
  m["readout_hidden"] = number(c.model.readout_hidden);
  auto& tr = t["train"];
  tr["learning_rate"] = number(c.train.learning_rate);
  tr["batch_size"] = number(c.train.batch_size);
  tr["lambda1"] = number(c.train.loss.lambda1);
  tr["lambda2"] = number(c.train.loss.lambda2);
  tr["gamma"] = number(c.train.loss.gamma);
  tr["max_epochs"] = number(c.train.max_epochs);
  tr["patience"] = number(c.train.patience);
  tr["decay"] = number(c.train.decay);
  tr["seed"] = number(c.train.seed);
  tr["split"] = boolean(c.train.split);
  auto& d = t["data"];
  d["node_samples"] = number(c.data.node_samples);
  d["edge_samples"] = number(c.data.edge_samples);
  d["max_strokes"] = number(c.data.max_strokes);
  d["global"] = boolean(c.data.global);
  d["full_connect"] = boolean(c.data.full_connect);
  return t;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  ExperimentConfig c = std::move(base);
  Table table = fields(c);
  std::map<std::string, Field>* section = nullptr;
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(where + "unterminated section header", line_no);
      const std::string name(trim(line.substr(1, line.size() - 2)));
      const auto it = table.find(name);
      if (it == table.end()) throw ParseError(where + "unknown section [" + name + "]", line_no);
      section = &it->second;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(where + "expected key = value", line_no);
    if (!section) throw ParseError(where + "key outside of a section", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    const auto it = section->find(key);
    if (it == section->end()) throw ParseError(where + "unknown key '" + key + "'", line_no);
    try {
      it->second.set(value);
    } catch (const ArgumentError& e) {
      throw ParseError(where + key + ": " + e.what(), line_no);
    }
  }
  c.model.edge_input = c.data.edge_width();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

std::string format_config(const ExperimentConfig& config) {
  ExperimentConfig copy = config;
  Table table = fields(copy);
  std::string out;
  for (const char* name : {"model", "train", "data"}) {
    out += std::string(out.empty() ? "" : "\n") + "[" + name + "]\n";
    for (const auto& [key, field] : table[name]) out += key + " = " + field.get() + "\n";
  }
  return out;
}

}  // namespace hmer::train
