#include "hmer/model/config.hpp"

#include "hmer/error.hpp"
#include "json.hpp"

namespace hmer::model {

void ModelConfig::validate() const {
  if (layers == 0) throw ArgumentError("model: layers must be at least 1");
  if (hidden == 0) throw ArgumentError("model: hidden must be positive");
  if (message_concat && hidden % 2 != 0) throw ArgumentError("model: hidden must be even with message concat");
  if (node_classes < 1 || edge_classes < 1) throw ArgumentError("model: class counts must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ArgumentError("model: dropout must be in [0, 1)");
  if (embed_channels.empty()) throw ArgumentError("model: embed_channels is empty");
  for (auto c : embed_channels)
    if (c == 0) throw ArgumentError("model: embed channel width must be positive");
  if (embed_kernel % 2 == 0) throw ArgumentError("model: embed_kernel must be odd");
  if (edge_embed_hidden == 0 || readout_hidden == 0 || edge_input == 0)
    throw ArgumentError("model: layer widths must be positive");
}

std::string to_json(const ModelConfig& c) {
  nlohmann::ordered_json j;
  j["layers"] = c.layers;
  j["hidden"] = c.hidden;
  j["node_classes"] = c.node_classes;
  j["edge_classes"] = c.edge_classes;
  j["dropout"] = c.dropout;
  j["aux_readout"] = c.aux_readout;
  j["message_concat"] = c.message_concat;
  j["residual"] = c.residual;
  j["attention_activation"] = c.attention_activation;
  j["attention_slope"] = c.attention_slope;
  j["embed_channels"] = c.embed_channels;
  j["embed_kernel"] = c.embed_kernel;
  j["edge_embed_hidden"] = c.edge_embed_hidden;
  j["readout_hidden"] = c.readout_hidden;
  j["edge_input"] = c.edge_input;
  return j.dump();
}

ModelConfig model_config_from_json(const std::string& text) {
  ModelConfig c;
  try {
    const auto j = nlohmann::json::parse(text);
    c.layers = j.at("layers");
    c.hidden = j.at("hidden");
    c.node_classes = j.at("node_classes");
    c.edge_classes = j.at("edge_classes");
    c.dropout = j.at("dropout");
    c.aux_readout = j.at("aux_readout");
    c.message_concat = j.at("message_concat");
    c.residual = j.at("residual");
    c.attention_activation = j.at("attention_activation");
    c.attention_slope = j.at("attention_slope");
    c.embed_channels = j.at("embed_channels").get<std::vector<std::size_t>>();
    c.embed_kernel = j.at("embed_kernel");
    c.edge_embed_hidden = j.at("edge_embed_hidden");
    c.readout_hidden = j.at("readout_hidden");
    c.edge_input = j.at("edge_input");
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad model config JSON: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace hmer::model
