#include "hmer/model/parameters.hpp"

#include <cmath>

#include "hmer/error.hpp"

namespace hmer::model {

using tensor::Shape;

std::string readout_name(std::size_t stage, const char* head, const char* layer) {
  return "readout" + std::to_string(stage) + "." + head + "." + layer;
}

std::map<std::string, Shape> parameter_shapes(const ModelConfig& c) {
  c.validate();
  std::map<std::string, Shape> s;
  const std::size_t k = c.embed_kernel;
  std::size_t in = 2;
  for (std::size_t b = 0; b < c.embed_channels.size(); ++b) {
    const std::size_t out = c.embed_channels[b];
    const std::string p = "embed.block" + std::to_string(b) + ".";
    s[p + "depthwise.weight"] = {in, 1, k};
    s[p + "depthwise.bias"] = {in};
    s[p + "pointwise.weight"] = {out, in, 1};
    s[p + "pointwise.bias"] = {out};
    s[p + "shortcut.weight"] = {out, in, 1};
    in = out;
  }
  s["embed.project.weight"] = {in, c.hidden};
  s["embed.project.bias"] = {c.hidden};

  s["edge_embed.fc1.weight"] = {c.edge_input, c.edge_embed_hidden};
  s["edge_embed.fc1.bias"] = {c.edge_embed_hidden};
  s["edge_embed.fc2.weight"] = {c.edge_embed_hidden, c.hidden};
  s["edge_embed.fc2.bias"] = {c.hidden};

  for (std::size_t q = 0; q < c.layers; ++q) {
    const std::string p = "egat" + std::to_string(q) + ".";
    s[p + "w_h"] = {c.hidden, c.hidden};
    s[p + "w_b"] = {c.hidden, c.hidden};
    s[p + "attention"] = {3 * c.hidden, 1};
  }

  for (std::size_t stage = c.first_readout_stage(); stage <= c.layers; ++stage) {
    for (const char* head : {"node", "edge"}) {
      const std::size_t classes = static_cast<std::size_t>(std::string(head) == "node" ? c.node_classes : c.edge_classes);
      s[readout_name(stage, head, "fc1.weight")] = {2 * c.hidden, c.readout_hidden};
      s[readout_name(stage, head, "fc1.bias")] = {c.readout_hidden};
      s[readout_name(stage, head, "fc2.weight")] = {c.readout_hidden, classes};
      s[readout_name(stage, head, "fc2.bias")] = {classes};
    }
  }
  return s;
}

namespace {

std::uint64_t name_hash(const std::string& name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : name) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

template <typename T>
tensor::ParameterStore<T> init_parameters(const ModelConfig& config, std::uint64_t seed) {
  tensor::ParameterStore<T> params;
  for (const auto& [name, shape] : parameter_shapes(config)) {
    tensor::Tensor<T> t(shape);
    if (!ends_with(name, ".bias")) {
      double fan_in, fan_out;
      if (shape.size() == 3) {  // conv [out, in/groups, k]
        fan_in = static_cast<double>(shape[1] * shape[2]);
        fan_out = static_cast<double>(shape[0] * shape[2]) / (shape[1] == 1 ? static_cast<double>(shape[0]) : 1.0);
      } else {
        fan_in = static_cast<double>(shape[0]);
        fan_out = static_cast<double>(shape[1]);
      }
      const double bound = std::sqrt(6.0 / (fan_in + fan_out));
      std::uint64_t state = seed ^ name_hash(name);
      for (std::size_t i = 0; i < t.size(); ++i) {
        const double u = static_cast<double>(splitmix(state) >> 11) * 0x1.0p-53;
        t[i] = static_cast<T>((2.0 * u - 1.0) * bound);
      }
    }
    params.emplace(name, std::move(t));
  }
  return params;
}

template <typename T>
void check_parameters(const ModelConfig& config, const tensor::ParameterStore<T>& params) {
  const auto shapes = parameter_shapes(config);
  for (const auto& [name, shape] : shapes) {
    const auto it = params.find(name);
    if (it == params.end()) throw ArgumentError("missing parameter '" + name + "'");
    if (it->second.shape() != shape)
      throw ArgumentError("parameter '" + name + "' has shape " + tensor::to_string(it->second.shape()) + ", expected " +
                          tensor::to_string(shape));
  }
  for (const auto& [name, value] : params)
    if (!shapes.count(name)) throw ArgumentError("unexpected parameter '" + name + "'");
}

template tensor::ParameterStore<float> init_parameters<float>(const ModelConfig&, std::uint64_t);
template tensor::ParameterStore<double> init_parameters<double>(const ModelConfig&, std::uint64_t);
template void check_parameters<float>(const ModelConfig&, const tensor::ParameterStore<float>&);
template void check_parameters<double>(const ModelConfig&, const tensor::ParameterStore<double>&);

}  // namespace hmer::model
