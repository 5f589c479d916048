#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "hmer/model/config.hpp"
#include "hmer/tensor/optim.hpp"

namespace hmer::model {

/// Every learnable tensor the config calls for, by name:
///   embed.block{k}.{depthwise,pointwise,shortcut}.weight, *.bias
///   embed.project.weight/bias
///   edge_embed.fc{1,2}.weight/bias
///   egat{q}.w_h, egat{q}.w_b, egat{q}.attention
///   readout{s}.{node,edge}.fc{1,2}.weight/bias   (s = readout stage)
/// Linear weights are [in, out].
std::map<std::string, tensor::Shape> parameter_shapes(const ModelConfig& config);

/// Biases zero; everything else uniform in +-sqrt(6 / (fan_in + fan_out)).
/// Each tensor's values depend only on the seed and its name.
template <typename T>
tensor::ParameterStore<T> init_parameters(const ModelConfig& config, std::uint64_t seed);

/// Throws ArgumentError naming the first missing, extra, or misshapen tensor.
template <typename T>
void check_parameters(const ModelConfig& config, const tensor::ParameterStore<T>& params);

std::string readout_name(std::size_t stage, const char* head, const char* layer);

}  // namespace hmer::model
