#include "hmer/graph/graph_dump.hpp"

#include <bit>
#include <cstdint>
#include <cstring>

#include "json.hpp"

namespace hmer::graph {
namespace {

std::string base64(const std::vector<std::uint8_t>& bytes) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  for (std::size_t i = 0; i < bytes.size(); i += 3) {
    const std::uint32_t b0 = bytes[i];
    const std::uint32_t b1 = i + 1 < bytes.size() ? bytes[i + 1] : 0;
    const std::uint32_t b2 = i + 2 < bytes.size() ? bytes[i + 2] : 0;
    const std::uint32_t triple = (b0 << 16) | (b1 << 8) | b2;
    out += kAlphabet[(triple >> 18) & 63];
    out += kAlphabet[(triple >> 12) & 63];
    out += i + 1 < bytes.size() ? kAlphabet[(triple >> 6) & 63] : '=';
    out += i + 2 < bytes.size() ? kAlphabet[triple & 63] : '=';
  }
  return out;
}

std::string float32_blob(const tensor::Tensor<double>& t) {
  std::vector<std::uint8_t> bytes(t.size() * 4);
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(t[i]));
    for (int b = 0; b < 4; ++b) bytes[i * 4 + b] = static_cast<std::uint8_t>(bits >> (8 * b));
  }
  return base64(bytes);
}

}  // namespace

std::string dump_graph_json(const ModeledGraph& graph) {
  nlohmann::ordered_json j;
  j["n"] = graph.n;
  j["has_master"] = graph.has_master;
  j["adjacency"] = graph.adjacency.bits();
  j["node_mask"] = graph.node_mask;
  j["edge_mask"] = graph.edge_mask;
  j["stroke_ids"] = graph.stroke_ids;
  j["node_shape"] = graph.node_features.shape();
  j["edge_shape"] = graph.edge_features.shape();
  j["node_features"] = float32_blob(graph.node_features);
  j["edge_features"] = float32_blob(graph.edge_features);
  return j.dump();
}

}  // namespace hmer::graph
