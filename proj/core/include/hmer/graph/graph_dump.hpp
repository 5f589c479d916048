#pragma once

#include <string>

#include "hmer/graph/modeled_graph.hpp"

namespace hmer::graph {

/// JSON debug dump: n, has_master, adjacency (row-major 0/1), masks, feature
/// shapes, and features as base64 of little-endian float32 values.
std::string dump_graph_json(const ModeledGraph& graph);

}  // namespace hmer::graph
