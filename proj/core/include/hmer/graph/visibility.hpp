#pragma once

#include <cstddef>
#include <span>

#include "hmer/graph/adjacency.hpp"
#include "hmer/ink/types.hpp"

namespace hmer::graph {

/// Line-of-sight adjacency over stroke convex hulls. Stroke j is visible from
/// stroke i when at least one segment from the centroid of hull(i) to a
/// vertex of hull(j) avoids the interior of every other stroke's hull. The
/// result is symmetrized (i sees j or j sees i) and has a zero diagonal.
Adjacency line_of_sight(std::span<const ink::ResampledStroke> strokes);

/// Adds (i, i+1) and (i+1, i) for every consecutive writing-order pair.
Adjacency add_temporal_edges(const Adjacency& adjacency);

/// All off-diagonal entries set (full-connect ablation).
Adjacency full_connect(std::size_t n);

}  // namespace hmer::graph
