#pragma once

#include <span>
#include <vector>

#include "hmer/ink/types.hpp"

namespace hmer::graph {

using ink::Point;

/// Convex hull by monotone chain, counter-clockwise in a y-up frame, without
/// repeated or collinear vertices. Degenerate inputs give 1 or 2 vertices.
std::vector<Point> convex_hull(std::span<const Point> points);

/// Area centroid of a hull with positive area, else the mean of its vertices.
Point hull_centroid(std::span<const Point> hull);

/// True when the segment a-b passes through the open interior of `hull`.
/// Touching the boundary does not count; hulls without area never block.
bool segment_crosses_interior(std::span<const Point> hull, Point a, Point b);

}  // namespace hmer::graph
