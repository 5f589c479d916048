#include "hmer/graph/visibility.hpp"

#include <vector>

#include "hmer/graph/geometry.hpp"

namespace hmer::graph {

Adjacency line_of_sight(std::span<const ink::ResampledStroke> strokes) {
  const std::size_t n = strokes.size();
  std::vector<std::vector<Point>> hulls;
  std::vector<Point> centroids;
  hulls.reserve(n);
  for (const auto& s : strokes) {
    hulls.push_back(convex_hull(s.points));
    centroids.push_back(hull_centroid(hulls.back()));
  }

  Adjacency visible(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || visible(i, j)) continue;
      for (const Point& v : hulls[j]) {
        bool blocked = false;
        for (std::size_t k = 0; k < n && !blocked; ++k)
          if (k != i && k != j) blocked = segment_crosses_interior(hulls[k], centroids[i], v);
        if (!blocked) {
          visible.set_symmetric(i, j);
          break;
        }
      }
    }
  return visible;
}

Adjacency add_temporal_edges(const Adjacency& adjacency) {
  Adjacency out = adjacency;
  for (std::size_t i = 0; i + 1 < out.size(); ++i) out.set_symmetric(i, i + 1);
  return out;
}

Adjacency full_connect(std::size_t n) {
  Adjacency out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) out.set(i, j);
  return out;
}

}  // namespace hmer::graph
