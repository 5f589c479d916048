#include "hmer/graph/frpt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hmer/error.hpp"

namespace hmer::graph {

std::size_t downsample_index(std::size_t k, std::size_t count, std::size_t size) {
  if (count == 1) return (size - 1) / 2;
  return static_cast<std::size_t>(
      std::llround(static_cast<double>(k) * static_cast<double>(size - 1) / static_cast<double>(count - 1)));
}

std::vector<double> frpt_features(const ink::ResampledStroke& src, const ink::ResampledStroke& dst, std::size_t count) {
  if (count == 0) throw ArgumentError("frpt_features: sample count must be at least 1");
  if (src.points.empty() || dst.points.empty()) throw ArgumentError("frpt_features: empty stroke");

  double ox = 0.0, oy = 0.0;
  for (const auto& p : src.points) {
    ox += p.x;
    oy += p.y;
  }
  ox /= static_cast<double>(src.size());
  oy /= static_cast<double>(src.size());

  constexpr double kDirs[4][2] = {{1, 0}, {-1, 0}, {0, -1}, {0, 1}};
  std::vector<double> out(5 * count, 0.0);
  for (std::size_t k = 0; k < count; ++k) {
    const auto& p = dst.points[downsample_index(k, count, dst.size())];
    const double vx = p.x - ox, vy = p.y - oy;
    const double norm = std::hypot(vx, vy);
    if (norm == 0.0) continue;
    for (int d = 0; d < 4; ++d) {
      const double cosine = std::clamp((vx * kDirs[d][0] + vy * kDirs[d][1]) / norm, -1.0, 1.0);
      out[d * count + k] = std::max(0.0, 1.0 - 2.0 / std::numbers::pi * std::acos(cosine));
    }
    out[4 * count + k] = norm;
  }
  return out;
}

}  // namespace hmer::graph
