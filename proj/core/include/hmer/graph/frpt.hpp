#pragma once

#include <cstddef>
#include <vector>

#include "hmer/ink/types.hpp"

namespace hmer::graph {

/// Fuzzy relative-position features of `dst` seen from the centroid O of
/// `src`. dst is reduced to `count` samples P_k (evenly spaced indices); for
/// each direction e in right, left, up, down (y grows downward on the page)
///   theta_k = max(0, 1 - (2/pi) * acos(cos angle(OP_k, e)))
/// and D_k = |OP_k|. Layout: [theta_right x count, theta_left, theta_up,
/// theta_down, D]. Samples coinciding with O get all zeros.
std::vector<double> frpt_features(const ink::ResampledStroke& src, const ink::ResampledStroke& dst, std::size_t count);

/// Index of the k-th of `count` samples picked from `size` points.
std::size_t downsample_index(std::size_t k, std::size_t count, std::size_t size);

}  // namespace hmer::graph
