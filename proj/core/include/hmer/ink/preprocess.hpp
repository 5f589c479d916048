#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hmer/ink/types.hpp"

namespace hmer::ink {

/// Resamples a stroke to `count` points with equal straight-line spacing
/// between consecutive samples. The first and last samples are the stroke's
/// endpoints; sample k+1 is where the pen first leaves the circle of radius
/// `spacing` around sample k, and `spacing` is solved for by bisection.
/// On a straight stroke this is uniform arc-length sampling, and resampling
/// an already resampled stroke reproduces it.
///
/// Single-point and zero-length strokes yield `count` copies of the point.
/// Throws ArgumentError if count < 2 or the stroke is empty.
ResampledStroke resample_stroke(std::span<const Point> points, std::size_t count);

inline ResampledStroke resample_stroke(const Stroke& stroke, std::size_t count) {
  return resample_stroke(stroke.points, count);
}

/// Translation and scale applied by normalize_expression: p' = (p - center) * scale.
struct Normalization {
  Point center;
  double scale = 1.0;
};

/// Center = mean of all points; scale = 1 / mean bounding-box diagonal over
/// strokes (zero-diagonal strokes count as 0), or 1 when every diagonal is 0.
Normalization normalization_for(std::span<const ResampledStroke> strokes);

std::vector<ResampledStroke> normalize_expression(std::span<const ResampledStroke> strokes);
std::vector<Stroke> normalize_expression(std::span<const Stroke> strokes);

/// resample_stroke on every stroke, then normalize_expression.
std::vector<ResampledStroke> preprocess(const InkExpression& expression, std::size_t count);

}  // namespace hmer::ink
