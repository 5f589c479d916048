#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace hmer::ink {

/// Pen position in device units. The y axis points down, as on a tablet.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// One pen-down..pen-up trajectory. `index` is its writing-order position.
struct Stroke {
  std::vector<Point> points;
  std::size_t index = 0;

  friend bool operator==(const Stroke&, const Stroke&) = default;
};

struct InkExpression {
  std::string id;
  std::vector<Stroke> strokes;
  std::optional<std::string> annotation;

  friend bool operator==(const InkExpression&, const InkExpression&) = default;
};

/// A stroke after resampling: a fixed number of samples with equal spacing
/// between consecutive samples.
struct ResampledStroke {
  std::vector<Point> points;

  std::size_t size() const noexcept { return points.size(); }
  friend bool operator==(const ResampledStroke&, const ResampledStroke&) = default;
};

}  // namespace hmer::ink
