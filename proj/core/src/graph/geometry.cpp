#include "hmer/graph/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace hmer::graph {
namespace {

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

double signed_area2(std::span<const Point> hull) {
  double area2 = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point& p = hull[i];
    const Point& q = hull[(i + 1) % hull.size()];
    area2 += p.x * q.y - q.x * p.y;
  }
  return area2;
}

}  // namespace

std::vector<Point> convex_hull(std::span<const Point> points) {
  std::vector<Point> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;

  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Point& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

Point hull_centroid(std::span<const Point> hull) {
  if (hull.empty()) return {};
  const double area2 = hull.size() >= 3 ? signed_area2(hull) : 0.0;
  double scale = 0.0;
  for (const Point& p : hull) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
  if (std::abs(area2) > 1e-12 * std::max(scale * scale, 1e-300)) {
    double cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const Point& p = hull[i];
      const Point& q = hull[(i + 1) % hull.size()];
      const double w = p.x * q.y - q.x * p.y;
      cx += (p.x + q.x) * w;
      cy += (p.y + q.y) * w;
    }
    return {cx / (3.0 * area2), cy / (3.0 * area2)};
  }
  double sx = 0.0, sy = 0.0;
  for (const Point& p : hull) {
    sx += p.x;
    sy += p.y;
  }
  return {sx / static_cast<double>(hull.size()), sy / static_cast<double>(hull.size())};
}

bool segment_crosses_interior(std::span<const Point> hull, Point a, Point b) {
  if (hull.size() < 3) return false;
  double extent = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point& p = hull[i];
    const Point& q = hull[(i + 1) % hull.size()];
    extent = std::max(extent, std::hypot(q.x - p.x, q.y - p.y));
  }
  if (std::abs(signed_area2(hull)) <= 1e-12 * extent * extent) return false;

  // Cyrus-Beck clip of a + t(b - a), t in [0, 1], against every edge's
  // inner half-plane cross(p, q, x) >= 0.
  double t0 = 0.0, t1 = 1.0;
  const double dx = b.x - a.x, dy = b.y - a.y;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point& p = hull[i];
    const Point& q = hull[(i + 1) % hull.size()];
    const double ex = q.x - p.x, ey = q.y - p.y;
    const double num = ex * (a.y - p.y) - ey * (a.x - p.x);  // cross at t = 0
    const double den = ex * dy - ey * dx;                    // d cross / dt
    if (den == 0.0) {
      if (num <= 0.0) return false;
      continue;
    }
    const double t = -num / den;
    if (den > 0.0) t0 = std::max(t0, t);
    else t1 = std::min(t1, t);
    if (t0 >= t1) return false;
  }

  // The clipped piece may still lie on the boundary; its midpoint is inside
  // the open polygon iff the piece crosses the interior.
  const double tm = 0.5 * (t0 + t1);
  const Point m{a.x + tm * dx, a.y + tm * dy};
  const double tol = 1e-12 * extent * extent;
  for (std::size_t i = 0; i < hull.size(); ++i)
    if (cross(hull[i], hull[(i + 1) % hull.size()], m) <= tol) return false;
  return true;
}

}  // namespace hmer::graph
