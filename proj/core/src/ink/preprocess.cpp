#include "hmer/ink/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hmer/error.hpp"

namespace hmer::ink {
namespace {

struct Walk {
  std::vector<Point> samples;
  double progress = 0.0;  // chords taken plus the fraction left to the end
};

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Steps chords of length `spacing` along the polyline, each ending where the
// pen first leaves the circle around the previous sample, until the polyline
// ends inside the current circle or `limit` chords are taken.
Walk walk(const std::vector<Point>& poly, double spacing, std::size_t limit) {
  Walk w;
  w.samples.reserve(limit + 1);
  Point q = poly.front();
  w.samples.push_back(q);
  std::size_t seg = 0;  // current position lies on [poly[seg], poly[seg+1]]
  Point from = q;
  const double r2 = spacing * spacing;
  for (std::size_t k = 0; k < limit; ++k) {
    bool exited = false;
    while (seg + 1 < poly.size()) {
      const Point b = poly[seg + 1];
      const double dx = from.x - q.x, dy = from.y - q.y;
      const double ux = b.x - from.x, uy = b.y - from.y;
      const double uu = ux * ux + uy * uy;
      if (uu > 0.0) {
        const double du = dx * ux + dy * uy;
        const double c = dx * dx + dy * dy - r2;
        const double disc = std::max(0.0, du * du - uu * c);
        const double t = std::max(0.0, (-du + std::sqrt(disc)) / uu);
        if (t <= 1.0) {
          from = Point{from.x + t * ux, from.y + t * uy};
          exited = true;
          break;
        }
      }
      ++seg;
      from = poly[seg];
    }
    if (!exited) break;
    q = from;
    w.samples.push_back(q);
  }
  w.progress = static_cast<double>(w.samples.size() - 1) + distance(q, poly.back()) / spacing;
  return w;
}

}  // namespace

ResampledStroke resample_stroke(std::span<const Point> points, std::size_t count) {
  if (count < 2) throw ArgumentError("resample_stroke: count must be at least 2, got " + std::to_string(count));
  if (points.empty()) throw ArgumentError("resample_stroke: empty stroke");

  std::vector<Point> poly;
  poly.reserve(points.size());
  for (const Point& p : points)
    if (poly.empty() || !(p == poly.back())) poly.push_back(p);

  double length = 0.0;
  for (std::size_t i = 1; i < poly.size(); ++i) length += distance(poly[i - 1], poly[i]);
  if (poly.size() == 1 || length == 0.0) return ResampledStroke{std::vector<Point>(count, poly.front())};

  // progress(spacing) = steps means the last chord lands on the endpoint.
  // It falls as spacing grows but can jump where a circle grazes the path,
  // so scan for brackets and bisect each until one closes exactly.
  const std::size_t steps = count - 1;
  const double top = length / static_cast<double>(steps);
  // How far the last chord is from closing on the endpoint. The root can
  // leave the endpoint exactly on the final circle, one sample short.
  auto miss = [&](Walk& w, double spacing) {
    if (w.samples.size() + 1 == count) {
      const double gap = std::abs(distance(w.samples.back(), poly.back()) - spacing);
      w.samples.push_back(poly.back());
      return gap;
    }
    if (w.samples.size() < count) return length;
    w.samples.resize(count);
    return distance(w.samples.back(), poly.back());
  };
  constexpr int kGrid = 64;
  Walk best;
  double best_miss = std::numeric_limits<double>::infinity();
  double prev_s = top;
  Walk prev = walk(poly, top, count);
  for (int g = 1; g <= kGrid && best_miss > 1e-12 * length; ++g) {
    const double s = top * (1.0 - static_cast<double>(g) / (kGrid + 1));
    Walk cur = walk(poly, s, count);
    const double fs = static_cast<double>(steps);
    if ((prev.progress - fs) * (cur.progress - fs) <= 0.0) {
      double lo = s, hi = prev_s;  // progress(lo) >= steps >= progress(hi)
      Walk wl = cur, wh = prev;
      for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        Walk w = walk(poly, mid, count);
        if (w.progress >= fs) {
          lo = mid;
          wl = std::move(w);
        } else {
          hi = mid;
          wh = std::move(w);
        }
      }
      for (auto [w, spacing] : {std::pair{&wl, lo}, std::pair{&wh, hi}})
        if (const double m = miss(*w, spacing); m < best_miss) {
          best_miss = m;
          best = *w;
        }
    }
    prev = std::move(cur);
    prev_s = s;
  }
  if (best.samples.size() != count) {
    // No bracket: fall back to arc-length sampling.
    best.samples.clear();
    std::size_t seg = 0;
    double done = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
      const double target = length * static_cast<double>(k) / static_cast<double>(steps);
      while (seg + 2 < poly.size() && done + distance(poly[seg], poly[seg + 1]) < target) {
        done += distance(poly[seg], poly[seg + 1]);
        ++seg;
      }
      const double d = distance(poly[seg], poly[seg + 1]);
      const double t = d > 0.0 ? std::clamp((target - done) / d, 0.0, 1.0) : 0.0;
      best.samples.push_back(Point{poly[seg].x + t * (poly[seg + 1].x - poly[seg].x),
                                   poly[seg].y + t * (poly[seg + 1].y - poly[seg].y)});
    }
  }
  best.samples.back() = poly.back();
  return ResampledStroke{std::move(best.samples)};
}

Normalization normalization_for(std::span<const ResampledStroke> strokes) {
  Normalization norm;
  double sx = 0.0, sy = 0.0, diag_sum = 0.0;
  std::size_t total = 0;
  for (const auto& s : strokes) {
    if (s.points.empty()) continue;
    double x0 = s.points[0].x, x1 = x0, y0 = s.points[0].y, y1 = y0;
    for (const Point& p : s.points) {
      sx += p.x;
      sy += p.y;
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
    total += s.points.size();
    diag_sum += std::hypot(x1 - x0, y1 - y0);
  }
  if (total == 0) return norm;
  norm.center = Point{sx / static_cast<double>(total), sy / static_cast<double>(total)};
  const double mean_diag = diag_sum / static_cast<double>(strokes.size());
  norm.scale = mean_diag > 0.0 ? 1.0 / mean_diag : 1.0;
  return norm;
}

std::vector<ResampledStroke> normalize_expression(std::span<const ResampledStroke> strokes) {
  const Normalization norm = normalization_for(strokes);
  std::vector<ResampledStroke> out(strokes.begin(), strokes.end());
  for (auto& s : out)
    for (Point& p : s.points) p = Point{(p.x - norm.center.x) * norm.scale, (p.y - norm.center.y) * norm.scale};
  return out;
}

std::vector<Stroke> normalize_expression(std::span<const Stroke> strokes) {
  std::vector<ResampledStroke> plain;
  plain.reserve(strokes.size());
  for (const auto& s : strokes) plain.push_back(ResampledStroke{s.points});
  const Normalization norm = normalization_for(plain);
  std::vector<Stroke> out(strokes.begin(), strokes.end());
  for (auto& s : out)
    for (Point& p : s.points) p = Point{(p.x - norm.center.x) * norm.scale, (p.y - norm.center.y) * norm.scale};
  return out;
}

std::vector<ResampledStroke> preprocess(const InkExpression& expression, std::size_t count) {
  std::vector<ResampledStroke> resampled;
  resampled.reserve(expression.strokes.size());
  for (const auto& s : expression.strokes) resampled.push_back(resample_stroke(s, count));
  return normalize_expression(resampled);
}

}  // namespace hmer::ink
