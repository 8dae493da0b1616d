#include <algorithm>
#include <cmath>

#include "cseg/harness.hpp"

namespace cseg {

CoverageResult evaluate_coverage(const ConfidenceSets& sets, const LabelMask& truth) {
  return {is_subset(sets.inner, truth), is_subset(truth, sets.outer)};
}

namespace {

struct Point {
  std::int64_t r, c;
};

std::int64_t cross(const Point& o, const Point& a, const Point& b) {
  return (a.r - o.r) * (b.c - o.c) - (a.c - o.c) * (b.r - o.r);
}

}  // namespace

double diameter(const LabelMask& mask) {
  // The farthest pair of a finite point set lies on its convex hull, and every
  // hull vertex of a pixel set is a leftmost or rightmost pixel of its row.
  const auto h = mask.dims().height();
  const auto w = mask.dims().width();
  std::vector<Point> points;
  for (std::int64_t r = 0; r < h; ++r) {
    std::int64_t first = -1, last = -1;
    for (std::int64_t c = 0; c < w; ++c) {
      if (mask.at({r, c})) {
        if (first < 0) first = c;
        last = c;
      }
    }
    if (first < 0) continue;
    points.push_back({r, first});
    if (last != first) points.push_back({r, last});
  }
  if (points.size() < 2) return 0.0;

  // Andrew's monotone chain; points are already sorted by (row, col).
  std::vector<Point> hull(2 * points.size());
  std::size_t k = 0;
  for (const auto& p : points) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    const auto& p = points[i];
    while (k >= lower && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  hull.resize(k > 1 ? k - 1 : k);

  std::int64_t best = 0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    for (std::size_t j = i + 1; j < hull.size(); ++j) {
      const auto dr = hull[i].r - hull[j].r;
      const auto dc = hull[i].c - hull[j].c;
      best = std::max(best, dr * dr + dc * dc);
    }
  }
  return std::sqrt(static_cast<double>(best));
}

EfficiencyMetrics efficiency_metrics(const ConfidenceSets& sets, const LabelMask& truth) {
  require_same_dims(sets.inner.dims(), truth.dims(), "efficiency_metrics");
  require_same_dims(sets.outer.dims(), truth.dims(), "efficiency_metrics");
  EfficiencyMetrics m;
  const double truth_diameter = diameter(truth);
  if (truth_diameter > 0.0) {
    m.inner_ratio = diameter(sets.inner) / truth_diameter;
    m.outer_ratio = diameter(sets.outer) / truth_diameter;
  }
  const auto total = static_cast<double>(truth.size());
  m.under_coverage = static_cast<double>(count_difference(truth, sets.inner)) / total;
  m.over_coverage = static_cast<double>(count_difference(sets.outer, truth)) / total;
  return m;
}

}  // namespace cseg
