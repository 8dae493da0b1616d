#include "cseg/morphology.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <limits>
#include <optional>

#include "cseg/errors.hpp"

namespace cseg {

double distance(Metric metric, double dr, double dc) {
  if (metric == Metric::Chessboard) return std::max(std::abs(dr), std::abs(dc));
  return std::sqrt(dr * dr + dc * dc);
}

namespace {

// Cell edges, named by position inside a 2x2 cell whose top-left sample is (r, c).
enum Edge : std::uint8_t { kTop = 1, kRight = 2, kBottom = 4, kLeft = 8 };

// Case index bits: top-left 8, top-right 4, bottom-right 2, bottom-left 1.
constexpr std::array<std::uint8_t, 16> kCaseEdges = {
    0,                                // 0
    kLeft | kBottom,                  // 1
    kBottom | kRight,                 // 2
    kLeft | kRight,                   // 3
    kTop | kRight,                    // 4
    kTop | kRight | kBottom | kLeft,  // 5, saddle
    kTop | kBottom,                   // 6
    kLeft | kTop,                     // 7
    kLeft | kTop,                     // 8
    kTop | kBottom,                   // 9
    kTop | kRight | kBottom | kLeft,  // 10, saddle
    kTop | kRight,                    // 11
    kLeft | kRight,                   // 12
    kBottom | kRight,                 // 13
    kLeft | kBottom,                  // 14
    0,                                // 15
};

// True for mask pixels; the one-pixel ring outside the grid reads as 0.
bool padded_at(const LabelMask& mask, std::int64_t r, std::int64_t c) {
  return mask.dims().contains({r, c}) && mask.at({r, c});
}

}  // namespace

BoundaryPointSet marching_squares_boundary(const LabelMask& mask) {
  const auto h = mask.dims().height();
  const auto w = mask.dims().width();
  BoundaryPointSet points;
  for (std::int64_t r = -1; r < h; ++r) {
    for (std::int64_t c = -1; c < w; ++c) {
      const unsigned index = (padded_at(mask, r, c) ? 8U : 0U) | (padded_at(mask, r, c + 1) ? 4U : 0U) |
                             (padded_at(mask, r + 1, c + 1) ? 2U : 0U) |
                             (padded_at(mask, r + 1, c) ? 1U : 0U);
      const auto edges = kCaseEdges[index];
      const auto rd = static_cast<double>(r);
      const auto cd = static_cast<double>(c);
      if ((edges & kTop) != 0) points.push_back({rd, cd + 0.5});
      if ((edges & kRight) != 0) points.push_back({rd + 0.5, cd + 1.0});
      if ((edges & kBottom) != 0) points.push_back({rd + 1.0, cd + 0.5});
      if ((edges & kLeft) != 0) points.push_back({rd + 0.5, cd});
    }
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

ScoreImage signed_distance_transform(const LabelMask& mask, Metric metric) {
  const auto& dims = mask.dims();
  const auto ones = count_ones(mask);
  if (ones == 0) return {dims, -dims.max_distance()};
  if (ones == dims.size()) return {dims, dims.max_distance()};

  // Boundary points live on the half-integer lattice. In doubled coordinates
  // (shifted by one so the padding ring is index 0) every point is an integer
  // site of a (2h+1) x (2w+1) grid and every pixel center is an odd index.
  const auto h = dims.height();
  const auto w = dims.width();
  const auto rows = 2 * h + 1;
  const auto cols = 2 * w + 1;
  std::vector<std::uint8_t> site(static_cast<std::size_t>(rows * cols), 0);
  for (const auto& p : marching_squares_boundary(mask)) {
    const auto R = static_cast<std::int64_t>(std::lround(2.0 * p.row)) + 1;
    const auto C = static_cast<std::int64_t>(std::lround(2.0 * p.col)) + 1;
    site[static_cast<std::size_t>(R * cols + C)] = 1;
  }

  // Vertical distance, in doubled units, from each lattice node to the nearest
  // site in its column; only the pixel-center rows are needed.
  constexpr std::int64_t kNone = std::numeric_limits<std::int32_t>::max();
  std::vector<std::int64_t> vertical(static_cast<std::size_t>(h * cols), kNone);
  std::vector<std::int64_t> column(static_cast<std::size_t>(rows));
  for (std::int64_t C = 0; C < cols; ++C) {
    std::int64_t last = -kNone;
    for (std::int64_t R = 0; R < rows; ++R) {
      if (site[static_cast<std::size_t>(R * cols + C)] != 0) last = R;
      column[static_cast<std::size_t>(R)] = R - last;
    }
    last = 2 * kNone;
    for (std::int64_t R = rows - 1; R >= 0; --R) {
      if (site[static_cast<std::size_t>(R * cols + C)] != 0) last = R;
      auto& d = column[static_cast<std::size_t>(R)];
      d = std::min(d, last - R);
    }
    for (std::int64_t r = 0; r < h; ++r) {
      vertical[static_cast<std::size_t>(r * cols + C)] = column[static_cast<std::size_t>(2 * r + 1)];
    }
  }

  std::vector<double> values(dims.size());
  for (std::int64_t r = 0; r < h; ++r) {
    const auto* vrow = vertical.data() + r * cols;
    for (std::int64_t c = 0; c < w; ++c) {
      const auto center = 2 * c + 1;
      std::int64_t best = std::numeric_limits<std::int64_t>::max();
      for (std::int64_t C = 0; C < cols; ++C) {
        const auto dv = vrow[C];
        if (dv >= kNone) continue;
        const auto dh = std::abs(C - center);
        const auto d = metric == Metric::Chessboard ? std::max(dv, dh) : dv * dv + dh * dh;
        best = std::min(best, d);
      }
      const double magnitude = metric == Metric::Chessboard
                                   ? static_cast<double>(best) / 2.0
                                   : std::sqrt(static_cast<double>(best) / 4.0);
      const auto index = dims.encode({r, c});
      values[index] = mask[index] ? magnitude : -magnitude;
    }
  }
  return {dims, std::move(values)};
}

std::vector<LabelMask> connected_components(const LabelMask& mask, Connectivity connectivity) {
  const auto& dims = mask.dims();
  std::vector<std::uint8_t> visited(dims.size(), 0);
  std::vector<LabelMask> components;
  std::vector<Pixel> offsets = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};
  if (connectivity == Connectivity::Eight) {
    offsets.insert(offsets.end(), {{-1, -1}, {-1, 1}, {1, -1}, {1, 1}});
  }

  std::deque<Pixel> queue;
  for (std::size_t start = 0; start < dims.size(); ++start) {
    if (!mask[start] || visited[start] != 0) continue;
    std::vector<std::uint8_t> bits(dims.size(), 0);
    visited[start] = 1;
    queue.push_back(dims.decode(start));
    while (!queue.empty()) {
      const auto p = queue.front();
      queue.pop_front();
      bits[dims.encode(p)] = 1;
      for (const auto& o : offsets) {
        const Pixel q{p.row + o.row, p.col + o.col};
        if (!dims.contains(q)) continue;
        const auto qi = dims.encode(q);
        if (mask[qi] && visited[qi] == 0) {
          visited[qi] = 1;
          queue.push_back(q);
        }
      }
    }
    components.emplace_back(dims, std::move(bits));
  }
  return components;
}

namespace {

// Strict preference order for inscribed-box candidates.
bool better_box(const Box& a, const Box& b) {
  if (a.area() != b.area()) return a.area() > b.area();
  if (a.row_min != b.row_min) return a.row_min < b.row_min;
  if (a.col_min != b.col_min) return a.col_min < b.col_min;
  return a.width() > b.width();
}

}  // namespace

Box largest_inscribed_box(const LabelMask& component) {
  if (count_ones(component) == 0) throw EmptyInputError("largest_inscribed_box: empty component");
  const auto h = component.dims().height();
  const auto w = component.dims().width();
  const auto wn = static_cast<std::size_t>(w);

  // Every maximal-area rectangle cannot be extended in any direction, so it is
  // the full >=height run around some column of the histogram ending at its
  // bottom row. Enumerating those runs covers every tie.
  std::vector<std::int64_t> heights(wn, 0), left(wn), right(wn), stack;
  stack.reserve(wn);
  std::optional<Box> best;
  for (std::int64_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < wn; ++c) {
      heights[c] = component.at({r, static_cast<std::int64_t>(c)}) ? heights[c] + 1 : 0;
    }
    stack.clear();
    for (std::size_t c = 0; c < wn; ++c) {
      while (!stack.empty() && heights[static_cast<std::size_t>(stack.back())] >= heights[c]) stack.pop_back();
      left[c] = stack.empty() ? 0 : stack.back() + 1;
      stack.push_back(static_cast<std::int64_t>(c));
    }
    stack.clear();
    for (std::size_t c = wn; c-- > 0;) {
      while (!stack.empty() && heights[static_cast<std::size_t>(stack.back())] >= heights[c]) stack.pop_back();
      right[c] = stack.empty() ? w - 1 : stack.back() - 1;
      stack.push_back(static_cast<std::int64_t>(c));
    }
    for (std::size_t c = 0; c < wn; ++c) {
      if (heights[c] == 0) continue;
      const Box candidate{r - heights[c] + 1, r, left[c], right[c]};
      if (!best || better_box(candidate, *best)) best = candidate;
    }
  }
  return *best;
}

Box min_bounding_box(const LabelMask& component) {
  const auto& dims = component.dims();
  std::optional<Box> box;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (!component[i]) continue;
    const auto p = dims.decode(i);
    if (!box) {
      box = Box{p.row, p.row, p.col, p.col};
      continue;
    }
    box->row_min = std::min(box->row_min, p.row);
    box->row_max = std::max(box->row_max, p.row);
    box->col_min = std::min(box->col_min, p.col);
    box->col_max = std::max(box->col_max, p.col);
  }
  if (!box) throw EmptyInputError("min_bounding_box: empty component");
  return *box;
}

LabelMask rasterize(const BoxSet& boxes, const GridDims& dims) {
  std::vector<std::uint8_t> bits(dims.size(), 0);
  for (const auto& b : boxes) {
    if (b.row_min > b.row_max || b.col_min > b.col_max || !dims.contains({b.row_min, b.col_min}) ||
        !dims.contains({b.row_max, b.col_max})) {
      throw ShapeError("box outside the grid");
    }
    for (auto r = b.row_min; r <= b.row_max; ++r) {
      for (auto c = b.col_min; c <= b.col_max; ++c) bits[dims.encode({r, c})] = 1;
    }
  }
  return {dims, std::move(bits)};
}

ScoreImage box_set_distance(const BoxSet& boxes, const GridDims& dims) {
  return signed_distance_transform(rasterize(boxes, dims), Metric::Chessboard);
}

}  // namespace cseg
