#pragma once

#include <vector>

#include "cseg/grid.hpp"

namespace cseg {

/// A point of the 0.5 iso-contour, in pixel units. Pixel centers sit at integer
/// coordinates, so contour points are edge midpoints with one half-integer
/// coordinate.
struct BoundaryPoint {
  double row = 0.0;
  double col = 0.0;

  friend bool operator==(const BoundaryPoint&, const BoundaryPoint&) = default;
  friend auto operator<=>(const BoundaryPoint&, const BoundaryPoint&) = default;
};

using BoundaryPointSet = std::vector<BoundaryPoint>;

enum class Metric { Euclidean, Chessboard };

[[nodiscard]] double distance(Metric metric, double dr, double dc);

/// Inclusive pixel bounds of an axis-aligned rectangle.
struct Box {
  std::int64_t row_min = 0;
  std::int64_t row_max = 0;
  std::int64_t col_min = 0;
  std::int64_t col_max = 0;

  [[nodiscard]] std::int64_t height() const { return row_max - row_min + 1; }
  [[nodiscard]] std::int64_t width() const { return col_max - col_min + 1; }
  [[nodiscard]] std::int64_t area() const { return height() * width(); }

  friend bool operator==(const Box&, const Box&) = default;
};

using BoxSet = std::vector<Box>;

/// Binary marching squares at level 0.5 on the mask zero-padded by one ring.
/// Every cell edge joining a 0 sample to a 1 sample contributes its midpoint;
/// a midpoint shared by two cells is reported once. Saddle cells contribute
/// all four crossings. Output is sorted by (row, col).
[[nodiscard]] BoundaryPointSet marching_squares_boundary(const LabelMask& mask);

/// Signed distance from each pixel center to the marching-squares boundary:
/// positive on set pixels, negative elsewhere. Masks that are all zeros or all
/// ones are treated as boundary-free and map to -D resp. +D with D = height + width.
[[nodiscard]] ScoreImage signed_distance_transform(const LabelMask& mask, Metric metric);

enum class Connectivity { Four = 4, Eight = 8 };

/// Components of the set pixels, ordered by their first row-major pixel.
[[nodiscard]] std::vector<LabelMask> connected_components(const LabelMask& mask,
                                                          Connectivity connectivity);

/// Maximal-area rectangle of set pixels. Ties go to the smaller row_min, then
/// the smaller col_min, then the wider box. Throws EmptyInputError on an empty mask.
[[nodiscard]] Box largest_inscribed_box(const LabelMask& component);

/// Tightest rectangle containing every set pixel. Throws EmptyInputError on an empty mask.
[[nodiscard]] Box min_bounding_box(const LabelMask& component);

[[nodiscard]] LabelMask rasterize(const BoxSet& boxes, const GridDims& dims);

/// Chessboard signed distance transform of the rasterized box union.
[[nodiscard]] ScoreImage box_set_distance(const BoxSet& boxes, const GridDims& dims);

}  // namespace cseg
