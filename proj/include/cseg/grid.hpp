#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cseg {

struct Pixel {
  std::int64_t row = 0;
  std::int64_t col = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Size of a 2D pixel grid. Both extents are at least one.
class GridDims {
 public:
  GridDims(std::int64_t height, std::int64_t width);

  [[nodiscard]] std::int64_t height() const { return height_; }
  [[nodiscard]] std::int64_t width() const { return width_; }
  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }

  [[nodiscard]] bool contains(Pixel p) const {
    return p.row >= 0 && p.row < height_ && p.col >= 0 && p.col < width_;
  }

  // Row-major linear index and its inverse.
  [[nodiscard]] std::size_t encode(Pixel p) const {
    return static_cast<std::size_t>(p.row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(p.col);
  }
  [[nodiscard]] Pixel decode(std::size_t index) const {
    const auto w = static_cast<std::size_t>(width_);
    return {static_cast<std::int64_t>(index / w), static_cast<std::int64_t>(index % w)};
  }

  /// Sentinel magnitude used for the signed distance of masks without a boundary.
  [[nodiscard]] double max_distance() const {
    return static_cast<double>(height_ + width_);
  }

  friend bool operator==(const GridDims&, const GridDims&) = default;

 private:
  std::int64_t height_;
  std::int64_t width_;
};

/// Dense real-valued raster in row-major order. NaN is rejected on construction;
/// infinities are allowed so that degenerate-case sentinels can be represented.
class ScoreImage {
 public:
  ScoreImage(GridDims dims, std::vector<double> values);
  // Constant image.
  ScoreImage(GridDims dims, double fill);

  [[nodiscard]] const GridDims& dims() const { return dims_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] double operator[](std::size_t index) const { return values_[index]; }
  [[nodiscard]] double at(Pixel p) const { return values_[dims_.encode(p)]; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }

  friend bool operator==(const ScoreImage&, const ScoreImage&) = default;

 private:
  GridDims dims_;
  std::vector<double> values_;
};

/// Binary raster in row-major order. Bits are stored as 0/1 bytes.
class LabelMask {
 public:
  LabelMask(GridDims dims, std::vector<std::uint8_t> bits);
  // Uniform mask.
  LabelMask(GridDims dims, bool fill);

  [[nodiscard]] const GridDims& dims() const { return dims_; }
  [[nodiscard]] std::span<const std::uint8_t> bits() const { return bits_; }
  [[nodiscard]] bool operator[](std::size_t index) const { return bits_[index] != 0; }
  [[nodiscard]] bool at(Pixel p) const { return bits_[dims_.encode(p)] != 0; }
  [[nodiscard]] std::size_t size() const { return bits_.size(); }

  friend bool operator==(const LabelMask&, const LabelMask&) = default;

 private:
  GridDims dims_;
  std::vector<std::uint8_t> bits_;
};

[[nodiscard]] std::size_t count_ones(const LabelMask& mask);
[[nodiscard]] LabelMask complement(const LabelMask& mask);
/// Pixels whose bit equals `bit`, in row-major order.
[[nodiscard]] std::vector<Pixel> pixels_where(const LabelMask& mask, bool bit);

[[nodiscard]] bool is_subset(const LabelMask& inner, const LabelMask& outer);
[[nodiscard]] LabelMask set_union(const LabelMask& a, const LabelMask& b);
[[nodiscard]] LabelMask set_intersection(const LabelMask& a, const LabelMask& b);
/// Count of pixels set in `a` but not in `b`.
[[nodiscard]] std::size_t count_difference(const LabelMask& a, const LabelMask& b);

// Throws ShapeError when the dimensions differ.
void require_same_dims(const GridDims& a, const GridDims& b, const char* what);

}  // namespace cseg
