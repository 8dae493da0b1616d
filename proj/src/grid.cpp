#include "cseg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cseg/errors.hpp"

namespace cseg {

GridDims::GridDims(std::int64_t height, std::int64_t width) : height_(height), width_(width) {
  if (height < 1 || width < 1) {
    throw ShapeError("grid dimensions must be positive, got " + std::to_string(height) + "x" +
                     std::to_string(width));
  }
  if (static_cast<std::uint64_t>(height) >
      std::numeric_limits<std::size_t>::max() / static_cast<std::uint64_t>(width)) {
    throw ShapeError("grid too large");
  }
}

ScoreImage::ScoreImage(GridDims dims, std::vector<double> values)
    : dims_(dims), values_(std::move(values)) {
  if (values_.size() != dims_.size()) {
    throw ShapeError("score image has " + std::to_string(values_.size()) + " values for a " +
                     std::to_string(dims_.height()) + "x" + std::to_string(dims_.width()) +
                     " grid");
  }
  if (std::any_of(values_.begin(), values_.end(), [](double v) { return std::isnan(v); })) {
    throw DataError("score image contains NaN");
  }
}

ScoreImage::ScoreImage(GridDims dims, double fill) : ScoreImage(dims, std::vector<double>(dims.size(), fill)) {}

LabelMask::LabelMask(GridDims dims, std::vector<std::uint8_t> bits)
    : dims_(dims), bits_(std::move(bits)) {
  if (bits_.size() != dims_.size()) {
    throw ShapeError("mask has " + std::to_string(bits_.size()) + " bits for a " +
                     std::to_string(dims_.height()) + "x" + std::to_string(dims_.width()) +
                     " grid");
  }
  for (auto& b : bits_) b = b != 0 ? 1 : 0;
}

LabelMask::LabelMask(GridDims dims, bool fill)
    : dims_(dims), bits_(dims.size(), fill ? 1 : 0) {}

std::size_t count_ones(const LabelMask& mask) {
  const auto bits = mask.bits();
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

LabelMask complement(const LabelMask& mask) {
  std::vector<std::uint8_t> out(mask.size());
  const auto bits = mask.bits();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = bits[i] ^ 1U;
  return {mask.dims(), std::move(out)};
}

std::vector<Pixel> pixels_where(const LabelMask& mask, bool bit) {
  std::vector<Pixel> out;
  const auto bits = mask.bits();
  const std::uint8_t want = bit ? 1 : 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == want) out.push_back(mask.dims().decode(i));
  }
  return out;
}

void require_same_dims(const GridDims& a, const GridDims& b, const char* what) {
  if (!(a == b)) {
    throw ShapeError(std::string(what) + ": dimension mismatch (" + std::to_string(a.height()) +
                     "x" + std::to_string(a.width()) + " vs " + std::to_string(b.height()) + "x" +
                     std::to_string(b.width()) + ")");
  }
}

bool is_subset(const LabelMask& inner, const LabelMask& outer) {
  require_same_dims(inner.dims(), outer.dims(), "is_subset");
  const auto a = inner.bits();
  const auto b = outer.bits();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
  }
  return true;
}

LabelMask set_union(const LabelMask& a, const LabelMask& b) {
  require_same_dims(a.dims(), b.dims(), "set_union");
  std::vector<std::uint8_t> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.bits()[i] | b.bits()[i];
  return {a.dims(), std::move(out)};
}

LabelMask set_intersection(const LabelMask& a, const LabelMask& b) {
  require_same_dims(a.dims(), b.dims(), "set_intersection");
  std::vector<std::uint8_t> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.bits()[i] & b.bits()[i];
  return {a.dims(), std::move(out)};
}

std::size_t count_difference(const LabelMask& a, const LabelMask& b) {
  require_same_dims(a.dims(), b.dims(), "count_difference");
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a.bits()[i] > b.bits()[i] ? 1 : 0;
  return n;
}

}  // namespace cseg
