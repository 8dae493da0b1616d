#include "cseg/scores.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cseg/errors.hpp"

namespace cseg {

std::string to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::Identity:
      return "identity";
    case TransformKind::Sigmoid:
      return "sigmoid";
    case TransformKind::SignedDistance:
      return "signed_distance";
    case TransformKind::BBoxInner:
      return "bbox_inner";
    case TransformKind::BBoxOuter:
      return "bbox_outer";
    case TransformKind::BBoxCombined:
      return "bbox_combined";
  }
  return "unknown";
}

std::string to_string(Metric metric) {
  return metric == Metric::Chessboard ? "chessboard" : "euclidean";
}

TransformKind parse_transform_kind(const std::string& name) {
  for (auto kind : {TransformKind::Identity, TransformKind::Sigmoid, TransformKind::SignedDistance,
                    TransformKind::BBoxInner, TransformKind::BBoxOuter, TransformKind::BBoxCombined}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown transform kind '" + name + "'");
}

Metric parse_metric(const std::string& name) {
  if (name == "euclidean") return Metric::Euclidean;
  if (name == "chessboard") return Metric::Chessboard;
  throw ConfigError("unknown metric '" + name + "'");
}

void validate(const TransformSpec& spec) {
  if (!std::isfinite(spec.mask_threshold)) throw ConfigError("mask_threshold must be finite");
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

ScoreImage sigmoid_transform(const ScoreImage& logits) {
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sigmoid(logits[i]);
  return {logits.dims(), std::move(out)};
}

LabelMask predicted_mask(const ScoreImage& logits, const TransformSpec& spec) {
  validate(spec);
  const double t = spec.mask_threshold;
  if (t < 0.0) return {logits.dims(), true};
  if (t >= 1.0) return {logits.dims(), false};
  // Every finite logit has a strictly positive sigmoid.
  const double cut = t == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(t) - std::log1p(-t);
  std::vector<std::uint8_t> bits(logits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = logits[i] > cut ? 1 : 0;
  return {logits.dims(), std::move(bits)};
}

PredictedBoxes predicted_boxes(const ScoreImage& logits, const TransformSpec& spec) {
  PredictedBoxes boxes;
  for (const auto& component : connected_components(predicted_mask(logits, spec), Connectivity::Four)) {
    boxes.inner.push_back(largest_inscribed_box(component));
    boxes.outer.push_back(min_bounding_box(component));
  }
  return boxes;
}

ScoreImage apply_transform(const ScoreImage& logits, const TransformSpec& spec) {
  validate(spec);
  const auto& dims = logits.dims();
  switch (spec.kind) {
    case TransformKind::Identity:
      return logits;
    case TransformKind::Sigmoid:
      return sigmoid_transform(logits);
    case TransformKind::SignedDistance:
      return signed_distance_transform(predicted_mask(logits, spec), spec.metric);
    case TransformKind::BBoxInner:
      return box_set_distance(predicted_boxes(logits, spec).inner, dims);
    case TransformKind::BBoxOuter:
      return box_set_distance(predicted_boxes(logits, spec).outer, dims);
    case TransformKind::BBoxCombined: {
      const auto boxes = predicted_boxes(logits, spec);
      const auto b_inner = box_set_distance(boxes.inner, dims);
      const auto b_outer = box_set_distance(boxes.outer, dims);
      const auto outer_set = rasterize(boxes.outer, dims);
      std::vector<double> out(dims.size());
      for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = outer_set[i] ? std::max(b_inner[i], 0.0) : b_outer[i];
      }
      return {dims, std::move(out)};
    }
  }
  throw ConfigError("unhandled transform kind");
}

}  // namespace cseg
