#pragma once

#include <string>

#include "cseg/grid.hpp"
#include "cseg/morphology.hpp"

namespace cseg {

enum class TransformKind {
  Identity,
  Sigmoid,
  SignedDistance,  // signed distance transform of the predicted mask
  BBoxInner,       // chessboard distance to the union of inscribed boxes
  BBoxOuter,       // chessboard distance to the union of enclosing boxes
  BBoxCombined,    // b_O outside the enclosing boxes, max(b_I, 0) inside
};

/// Score transformation applied to raw logits before calibration.
struct TransformSpec {
  TransformKind kind = TransformKind::Sigmoid;
  // Only read by SignedDistance; the box kinds always use Chessboard.
  Metric metric = Metric::Euclidean;
  // Predicted-mask cut on the sigmoid scale.
  double mask_threshold = 0.5;

  [[nodiscard]] bool is_box() const {
    return kind == TransformKind::BBoxInner || kind == TransformKind::BBoxOuter ||
           kind == TransformKind::BBoxCombined;
  }

  friend bool operator==(const TransformSpec&, const TransformSpec&) = default;
};

[[nodiscard]] std::string to_string(TransformKind kind);
[[nodiscard]] std::string to_string(Metric metric);
// Both throw ConfigError on unknown names.
[[nodiscard]] TransformKind parse_transform_kind(const std::string& name);
[[nodiscard]] Metric parse_metric(const std::string& name);

/// Throws ConfigError if the threshold is not finite.
void validate(const TransformSpec& spec);

[[nodiscard]] double sigmoid(double x);
[[nodiscard]] ScoreImage sigmoid_transform(const ScoreImage& logits);

/// {v : sigmoid(s(v)) > threshold}. Evaluated as a comparison of the logit
/// against logit(threshold), so threshold 0.5 is exactly "logit > 0".
[[nodiscard]] LabelMask predicted_mask(const ScoreImage& logits, const TransformSpec& spec);

/// Per-component boxes of the predicted mask (4-connectivity).
struct PredictedBoxes {
  BoxSet inner;  // largest inscribed box of each component
  BoxSet outer;  // smallest enclosing box of each component
};

[[nodiscard]] PredictedBoxes predicted_boxes(const ScoreImage& logits, const TransformSpec& spec);

[[nodiscard]] ScoreImage apply_transform(const ScoreImage& logits, const TransformSpec& spec);

}  // namespace cseg
