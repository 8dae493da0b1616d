#include "cseg/bbox_conformal.hpp"

#include "cseg/errors.hpp"

namespace cseg {

BoxTargets box_targets(const LabelMask& truth) {
  BoxTargets out{{}, {}, LabelMask(truth.dims(), false), LabelMask(truth.dims(), false)};
  for (const auto& component : connected_components(truth, Connectivity::Four)) {
    out.inner_boxes.push_back(largest_inscribed_box(component));
    out.outer_boxes.push_back(min_bounding_box(component));
  }
  out.inner_union = rasterize(out.inner_boxes, truth.dims());
  out.outer_union = rasterize(out.outer_boxes, truth.dims());
  return out;
}

BoxStatistics box_statistics(const ScoreImage& b_inner, const ScoreImage& b_outer, const BoxTargets& targets,
                             const CombinationFunction& c, BoxInnerRegion region) {
  require_same_dims(b_inner.dims(), targets.inner_union.dims(), "box_statistics");
  require_same_dims(b_outer.dims(), targets.outer_union.dims(), "box_statistics");
  std::vector<double> negated(b_outer.size());
  for (std::size_t i = 0; i < negated.size(); ++i) negated[i] = -b_outer[i];
  const ScoreImage neg_outer(b_outer.dims(), std::move(negated));
  const auto& inner_region =
      region == BoxInnerRegion::Target ? targets.inner_union : complement(targets.inner_union);
  return {c.combine(inner_region, b_inner), c.combine(targets.outer_union, neg_outer)};
}

BoxScores box_scores(const ScoreImage& logits, const TransformSpec& spec) {
  const auto boxes = predicted_boxes(logits, spec);
  return {box_set_distance(boxes.inner, logits.dims()), box_set_distance(boxes.outer, logits.dims())};
}

ThresholdSet bbox_calibrate(std::span<const CalibrationRecord> records, const TransformSpec& spec,
                            double alpha1, double alpha2, const CombinationFunction& c,
                            BoxInnerRegion region) {
  if (records.empty()) throw EmptyInputError("calibration set is empty");
  std::vector<double> inner_stats, outer_stats;
  for (const auto& r : records) {
    require_same_dims(r.scores.dims(), r.truth.dims(), "bbox_calibrate");
    const auto scores = box_scores(r.scores, spec);
    const auto stats = box_statistics(scores.inner, scores.outer, box_targets(r.truth), c, region);
    inner_stats.push_back(stats.inner);
    outer_stats.push_back(stats.outer);
  }
  ThresholdSet out;
  out.n = records.size();
  out.alpha1 = alpha1;
  out.alpha2 = alpha2;
  out.lambda_inner = conformal_quantile(inner_stats, alpha1);
  out.lambda_outer = conformal_quantile(outer_stats, alpha2);
  out.transform_inner = spec;
  out.transform_inner.kind = TransformKind::BBoxInner;
  out.transform_inner.metric = Metric::Chessboard;
  out.transform_outer = out.transform_inner;
  out.transform_outer.kind = TransformKind::BBoxOuter;
  return out;
}

ConfidenceSets bbox_sets(const ScoreImage& logits, const ThresholdSet& thresholds, const CombinationFunction& c) {
  const auto scores = box_scores(logits, thresholds.transform_inner);
  return {generalized_set(scores.inner, c, Side::Inner, thresholds.lambda_inner),
          generalized_set(scores.outer, c, Side::Outer, thresholds.lambda_outer)};
}

}  // namespace cseg
