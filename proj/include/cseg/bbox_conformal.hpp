#pragma once

#include <span>

#include "cseg/combination.hpp"
#include "cseg/conformal.hpp"
#include "cseg/morphology.hpp"

namespace cseg {

/// Ground-truth box unions over the 4-connected components of a mask.
struct BoxTargets {
  BoxSet inner_boxes;     // largest inscribed box per component
  BoxSet outer_boxes;     // smallest enclosing box per component
  LabelMask inner_union;  // rasterized inner_boxes
  LabelMask outer_union;  // rasterized outer_boxes
};

[[nodiscard]] BoxTargets box_targets(const LabelMask& truth);

/// Pixel region over which the inner box statistic combines b_I.
///   Target         the rasterized inner target union (as in the box corollary)
///   OutsideTarget  its complement, mirroring the background maximum of the
///                  main-text tau; on its coverage event I is contained in B^I
enum class BoxInnerRegion { Target, OutsideTarget };

struct BoxStatistics {
  double inner = 0.0;  // C(region, b_I)
  double outer = 0.0;  // C(B^O, -b_O)
};

[[nodiscard]] BoxStatistics box_statistics(const ScoreImage& b_inner, const ScoreImage& b_outer,
                                           const BoxTargets& targets, const CombinationFunction& c,
                                           BoxInnerRegion region = BoxInnerRegion::Target);

/// Box scores of a raw logit image: b_I and b_O.
struct BoxScores {
  ScoreImage inner;
  ScoreImage outer;
};

[[nodiscard]] BoxScores box_scores(const ScoreImage& logits, const TransformSpec& spec);

/// Thresholds from the box statistics of every record. `spec` supplies the
/// predicted-mask threshold; the returned transforms are BBoxInner / BBoxOuter.
[[nodiscard]] ThresholdSet bbox_calibrate(std::span<const CalibrationRecord> records, const TransformSpec& spec,
                                          double alpha1, double alpha2,
                                          const CombinationFunction& c = MaxCombination{},
                                          BoxInnerRegion region = BoxInnerRegion::Target);

/// inner = {v : C({v}, b_I) > lambda_inner}, outer = {v : C({v}, -b_O) <= lambda_outer}.
[[nodiscard]] ConfidenceSets bbox_sets(const ScoreImage& logits, const ThresholdSet& thresholds,
                                       const CombinationFunction& c = MaxCombination{});

}  // namespace cseg
