#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cseg/combination.hpp"
#include "cseg/grid.hpp"
#include "cseg/scores.hpp"

namespace cseg {

/// Per-image calibration statistics.
///   tau   = max over background pixels of the inner-transformed score
///   gamma = max over foreground pixels of the negated outer-transformed score
/// An empty pixel set gives -inf.
struct Nonconformity {
  double tau = 0.0;
  double gamma = 0.0;

  [[nodiscard]] double joint() const { return tau > gamma ? tau : gamma; }

  friend bool operator==(const Nonconformity&, const Nonconformity&) = default;
};

/// A labelled pair with optionally cached statistics.
struct CalibrationRecord {
  ScoreImage scores;  // raw logits
  LabelMask truth;
  std::optional<Nonconformity> stats;
};

/// The transformed images for one labelled pair.
struct TransformedRecord {
  ScoreImage f_inner;
  ScoreImage f_outer;
  LabelMask truth;
};

[[nodiscard]] TransformedRecord transform_record(const ScoreImage& logits, const LabelMask& truth,
                                                 const TransformSpec& inner, const TransformSpec& outer);

/// Throws ShapeError unless all three rasters share dimensions.
[[nodiscard]] Nonconformity nonconformity(const ScoreImage& f_inner, const ScoreImage& f_outer,
                                          const LabelMask& truth);

/// Fills `record.stats` using the given transforms and returns them.
const Nonconformity& cache_nonconformity(CalibrationRecord& record, const TransformSpec& inner,
                                         const TransformSpec& outer);

/// Rank k = ceil((1 - alpha)(n + 1)), computed exactly from the binary value of alpha.
/// Throws ConfigError unless 0 < alpha < 1.
[[nodiscard]] std::size_t conformal_rank(std::size_t n, double alpha);

/// floor(alpha * m), computed exactly for alpha in [0, 1).
[[nodiscard]] std::size_t exact_floor_product(double alpha, std::size_t m);

/// The k-th smallest statistic (k as in conformal_rank), or +inf when k > n.
/// -inf entries sort below every real. Throws EmptyInputError for an empty list.
[[nodiscard]] double conformal_quantile(std::span<const double> stats, double alpha);

/// Calibrated thresholds plus the levels and transforms that produced them.
struct ThresholdSet {
  double alpha1 = 0.1;
  double lambda_inner = 0.0;
  double alpha2 = 0.1;
  double lambda_outer = 0.0;
  std::optional<double> alpha_joint;
  std::optional<double> lambda_joint;
  std::size_t n = 0;
  TransformSpec transform_inner;
  TransformSpec transform_outer;
};

[[nodiscard]] ThresholdSet calibrate(std::span<const Nonconformity> stats, double alpha1, double alpha2,
                                     std::optional<double> alpha_joint = std::nullopt);
/// Every record must carry cached stats (ConfigError otherwise).
[[nodiscard]] ThresholdSet calibrate(std::span<const CalibrationRecord> records, double alpha1,
                                     double alpha2, std::optional<double> alpha_joint = std::nullopt);

enum class SetMode { Marginal, Joint, WeightedJoint };

struct ConfidenceSets {
  LabelMask inner;
  LabelMask outer;
};

/// inner = {v : f_inner(v) > lambda}, outer = {v : -f_outer(v) <= lambda}.
///   Marginal       lambda_inner / lambda_outer
///   WeightedJoint  same, but requires alpha_joint with alpha1 + alpha2 <= alpha_joint
///   Joint          lambda_joint for both sides
/// Missing thresholds for the mode raise ConfigError.
[[nodiscard]] ConfidenceSets build_sets(const ScoreImage& f_inner, const ScoreImage& f_outer,
                                        const ThresholdSet& thresholds, SetMode mode);

[[nodiscard]] LabelMask inner_set(const ScoreImage& f_inner, double lambda);
[[nodiscard]] LabelMask outer_set(const ScoreImage& f_outer, double lambda);

// Generalized construction with an arbitrary increasing combination function.
// The inner statistic combines f_inner over the foreground and the outer
// statistic combines -f_outer over the background. The main pipeline above is
// never routed through here.

enum class Side { Inner, Outer };

[[nodiscard]] double generalized_statistic(const TransformedRecord& record, const CombinationFunction& c,
                                           Side side);
[[nodiscard]] double generalized_calibrate(std::span<const TransformedRecord> records,
                                           const CombinationFunction& c, Side side, double alpha);
/// Inner: {v : C({v}, f_inner) > lambda}. Outer: {v : C({v}, -f_outer) <= lambda}.
[[nodiscard]] LabelMask generalized_set(const ScoreImage& image, const CombinationFunction& c, Side side,
                                        double lambda);

/// Threshold from the risk-control formulation: the smallest lambda at which the
/// empirical rate of {tau_i > lambda} is at most alpha - (1 - alpha)/n.
/// Cross-checked against conformal_quantile; a mismatch throws InvariantError.
[[nodiscard]] double risk_control_lambda(std::span<const double> taus, double alpha);

}  // namespace cseg
