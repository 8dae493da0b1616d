#include "cseg/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cseg/errors.hpp"

namespace cseg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}

std::vector<double> sorted_stats(std::span<const double> stats) {
  if (stats.empty()) throw EmptyInputError("no calibration statistics");
  std::vector<double> sorted(stats.begin(), stats.end());
  if (std::any_of(sorted.begin(), sorted.end(), [](double v) { return std::isnan(v); })) {
    throw DataError("calibration statistic is NaN");
  }
  std::sort(sorted.begin(), sorted.end());
  return sorted;
}

}  // namespace

TransformedRecord transform_record(const ScoreImage& logits, const LabelMask& truth,
                                   const TransformSpec& inner, const TransformSpec& outer) {
  require_same_dims(logits.dims(), truth.dims(), "transform_record");
  auto f_inner = apply_transform(logits, inner);
  auto f_outer = inner == outer ? f_inner : apply_transform(logits, outer);
  return {std::move(f_inner), std::move(f_outer), truth};
}

Nonconformity nonconformity(const ScoreImage& f_inner, const ScoreImage& f_outer, const LabelMask& truth) {
  require_same_dims(f_inner.dims(), truth.dims(), "nonconformity (inner image)");
  require_same_dims(f_outer.dims(), truth.dims(), "nonconformity (outer image)");
  Nonconformity out{-kInf, -kInf};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i]) {
      out.gamma = std::max(out.gamma, -f_outer[i]);
    } else {
      out.tau = std::max(out.tau, f_inner[i]);
    }
  }
  return out;
}

const Nonconformity& cache_nonconformity(CalibrationRecord& record, const TransformSpec& inner,
                                         const TransformSpec& outer) {
  const auto t = transform_record(record.scores, record.truth, inner, outer);
  record.stats = nonconformity(t.f_inner, t.f_outer, t.truth);
  return *record.stats;
}

std::size_t exact_floor_product(double alpha, std::size_t m) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("exact_floor_product: alpha outside [0, 1)");
  if (alpha == 0.0 || m == 0) return 0;
  int exponent = 0;
  const double fraction = std::frexp(alpha, &exponent);  // alpha = fraction * 2^exponent
  const auto mantissa = static_cast<unsigned __int128>(std::ldexp(fraction, 53));
  const int shift = 53 - exponent;  // alpha = mantissa * 2^-shift, shift >= 53
  if (shift >= 128) return 0;
  const unsigned __int128 product = mantissa * static_cast<unsigned __int128>(m);
  return static_cast<std::size_t>(product >> shift);
}

std::size_t conformal_rank(std::size_t n, double alpha) {
  require_alpha(alpha);
  // ceil((1 - alpha)(n + 1)) = (n + 1) - floor(alpha (n + 1))
  return (n + 1) - exact_floor_product(alpha, n + 1);
}

double conformal_quantile(std::span<const double> stats, double alpha) {
  require_alpha(alpha);
  const auto sorted = sorted_stats(stats);
  const auto k = conformal_rank(sorted.size(), alpha);
  if (k > sorted.size()) return kInf;
  return sorted[k - 1];
}

ThresholdSet calibrate(std::span<const Nonconformity> stats, double alpha1, double alpha2,
                       std::optional<double> alpha_joint) {
  if (stats.empty()) throw EmptyInputError("calibration set is empty");
  std::vector<double> taus, gammas, joints;
  taus.reserve(stats.size());
  gammas.reserve(stats.size());
  joints.reserve(stats.size());
  for (const auto& s : stats) {
    taus.push_back(s.tau);
    gammas.push_back(s.gamma);
    joints.push_back(s.joint());
  }
  ThresholdSet out;
  out.n = stats.size();
  out.alpha1 = alpha1;
  out.alpha2 = alpha2;
  out.lambda_inner = conformal_quantile(taus, alpha1);
  out.lambda_outer = conformal_quantile(gammas, alpha2);
  if (alpha_joint) {
    out.alpha_joint = alpha_joint;
    out.lambda_joint = conformal_quantile(joints, *alpha_joint);
  }
  return out;
}

ThresholdSet calibrate(std::span<const CalibrationRecord> records, double alpha1, double alpha2,
                       std::optional<double> alpha_joint) {
  std::vector<Nonconformity> stats;
  stats.reserve(records.size());
  for (const auto& r : records) {
    if (!r.stats) throw ConfigError("calibration record has no cached statistics");
    stats.push_back(*r.stats);
  }
  return calibrate(stats, alpha1, alpha2, alpha_joint);
}

LabelMask inner_set(const ScoreImage& f_inner, double lambda) {
  std::vector<std::uint8_t> bits(f_inner.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = f_inner[i] > lambda ? 1 : 0;
  return {f_inner.dims(), std::move(bits)};
}

LabelMask outer_set(const ScoreImage& f_outer, double lambda) {
  std::vector<std::uint8_t> bits(f_outer.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = -f_outer[i] <= lambda ? 1 : 0;
  return {f_outer.dims(), std::move(bits)};
}

ConfidenceSets build_sets(const ScoreImage& f_inner, const ScoreImage& f_outer,
                          const ThresholdSet& thresholds, SetMode mode) {
  require_same_dims(f_inner.dims(), f_outer.dims(), "build_sets");
  switch (mode) {
    case SetMode::Joint:
      if (!thresholds.lambda_joint) throw ConfigError("joint mode needs lambda_joint");
      return {inner_set(f_inner, *thresholds.lambda_joint), outer_set(f_outer, *thresholds.lambda_joint)};
    case SetMode::WeightedJoint:
      if (!thresholds.alpha_joint) throw ConfigError("weighted-joint mode needs alpha_joint");
      if (thresholds.alpha1 + thresholds.alpha2 > *thresholds.alpha_joint) {
        throw ConfigError("weighted-joint mode needs alpha1 + alpha2 <= alpha_joint");
      }
      [[fallthrough]];
    case SetMode::Marginal:
      return {inner_set(f_inner, thresholds.lambda_inner), outer_set(f_outer, thresholds.lambda_outer)};
  }
  throw ConfigError("unhandled set mode");
}

double generalized_statistic(const TransformedRecord& record, const CombinationFunction& c, Side side) {
  if (side == Side::Inner) return c.combine(record.truth, record.f_inner);
  std::vector<double> negated(record.f_outer.size());
  for (std::size_t i = 0; i < negated.size(); ++i) negated[i] = -record.f_outer[i];
  return c.combine(complement(record.truth), ScoreImage(record.f_outer.dims(), std::move(negated)));
}

double generalized_calibrate(std::span<const TransformedRecord> records, const CombinationFunction& c,
                             Side side, double alpha) {
  if (records.empty()) throw EmptyInputError("calibration set is empty");
  std::vector<double> stats;
  stats.reserve(records.size());
  for (const auto& r : records) stats.push_back(generalized_statistic(r, c, side));
  return conformal_quantile(stats, alpha);
}

LabelMask generalized_set(const ScoreImage& image, const CombinationFunction& c, Side side, double lambda) {
  std::vector<std::uint8_t> bits(image.size());
  if (side == Side::Inner) {
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = c.at_pixel(image, i) > lambda ? 1 : 0;
  } else {
    std::vector<double> negated(image.size());
    for (std::size_t i = 0; i < negated.size(); ++i) negated[i] = -image[i];
    const ScoreImage neg(image.dims(), std::move(negated));
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = c.at_pixel(neg, i) <= lambda ? 1 : 0;
  }
  return {image.dims(), std::move(bits)};
}

double risk_control_lambda(std::span<const double> taus, double alpha) {
  require_alpha(alpha);
  const auto sorted = sorted_stats(taus);
  const auto n = sorted.size();
  // (1/n) sum 1[tau_i > lambda] <= alpha - (1 - alpha)/n
  //   <=>  losses + 1 <= alpha (n + 1)  <=>  losses + 1 <= floor(alpha (n + 1))
  const auto budget = exact_floor_product(alpha, n + 1);
  double lambda_hat = kInf;
  for (const double candidate : sorted) {
    std::size_t losses = 0;
    for (const double t : sorted) losses += t > candidate ? 1 : 0;
    if (losses + 1 <= budget) {
      lambda_hat = candidate;
      break;
    }
  }
  const double quantile = conformal_quantile(taus, alpha);
  if (!(lambda_hat == quantile)) {
    throw InvariantError("risk-control threshold " + std::to_string(lambda_hat) +
                         " differs from conformal quantile " + std::to_string(quantile));
  }
  return lambda_hat;
}

}  // namespace cseg
