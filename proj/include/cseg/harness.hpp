#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cseg/bbox_conformal.hpp"
#include "cseg/conformal.hpp"

namespace cseg {

// ---------------------------------------------------------------------------
// Synthetic data

/// Random-disk ground truths with logits = link_sharpness * signed distance to
/// the truth plus a smooth Gaussian noise field. Pairs are i.i.d., hence
/// exchangeable.
struct SynthConfig {
  GridDims dims{64, 64};
  std::size_t n_images = 400;
  std::int64_t disks_min = 1;
  std::int64_t disks_max = 3;
  double radius_min = 4.0;
  double radius_max = 12.0;
  // Standard deviation of the noise field at every pixel.
  double noise_amplitude = 6.0;
  // Gaussian smoothing sigma in pixels; 0 gives white noise.
  double correlation_length = 4.0;
  double link_sharpness = 1.0;
  std::uint64_t seed = 1;
};

/// Throws ConfigError on inconsistent ranges.
void validate(const SynthConfig& cfg);

/// Deterministic in `cfg`: image i draws from its own stream derived from the
/// seed. Logits are rounded to float so that file round-trips are exact.
[[nodiscard]] std::vector<CalibrationRecord> synth_generate(const SynthConfig& cfg);

// ---------------------------------------------------------------------------
// Per-image metrics

struct CoverageResult {
  bool inner_ok = false;  // I is contained in the truth
  bool outer_ok = false;  // the truth is contained in O
};

[[nodiscard]] CoverageResult evaluate_coverage(const ConfidenceSets& sets, const LabelMask& truth);

/// Largest Euclidean distance between set pixel centers; 0 for empty sets and
/// singletons.
[[nodiscard]] double diameter(const LabelMask& mask);

struct EfficiencyMetrics {
  // diameter(set) / diameter(truth); absent when the truth diameter is 0.
  std::optional<double> inner_ratio;
  std::optional<double> outer_ratio;
  double under_coverage = 0.0;  // |truth \ I| / |V|
  double over_coverage = 0.0;   // |O \ truth| / |V|
};

[[nodiscard]] EfficiencyMetrics efficiency_metrics(const ConfidenceSets& sets, const LabelMask& truth);

// ---------------------------------------------------------------------------
// Repeated split validation

struct ValidationConfig {
  std::size_t n_cal = 200;
  std::size_t n_test = 200;
  std::size_t n_trials = 300;
  std::vector<double> alphas = {0.1};
  TransformSpec inner{TransformKind::Sigmoid};
  TransformSpec outer{TransformKind::SignedDistance, Metric::Euclidean};
  // (alpha1, alpha2) for joint sets built from marginal thresholds.
  std::optional<std::pair<double, double>> weighting;
  BoxInnerRegion box_inner_region = BoxInnerRegion::Target;
  std::uint64_t seed = 1;
  // Worker threads for trials; 0 picks the hardware concurrency.
  std::size_t threads = 1;
};

void validate(const ValidationConfig& cfg);

enum class ReportSide { Inner, Outer, Joint, WeightedJoint };

[[nodiscard]] std::string to_string(ReportSide side);

/// One (trial, alpha, side) row.
struct TrialRow {
  std::size_t trial = 0;
  double alpha = 0.0;
  ReportSide side = ReportSide::Inner;
  double coverage = 0.0;
  double lambda_inner = 0.0;
  double lambda_outer = 0.0;
  // Means over test images; ratios skip images whose truth diameter is 0.
  std::optional<double> mean_inner_ratio;
  std::optional<double> mean_outer_ratio;
  double under_prop = 0.0;
  double over_prop = 0.0;
  double mean_area_inner = 0.0;
  double mean_area_outer = 0.0;
  std::size_t covered = 0;  // test images on which the side's event held
};

/// Aggregate over trials for one (alpha, side).
struct SummaryRow {
  double alpha = 0.0;
  ReportSide side = ReportSide::Inner;
  double mean_coverage = 0.0;
  double min_coverage = 0.0;
  double max_coverage = 0.0;
  // Binomial Monte Carlo standard error at the nominal level 1 - alpha over
  // n_trials * n_test draws.
  double sigma_hat = 0.0;
  std::optional<double> mean_inner_ratio;
  std::optional<double> mean_outer_ratio;
  double under_prop = 0.0;
  double over_prop = 0.0;
  double mean_area_inner = 0.0;
  double mean_area_outer = 0.0;
  std::vector<std::size_t> histogram;  // counts of per-trial coverage in equal bins over [0, 1]
};

struct ValidationReport {
  ValidationConfig config;
  std::size_t dataset_size = 0;
  // Test draws excluded from ratio averages because the truth diameter is 0.
  std::size_t ratio_excluded = 0;
  std::vector<TrialRow> trials;
  std::vector<SummaryRow> summary;

  [[nodiscard]] const SummaryRow& find(double alpha, ReportSide side) const;
};

inline constexpr std::size_t kHistogramBins = 100;

/// Throws ConfigError when the dataset is smaller than n_cal + n_test.
[[nodiscard]] ValidationReport run_validation(std::span<const CalibrationRecord> dataset,
                                              const ValidationConfig& cfg);

// Serialization. Output is a pure function of the report.
[[nodiscard]] std::string report_json(const ValidationReport& report);
[[nodiscard]] std::string report_csv(const ValidationReport& report);
[[nodiscard]] std::string histogram_csv(const ValidationReport& report);

}  // namespace cseg
