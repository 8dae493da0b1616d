#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "cseg/errors.hpp"
#include "cseg/harness.hpp"
#include "cseg/rng.hpp"

namespace cseg {

std::string to_string(ReportSide side) {
  switch (side) {
    case ReportSide::Inner:
      return "inner";
    case ReportSide::Outer:
      return "outer";
    case ReportSide::Joint:
      return "joint";
    case ReportSide::WeightedJoint:
      return "weighted_joint";
  }
  return "unknown";
}

void validate(const ValidationConfig& cfg) {
  if (cfg.n_cal == 0) throw ConfigError("n_cal must be positive");
  if (cfg.n_test == 0) throw ConfigError("n_test must be positive");
  if (cfg.n_trials == 0) throw ConfigError("n_trials must be positive");
  if (cfg.alphas.empty()) throw ConfigError("alphas must not be empty");
  for (const double a : cfg.alphas) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("every alpha must lie in (0, 1)");
  }
  if (cfg.weighting) {
    const auto [a1, a2] = *cfg.weighting;
    if (!(a1 > 0.0 && a1 < 1.0 && a2 > 0.0 && a2 < 1.0 && a1 + a2 < 1.0)) {
      throw ConfigError("weighting levels must lie in (0, 1) and sum below 1");
    }
  }
  validate(cfg.inner);
  validate(cfg.outer);
}

const SummaryRow& ValidationReport::find(double alpha, ReportSide side) const {
  for (const auto& row : summary) {
    if (row.side == side && std::abs(row.alpha - alpha) < 1e-12) return row;
  }
  throw ConfigError("no summary row for alpha " + std::to_string(alpha) + " side " + to_string(side));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kTrialStream = 0x545249414CULL;

// Transformed images, calibration statistics and coverage targets of one pair.
// For box transforms the coverage event is the chain through the ground-truth
// box union rather than inclusion in the mask itself.
struct PreparedRecord {
  ScoreImage f_inner;
  ScoreImage f_outer;
  LabelMask truth;
  double stat_inner = 0.0;
  double stat_outer = 0.0;
  std::optional<LabelMask> inner_target;  // B^I
  std::optional<LabelMask> outer_target;  // B^O
  double truth_diameter = 0.0;
  std::size_t truth_area = 0;
};

double max_over(const ScoreImage& image, const LabelMask& set, bool negate) {
  double best = -kInf;
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (set[i]) best = std::max(best, negate ? -image[i] : image[i]);
  }
  return best;
}

PreparedRecord prepare(const CalibrationRecord& record, const ValidationConfig& cfg) {
  const bool box_inner = cfg.inner.kind == TransformKind::BBoxInner;
  const bool box_outer = cfg.outer.kind == TransformKind::BBoxOuter;
  std::optional<BoxTargets> targets;
  if (box_inner || box_outer) targets = box_targets(record.truth);

  auto f_inner = apply_transform(record.scores, cfg.inner);
  auto f_outer = cfg.outer == cfg.inner ? f_inner : apply_transform(record.scores, cfg.outer);
  PreparedRecord p{std::move(f_inner), std::move(f_outer), record.truth, 0.0, 0.0, std::nullopt, std::nullopt, 0.0, 0};
  const auto background = complement(record.truth);

  if (box_inner) {
    const auto& region = cfg.box_inner_region == BoxInnerRegion::Target ? targets->inner_union
                                                                        : complement(targets->inner_union);
    p.stat_inner = max_over(p.f_inner, region, false);
    p.inner_target = targets->inner_union;
  } else {
    p.stat_inner = max_over(p.f_inner, background, false);
  }
  if (box_outer) {
    p.stat_outer = max_over(p.f_outer, targets->outer_union, true);
    p.outer_target = targets->outer_union;
  } else {
    p.stat_outer = max_over(p.f_outer, record.truth, true);
  }
  p.truth_diameter = diameter(record.truth);
  p.truth_area = count_ones(record.truth);
  return p;
}

struct SetOutcome {
  bool inner_ok = false;
  bool outer_ok = false;
  std::optional<double> inner_ratio;
  std::optional<double> outer_ratio;
  double under = 0.0;
  double over = 0.0;
  std::size_t area_inner = 0;
  std::size_t area_outer = 0;
};

SetOutcome evaluate(const PreparedRecord& p, double lambda_inner, double lambda_outer) {
  const ConfidenceSets sets{inner_set(p.f_inner, lambda_inner), outer_set(p.f_outer, lambda_outer)};
  SetOutcome out;
  if (p.inner_target) {
    out.inner_ok = is_subset(sets.inner, *p.inner_target) && is_subset(*p.inner_target, p.truth);
  } else {
    out.inner_ok = is_subset(sets.inner, p.truth);
  }
  if (p.outer_target) {
    out.outer_ok = is_subset(p.truth, *p.outer_target) && is_subset(*p.outer_target, sets.outer);
  } else {
    out.outer_ok = is_subset(p.truth, sets.outer);
  }
  const auto total = static_cast<double>(p.truth.size());
  if (p.truth_diameter > 0.0) {
    out.inner_ratio = diameter(sets.inner) / p.truth_diameter;
    out.outer_ratio = diameter(sets.outer) / p.truth_diameter;
  }
  out.under = static_cast<double>(count_difference(p.truth, sets.inner)) / total;
  out.over = static_cast<double>(count_difference(sets.outer, p.truth)) / total;
  out.area_inner = count_ones(sets.inner);
  out.area_outer = count_ones(sets.outer);
  return out;
}

// Running sums for one trial row.
struct RowAccumulator {
  std::size_t covered = 0;
  double inner_ratio_sum = 0.0;
  double outer_ratio_sum = 0.0;
  std::size_t ratio_count = 0;
  double under_sum = 0.0;
  double over_sum = 0.0;
  double area_inner_sum = 0.0;
  double area_outer_sum = 0.0;

  void add(const SetOutcome& o, bool covered_event) {
    covered += covered_event ? 1 : 0;
    if (o.inner_ratio) {
      inner_ratio_sum += *o.inner_ratio;
      outer_ratio_sum += *o.outer_ratio;
      ++ratio_count;
    }
    under_sum += o.under;
    over_sum += o.over;
    area_inner_sum += static_cast<double>(o.area_inner);
    area_outer_sum += static_cast<double>(o.area_outer);
  }

  TrialRow finish(std::size_t trial, double alpha, ReportSide side, std::size_t n_test, double li,
                  double lo) const {
    TrialRow row;
    row.trial = trial;
    row.alpha = alpha;
    row.side = side;
    row.coverage = static_cast<double>(covered) / static_cast<double>(n_test);
    row.lambda_inner = li;
    row.lambda_outer = lo;
    if (ratio_count > 0) {
      row.mean_inner_ratio = inner_ratio_sum / static_cast<double>(ratio_count);
      row.mean_outer_ratio = outer_ratio_sum / static_cast<double>(ratio_count);
    }
    row.under_prop = under_sum / static_cast<double>(n_test);
    row.over_prop = over_sum / static_cast<double>(n_test);
    row.mean_area_inner = area_inner_sum / static_cast<double>(n_test);
    row.mean_area_outer = area_outer_sum / static_cast<double>(n_test);
    row.covered = covered;
    return row;
  }
};

struct TrialResult {
  std::vector<TrialRow> rows;
  std::size_t ratio_excluded = 0;
};

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i - 1)));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

TrialResult run_trial(std::size_t trial, std::span<const PreparedRecord> prepared, const ValidationConfig& cfg) {
  Rng rng(derive_seed(derive_seed(cfg.seed, kTrialStream), trial));
  const auto order = shuffled_indices(prepared.size(), rng);
  const std::span<const std::size_t> cal(order.data(), cfg.n_cal);
  const std::span<const std::size_t> test(order.data() + cfg.n_cal, cfg.n_test);

  std::vector<double> inner_stats, outer_stats, joint_stats;
  for (const auto i : cal) {
    inner_stats.push_back(prepared[i].stat_inner);
    outer_stats.push_back(prepared[i].stat_outer);
    joint_stats.push_back(std::max(prepared[i].stat_inner, prepared[i].stat_outer));
  }

  TrialResult result;
  for (const auto i : test) result.ratio_excluded += prepared[i].truth_diameter > 0.0 ? 0 : 1;

  for (const double alpha : cfg.alphas) {
    const double li = conformal_quantile(inner_stats, alpha);
    const double lo = conformal_quantile(outer_stats, alpha);
    const double lj = conformal_quantile(joint_stats, alpha);
    RowAccumulator inner_acc, outer_acc, joint_acc;
    for (const auto i : test) {
      const auto marginal = evaluate(prepared[i], li, lo);
      inner_acc.add(marginal, marginal.inner_ok);
      outer_acc.add(marginal, marginal.outer_ok);
      const auto joint = evaluate(prepared[i], lj, lj);
      joint_acc.add(joint, joint.inner_ok && joint.outer_ok);
    }
    result.rows.push_back(inner_acc.finish(trial, alpha, ReportSide::Inner, cfg.n_test, li, lo));
    result.rows.push_back(outer_acc.finish(trial, alpha, ReportSide::Outer, cfg.n_test, li, lo));
    result.rows.push_back(joint_acc.finish(trial, alpha, ReportSide::Joint, cfg.n_test, lj, lj));
  }
  if (cfg.weighting) {
    const auto [a1, a2] = *cfg.weighting;
    const double li = conformal_quantile(inner_stats, a1);
    const double lo = conformal_quantile(outer_stats, a2);
    RowAccumulator acc;
    for (const auto i : test) {
      const auto o = evaluate(prepared[i], li, lo);
      acc.add(o, o.inner_ok && o.outer_ok);
    }
    result.rows.push_back(acc.finish(trial, a1 + a2, ReportSide::WeightedJoint, cfg.n_test, li, lo));
  }
  return result;
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

ValidationReport run_validation(std::span<const CalibrationRecord> dataset, const ValidationConfig& cfg) {
  validate(cfg);
  if (cfg.n_cal + cfg.n_test > dataset.size()) {
    throw ConfigError("dataset has " + std::to_string(dataset.size()) + " pairs, need n_cal + n_test = " +
                      std::to_string(cfg.n_cal + cfg.n_test));
  }

  std::vector<std::optional<PreparedRecord>> slots(dataset.size());
  parallel_for(dataset.size(), cfg.threads, [&](std::size_t i) { slots[i] = prepare(dataset[i], cfg); });
  std::vector<PreparedRecord> prepared;
  prepared.reserve(slots.size());
  for (auto& s : slots) prepared.push_back(std::move(*s));

  std::vector<TrialResult> results(cfg.n_trials);
  parallel_for(cfg.n_trials, cfg.threads, [&](std::size_t t) { results[t] = run_trial(t, prepared, cfg); });

  ValidationReport report;
  report.config = cfg;
  report.dataset_size = dataset.size();
  for (auto& r : results) {
    report.ratio_excluded += r.ratio_excluded;
    report.trials.insert(report.trials.end(), r.rows.begin(), r.rows.end());
  }

  // Summary rows in first-trial order; reductions run in trial order.
  const auto per_trial = results.front().rows.size();
  for (std::size_t k = 0; k < per_trial; ++k) {
    SummaryRow s;
    s.alpha = results.front().rows[k].alpha;
    s.side = results.front().rows[k].side;
    s.histogram.assign(kHistogramBins, 0);
    s.min_coverage = 1.0;
    s.max_coverage = 0.0;
    double cov = 0.0, inner_ratio = 0.0, outer_ratio = 0.0, under = 0.0, over = 0.0, ai = 0.0, ao = 0.0;
    std::size_t ratio_trials = 0;
    for (const auto& r : results) {
      const auto& row = r.rows[k];
      cov += row.coverage;
      s.min_coverage = std::min(s.min_coverage, row.coverage);
      s.max_coverage = std::max(s.max_coverage, row.coverage);
      if (row.mean_inner_ratio) {
        inner_ratio += *row.mean_inner_ratio;
        outer_ratio += *row.mean_outer_ratio;
        ++ratio_trials;
      }
      under += row.under_prop;
      over += row.over_prop;
      ai += row.mean_area_inner;
      ao += row.mean_area_outer;
      const auto bin = std::min(kHistogramBins - 1, row.covered * kHistogramBins / cfg.n_test);
      ++s.histogram[bin];
    }
    const auto trials = static_cast<double>(cfg.n_trials);
    s.mean_coverage = cov / trials;
    if (ratio_trials > 0) {
      s.mean_inner_ratio = inner_ratio / static_cast<double>(ratio_trials);
      s.mean_outer_ratio = outer_ratio / static_cast<double>(ratio_trials);
    }
    s.under_prop = under / trials;
    s.over_prop = over / trials;
    s.mean_area_inner = ai / trials;
    s.mean_area_outer = ao / trials;
    const double p = 1.0 - s.alpha;
    s.sigma_hat = std::sqrt(p * (1.0 - p) / (trials * static_cast<double>(cfg.n_test)));
    report.summary.push_back(std::move(s));
  }
  return report;
}

}  // namespace cseg
