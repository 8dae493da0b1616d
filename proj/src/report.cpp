#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "cseg/harness.hpp"
#include "cseg/scores.hpp"

namespace cseg {

namespace {

using nlohmann::json;

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string opt_num(const std::optional<double>& x) { return x ? num(*x) : ""; }

json json_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

json json_opt(const std::optional<double>& x) { return x ? json_number(*x) : json(nullptr); }

json transform_json(const TransformSpec& t) {
  return {{"kind", to_string(t.kind)}, {"metric", to_string(t.metric)}, {"mask_threshold", t.mask_threshold}};
}

}  // namespace

std::string report_json(const ValidationReport& report) {
  const auto& cfg = report.config;
  json config = {
      {"n_cal", cfg.n_cal},
      {"n_test", cfg.n_test},
      {"n_trials", cfg.n_trials},
      {"alphas", cfg.alphas},
      {"transform_inner", transform_json(cfg.inner)},
      {"transform_outer", transform_json(cfg.outer)},
      {"box_inner_region", cfg.box_inner_region == BoxInnerRegion::Target ? "target" : "outside_target"},
      {"seed", cfg.seed},
  };
  config["weighting"] = cfg.weighting ? json::array({cfg.weighting->first, cfg.weighting->second}) : json(nullptr);

  json summary = json::array();
  for (const auto& s : report.summary) {
    const double nominal = 1.0 - s.alpha;
    summary.push_back({
        {"alpha", s.alpha},
        {"side", to_string(s.side)},
        {"nominal", nominal},
        {"mean_coverage", s.mean_coverage},
        {"min_coverage", s.min_coverage},
        {"max_coverage", s.max_coverage},
        {"sigma_hat", s.sigma_hat},
        {"mean_inner_ratio", json_opt(s.mean_inner_ratio)},
        {"mean_outer_ratio", json_opt(s.mean_outer_ratio)},
        {"under_prop", s.under_prop},
        {"over_prop", s.over_prop},
        {"mean_area_inner", s.mean_area_inner},
        {"mean_area_outer", s.mean_area_outer},
        {"histogram", s.histogram},
    });
  }

  json trials = json::array();
  for (const auto& r : report.trials) {
    trials.push_back({
        {"trial", r.trial},
        {"alpha", r.alpha},
        {"side", to_string(r.side)},
        {"coverage", r.coverage},
        {"lambda_inner", json_number(r.lambda_inner)},
        {"lambda_outer", json_number(r.lambda_outer)},
        {"mean_inner_ratio", json_opt(r.mean_inner_ratio)},
        {"mean_outer_ratio", json_opt(r.mean_outer_ratio)},
        {"under_prop", r.under_prop},
        {"over_prop", r.over_prop},
    });
  }

  const json doc = {
      {"config", config},
      {"dataset_size", report.dataset_size},
      {"ratio_excluded", report.ratio_excluded},
      {"histogram_bins", kHistogramBins},
      {"summary", summary},
      {"trials", trials},
  };
  return doc.dump(2) + "\n";
}

std::string report_csv(const ValidationReport& report) {
  std::ostringstream out;
  out << "trial,alpha,side,coverage,mean_inner_ratio,mean_outer_ratio,under_prop,over_prop\n";
  for (const auto& r : report.trials) {
    out << r.trial << ',' << num(r.alpha) << ',' << to_string(r.side) << ',' << num(r.coverage) << ','
        << opt_num(r.mean_inner_ratio) << ',' << opt_num(r.mean_outer_ratio) << ',' << num(r.under_prop) << ','
        << num(r.over_prop) << '\n';
  }
  for (const auto& s : report.summary) {
    out << "mean," << num(s.alpha) << ',' << to_string(s.side) << ',' << num(s.mean_coverage) << ','
        << opt_num(s.mean_inner_ratio) << ',' << opt_num(s.mean_outer_ratio) << ',' << num(s.under_prop) << ','
        << num(s.over_prop) << '\n';
  }
  return out.str();
}

std::string histogram_csv(const ValidationReport& report) {
  std::ostringstream out;
  out << "alpha,side,bin_left,bin_right,count\n";
  for (const auto& s : report.summary) {
    for (std::size_t b = 0; b < s.histogram.size(); ++b) {
      const double left = static_cast<double>(b) / static_cast<double>(kHistogramBins);
      const double right = static_cast<double>(b + 1) / static_cast<double>(kHistogramBins);
      out << num(s.alpha) << ',' << to_string(s.side) << ',' << num(left) << ',' << num(right) << ','
          << s.histogram[b] << '\n';
    }
  }
  return out.str();
}

}  // namespace cseg
