#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cseg/bbox_conformal.hpp"
#include "cseg/config.hpp"
#include "cseg/errors.hpp"
#include "cseg/harness.hpp"
#include "cseg/image_io.hpp"

namespace cseg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

struct PredictOptions {
  std::string thresholds;
  std::string scores;
  std::string truth;
  std::string mode;
};

struct BoxOptions {
  std::string mask;
};

RunConfig resolve_config(const GlobalOptions& g, bool required) {
  RunConfig cfg;
  if (!g.config.empty()) {
    cfg = load_run_config(g.config);
  } else if (required) {
    throw ConfigError("--config is required for this command");
  }
  if (g.seed) {
    cfg.seed = *g.seed;
    if (cfg.synth) cfg.synth->seed = *g.seed;
  }
  if (g.threads) cfg.threads = *g.threads;
  return cfg;
}

fs::path output_dir(const GlobalOptions& g, const RunConfig& cfg) {
  fs::path dir = ".";
  if (!g.out.empty()) {
    dir = g.out;
  } else if (cfg.output_dir) {
    dir = *cfg.output_dir;
  }
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw MissingInputError("cannot write " + path.string());
  f << text;
  if (!f) throw MissingInputError("write failed for " + path.string());
}

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

// Dataset from the manifest when given, otherwise generated from the synth section.
std::vector<CalibrationRecord> load_records(const RunConfig& cfg) {
  if (cfg.dataset) return load_dataset(*cfg.dataset);
  if (cfg.synth) return synth_generate(*cfg.synth);
  throw ConfigError("config needs either \"dataset\" or \"synth\"");
}

int cmd_synth(const GlobalOptions& g, std::ostream& out) {
  const auto cfg = resolve_config(g, true);
  SynthConfig synth = cfg.synth.value_or(SynthConfig{});
  synth.seed = cfg.seed;
  const auto records = synth_generate(synth);
  const auto dir = output_dir(g, cfg);

  json pairs = json::array();
  for (std::size_t i = 0; i < records.size(); ++i) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "%04zu", i);
    const std::string scores = std::string("score_") + stem + ".cseg";
    const std::string mask = std::string("mask_") + stem + ".pgm";
    write_score_image(records[i].scores, dir / scores, ScoreFormat::Raw);
    write_mask(records[i].truth, dir / mask);
    pairs.push_back({{"scores", scores}, {"mask", mask}});
  }
  const json manifest = {
      {"format", "cseg-manifest"}, {"version", 1}, {"seed", synth.seed}, {"synth", to_json(synth)}, {"pairs", pairs}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  out << "wrote " << records.size() << " pairs to " << dir.string() << "\n";
  return kOk;
}

int cmd_calibrate(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const auto cfg = resolve_config(g, true);
  auto records = load_records(cfg);
  if (records.empty()) throw EmptyInputError("calibration dataset lists no pairs");

  ThresholdSet thresholds;
  if (cfg.transform_inner.is_box() || cfg.transform_outer.is_box()) {
    if (cfg.mode != SetMode::Marginal) throw ConfigError("box transforms support marginal mode only");
    thresholds = bbox_calibrate(records, cfg.transform_inner, cfg.alpha1, cfg.alpha2, MaxCombination{},
                                cfg.box_inner_region);
  } else {
    if (cfg.mode == SetMode::Joint && !cfg.alpha_joint) {
      throw ConfigError("joint mode needs \"alpha_joint\"");
    }
    for (auto& r : records) cache_nonconformity(r, cfg.transform_inner, cfg.transform_outer);
    thresholds = calibrate(records, cfg.alpha1, cfg.alpha2, cfg.alpha_joint);
    thresholds.transform_inner = cfg.transform_inner;
    thresholds.transform_outer = cfg.transform_outer;
  }

  const auto dir = output_dir(g, cfg);
  const auto path = dir / "thresholds.json";
  write_text(path, to_json(thresholds).dump(2) + "\n");
  err << "calibrate: n=" << thresholds.n << " alpha1=" << format_number(thresholds.alpha1)
      << " lambda_inner=" << format_number(thresholds.lambda_inner)
      << " alpha2=" << format_number(thresholds.alpha2)
      << " lambda_outer=" << format_number(thresholds.lambda_outer);
  if (thresholds.lambda_joint) {
    err << " alpha_joint=" << format_number(*thresholds.alpha_joint)
        << " lambda_joint=" << format_number(*thresholds.lambda_joint);
  }
  err << "\n";
  out << path.string() << "\n";
  return kOk;
}

ThresholdSet read_thresholds(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open thresholds " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid thresholds JSON: " + std::string(e.what()));
  }
  return thresholds_from_json(j);
}

int cmd_predict(const GlobalOptions& g, const PredictOptions& p, std::ostream& out) {
  const auto cfg = resolve_config(g, false);
  if (p.thresholds.empty() || p.scores.empty()) throw ConfigError("predict needs --thresholds and --scores");
  const auto thresholds = read_thresholds(p.thresholds);
  SetMode mode = g.config.empty() ? SetMode::Marginal : cfg.mode;
  if (!p.mode.empty()) mode = parse_set_mode(p.mode);

  const auto logits = read_score_image(p.scores);
  std::optional<LabelMask> truth;
  if (!p.truth.empty()) {
    truth = read_mask(p.truth);
    require_same_dims(truth->dims(), logits.dims(), "predict");
  }

  ConfidenceSets sets{LabelMask(logits.dims(), false), LabelMask(logits.dims(), false)};
  if (thresholds.transform_inner.is_box() || thresholds.transform_outer.is_box()) {
    if (mode != SetMode::Marginal) throw ConfigError("box thresholds support marginal mode only");
    sets = bbox_sets(logits, thresholds);
  } else {
    const auto f_inner = apply_transform(logits, thresholds.transform_inner);
    const auto f_outer = apply_transform(logits, thresholds.transform_outer);
    sets = build_sets(f_inner, f_outer, thresholds, mode);
  }

  const auto dir = output_dir(g, cfg);
  write_mask(sets.inner, dir / "inner.pgm");
  write_mask(sets.outer, dir / "outer.pgm");
  out << "area_inner=" << count_ones(sets.inner) << "\n";
  out << "area_outer=" << count_ones(sets.outer) << "\n";
  if (truth) {
    const auto cov = evaluate_coverage(sets, *truth);
    out << "inner_ok=" << (cov.inner_ok ? "true" : "false") << "\n";
    out << "outer_ok=" << (cov.outer_ok ? "true" : "false") << "\n";
  }
  return kOk;
}

int cmd_validate(const GlobalOptions& g, std::ostream& out) {
  const auto cfg = resolve_config(g, true);
  const auto records = load_records(cfg);
  const auto report = run_validation(records, cfg.validation());
  const auto dir = output_dir(g, cfg);
  write_text(dir / "report.json", report_json(report));
  write_text(dir / "report.csv", report_csv(report));
  write_text(dir / "histogram.csv", histogram_csv(report));
  for (const auto& s : report.summary) {
    out << to_string(s.side) << " alpha=" << format_number(s.alpha) << " coverage=" << format_number(s.mean_coverage)
        << "\n";
  }
  return kOk;
}

json boxes_json(const BoxSet& boxes) {
  json a = json::array();
  for (const auto& b : boxes) a.push_back({b.row_min, b.row_max, b.col_min, b.col_max});
  return a;
}

int cmd_bbox_targets(const GlobalOptions& g, const BoxOptions& b, std::ostream& out) {
  const auto cfg = resolve_config(g, false);
  if (b.mask.empty()) throw ConfigError("bbox-targets needs --mask");
  const auto truth = read_mask(b.mask);
  const auto targets = box_targets(truth);
  const auto dir = output_dir(g, cfg);
  write_mask(targets.inner_union, dir / "inner_union.pgm");
  write_mask(targets.outer_union, dir / "outer_union.pgm");
  const json doc = {{"height", truth.dims().height()},
                    {"width", truth.dims().width()},
                    {"inner_boxes", boxes_json(targets.inner_boxes)},
                    {"outer_boxes", boxes_json(targets.outer_boxes)}};
  write_text(dir / "boxes.json", doc.dump(2) + "\n");
  out << "components=" << targets.inner_boxes.size() << "\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conformal inner/outer confidence sets for segmentation masks", "cseg"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config, "JSON run configuration");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--seed", g.seed, "seed override");
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)");

  PredictOptions p;
  BoxOptions b;
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset directory");
  auto* calibrate = app.add_subcommand("calibrate", "compute thresholds from a dataset");
  auto* predict = app.add_subcommand("predict", "build confidence sets for one score map");
  predict->add_option("--thresholds", p.thresholds, "thresholds JSON");
  predict->add_option("--scores", p.scores, "score map (raw or PFM)");
  predict->add_option("--truth", p.truth, "optional ground-truth mask");
  predict->add_option("--mode", p.mode, "marginal | joint | weighted-joint");
  auto* validate = app.add_subcommand("validate", "repeated split validation");
  auto* bbox = app.add_subcommand("bbox-targets", "dump box target rasters of a mask");
  bbox->add_option("--mask", b.mask, "ground-truth mask");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (synth->parsed()) return cmd_synth(g, out);
    if (calibrate->parsed()) return cmd_calibrate(g, out, err);
    if (predict->parsed()) return cmd_predict(g, p, out);
    if (validate->parsed()) return cmd_validate(g, out);
    if (bbox->parsed()) return cmd_bbox_targets(g, b, out);
  } catch (const MissingInputError& e) {
    err << "error: " << e.what() << "\n";
    return kMissingInput;
  } catch (const EmptyInputError& e) {
    err << "error: " << e.what() << "\n";
    return kEmptyCalibration;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kMissingInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kConfigError;
}

}  // namespace cseg::cli
