#include "cseg/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include "cseg/errors.hpp"
#include "cseg/image_io.hpp"

namespace cseg {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + ": expected a JSON object");
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError(what + ": unknown key \"" + it.key() + "\"");
  }
}

double get_number(const json& j, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError("\"" + key + "\" must be a number");
  return v.get<double>();
}

// Accepts numbers and the strings "inf" / "-inf".
double get_extended(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ConfigError("\"" + key + "\" must be a number, \"inf\" or \"-inf\"");
}

json extended(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

std::uint64_t get_unsigned(const json& j, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_number_unsigned()) {
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
    throw ConfigError("\"" + key + "\" must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::int64_t get_integer(const json& j, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError("\"" + key + "\" must be an integer");
  return v.get<std::int64_t>();
}

std::string get_string(const json& j, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_string()) throw ConfigError("\"" + key + "\" must be a string");
  return v.get<std::string>();
}

double get_alpha(const json& j, const std::string& key) {
  const double a = get_number(j, key);
  if (!(a > 0.0 && a < 1.0)) throw ConfigError("\"" + key + "\" must lie strictly between 0 and 1");
  return a;
}

std::pair<double, double> get_weighting(const json& v) {
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  if (v.is_object()) {
    reject_unknown(v, {"alpha1", "alpha2"}, "weighting");
    if (v.contains("alpha1") && v.contains("alpha2")) return {get_alpha(v, "alpha1"), get_alpha(v, "alpha2")};
  }
  throw ConfigError("\"weighting\" must be [alpha1, alpha2] or {\"alpha1\": .., \"alpha2\": ..}");
}

BoxInnerRegion parse_region(const std::string& name) {
  if (name == "target") return BoxInnerRegion::Target;
  if (name == "outside_target") return BoxInnerRegion::OutsideTarget;
  throw ConfigError("unknown box_inner_region \"" + name + "\"");
}

void apply_preset(RunConfig& cfg, const std::string& name) {
  if (name == "paper-90") {
    cfg.transform_inner = {TransformKind::Sigmoid};
    cfg.transform_outer = {TransformKind::SignedDistance, Metric::Euclidean};
    cfg.alpha1 = cfg.alpha2 = 0.1;
    cfg.alphas = {0.1};
    cfg.mode = SetMode::Marginal;
  } else if (name == "weighted-joint-90") {
    cfg.transform_inner = {TransformKind::Sigmoid};
    cfg.transform_outer = {TransformKind::SignedDistance, Metric::Euclidean};
    cfg.alpha1 = 0.02;
    cfg.alpha2 = 0.08;
    cfg.alpha_joint = 0.1;
    cfg.alphas = {0.1};
    cfg.weighting = std::pair{0.02, 0.08};
    cfg.mode = SetMode::WeightedJoint;
  } else if (name == "bbox-90") {
    cfg.transform_inner = {TransformKind::BBoxInner, Metric::Chessboard};
    cfg.transform_outer = {TransformKind::BBoxOuter, Metric::Chessboard};
    cfg.alpha1 = cfg.alpha2 = 0.1;
    cfg.alphas = {0.1};
    cfg.mode = SetMode::Marginal;
  } else {
    throw ConfigError("unknown preset \"" + name + "\"");
  }
  cfg.preset = name;
}

}  // namespace

json to_json(const TransformSpec& spec) {
  return {{"kind", to_string(spec.kind)}, {"metric", to_string(spec.metric)}, {"mask_threshold", spec.mask_threshold}};
}

TransformSpec transform_from_json(const json& j) {
  if (j.is_string()) {
    TransformSpec spec;
    spec.kind = parse_transform_kind(j.get<std::string>());
    if (spec.is_box()) spec.metric = Metric::Chessboard;
    return spec;
  }
  require_object(j, "transform");
  reject_unknown(j, {"kind", "metric", "mask_threshold"}, "transform");
  if (!j.contains("kind")) throw ConfigError("transform: missing \"kind\"");
  TransformSpec spec;
  spec.kind = parse_transform_kind(get_string(j, "kind"));
  if (spec.is_box()) spec.metric = Metric::Chessboard;
  if (j.contains("metric")) spec.metric = parse_metric(get_string(j, "metric"));
  if (j.contains("mask_threshold")) spec.mask_threshold = get_number(j, "mask_threshold");
  validate(spec);
  return spec;
}

json to_json(const ThresholdSet& t) {
  json j = {
      {"alpha1", t.alpha1},
      {"lambda_inner", extended(t.lambda_inner)},
      {"alpha2", t.alpha2},
      {"lambda_outer", extended(t.lambda_outer)},
      {"n", t.n},
      {"transform_inner", to_json(t.transform_inner)},
      {"transform_outer", to_json(t.transform_outer)},
  };
  j["alpha_joint"] = t.alpha_joint ? json(*t.alpha_joint) : json(nullptr);
  j["lambda_joint"] = t.lambda_joint ? extended(*t.lambda_joint) : json(nullptr);
  return j;
}

ThresholdSet thresholds_from_json(const json& j) {
  require_object(j, "thresholds");
  reject_unknown(j,
                 {"alpha1", "lambda_inner", "alpha2", "lambda_outer", "alpha_joint", "lambda_joint", "n",
                  "transform_inner", "transform_outer"},
                 "thresholds");
  for (const char* key : {"alpha1", "lambda_inner", "alpha2", "lambda_outer", "n", "transform_inner",
                          "transform_outer"}) {
    if (!j.contains(key)) throw ConfigError(std::string("thresholds: missing \"") + key + "\"");
  }
  ThresholdSet t;
  t.alpha1 = get_alpha(j, "alpha1");
  t.alpha2 = get_alpha(j, "alpha2");
  t.lambda_inner = get_extended(j.at("lambda_inner"), "lambda_inner");
  t.lambda_outer = get_extended(j.at("lambda_outer"), "lambda_outer");
  t.n = get_unsigned(j, "n");
  t.transform_inner = transform_from_json(j.at("transform_inner"));
  t.transform_outer = transform_from_json(j.at("transform_outer"));
  if (j.contains("alpha_joint") && !j.at("alpha_joint").is_null()) t.alpha_joint = get_alpha(j, "alpha_joint");
  if (j.contains("lambda_joint") && !j.at("lambda_joint").is_null()) {
    t.lambda_joint = get_extended(j.at("lambda_joint"), "lambda_joint");
  }
  return t;
}

json to_json(const SynthConfig& cfg) {
  return {
      {"height", cfg.dims.height()},
      {"width", cfg.dims.width()},
      {"n_images", cfg.n_images},
      {"disks_min", cfg.disks_min},
      {"disks_max", cfg.disks_max},
      {"radius_min", cfg.radius_min},
      {"radius_max", cfg.radius_max},
      {"noise_amplitude", cfg.noise_amplitude},
      {"correlation_length", cfg.correlation_length},
      {"link_sharpness", cfg.link_sharpness},
  };
}

SynthConfig synth_from_json(const json& j) {
  require_object(j, "synth");
  reject_unknown(j,
                 {"height", "width", "n_images", "disks_min", "disks_max", "radius_min", "radius_max",
                  "noise_amplitude", "correlation_length", "link_sharpness"},
                 "synth");
  SynthConfig cfg;
  std::int64_t h = cfg.dims.height();
  std::int64_t w = cfg.dims.width();
  if (j.contains("height")) h = get_integer(j, "height");
  if (j.contains("width")) w = get_integer(j, "width");
  if (h <= 0 || w <= 0 || h > 4096 || w > 4096) throw ConfigError("synth: height and width must lie in [1, 4096]");
  cfg.dims = GridDims(h, w);
  if (j.contains("n_images")) cfg.n_images = get_unsigned(j, "n_images");
  if (j.contains("disks_min")) cfg.disks_min = get_integer(j, "disks_min");
  if (j.contains("disks_max")) cfg.disks_max = get_integer(j, "disks_max");
  if (j.contains("radius_min")) cfg.radius_min = get_number(j, "radius_min");
  if (j.contains("radius_max")) cfg.radius_max = get_number(j, "radius_max");
  if (j.contains("noise_amplitude")) cfg.noise_amplitude = get_number(j, "noise_amplitude");
  if (j.contains("correlation_length")) cfg.correlation_length = get_number(j, "correlation_length");
  if (j.contains("link_sharpness")) cfg.link_sharpness = get_number(j, "link_sharpness");
  validate(cfg);
  return cfg;
}

std::string to_string(SetMode mode) {
  switch (mode) {
    case SetMode::Marginal:
      return "marginal";
    case SetMode::Joint:
      return "joint";
    case SetMode::WeightedJoint:
      return "weighted-joint";
  }
  return "marginal";
}

SetMode parse_set_mode(const std::string& name) {
  if (name == "marginal") return SetMode::Marginal;
  if (name == "joint") return SetMode::Joint;
  if (name == "weighted-joint") return SetMode::WeightedJoint;
  throw ConfigError("unknown mode \"" + name + "\" (expected marginal, joint or weighted-joint)");
}

ValidationConfig RunConfig::validation() const {
  ValidationConfig v;
  v.n_cal = n_cal;
  v.n_test = n_test;
  v.n_trials = n_trials;
  v.alphas = alphas;
  v.inner = transform_inner;
  v.outer = transform_outer;
  v.weighting = weighting;
  v.box_inner_region = box_inner_region;
  v.seed = seed;
  v.threads = threads;
  return v;
}

std::vector<std::string> preset_names() { return {"paper-90", "weighted-joint-90", "bbox-90"}; }

RunConfig parse_run_config(const json& j, const std::filesystem::path& base_dir) {
  require_object(j, "config");
  reject_unknown(j,
                 {"preset", "synth", "dataset", "transform_inner", "transform_outer", "alpha1", "alpha2",
                  "alpha_joint", "alphas", "mode", "validation", "box_inner_region", "output_dir", "seed",
                  "threads"},
                 "config");
  RunConfig cfg;
  if (j.contains("preset")) apply_preset(cfg, get_string(j, "preset"));

  if (j.contains("synth")) cfg.synth = synth_from_json(j.at("synth"));
  if (j.contains("dataset")) {
    std::filesystem::path p = get_string(j, "dataset");
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    cfg.dataset = p;
  }
  if (j.contains("transform_inner")) cfg.transform_inner = transform_from_json(j.at("transform_inner"));
  if (j.contains("transform_outer")) cfg.transform_outer = transform_from_json(j.at("transform_outer"));
  if (j.contains("alpha1")) cfg.alpha1 = get_alpha(j, "alpha1");
  if (j.contains("alpha2")) cfg.alpha2 = get_alpha(j, "alpha2");
  if (j.contains("alpha_joint")) cfg.alpha_joint = get_alpha(j, "alpha_joint");
  if (j.contains("alphas")) {
    const auto& a = j.at("alphas");
    if (!a.is_array() || a.empty()) throw ConfigError("\"alphas\" must be a non-empty array");
    cfg.alphas.clear();
    for (const auto& x : a) {
      if (!x.is_number() || !(x.get<double>() > 0.0 && x.get<double>() < 1.0)) {
        throw ConfigError("\"alphas\" entries must lie strictly between 0 and 1");
      }
      cfg.alphas.push_back(x.get<double>());
    }
  }
  if (j.contains("mode")) cfg.mode = parse_set_mode(get_string(j, "mode"));
  if (j.contains("validation")) {
    const auto& v = j.at("validation");
    require_object(v, "validation");
    reject_unknown(v, {"n_cal", "n_test", "n_trials", "weighting"}, "validation");
    if (v.contains("n_cal")) cfg.n_cal = get_unsigned(v, "n_cal");
    if (v.contains("n_test")) cfg.n_test = get_unsigned(v, "n_test");
    if (v.contains("n_trials")) cfg.n_trials = get_unsigned(v, "n_trials");
    if (v.contains("weighting")) {
      if (v.at("weighting").is_null()) {
        cfg.weighting.reset();
      } else {
        cfg.weighting = get_weighting(v.at("weighting"));
      }
    }
  }
  if (j.contains("box_inner_region")) cfg.box_inner_region = parse_region(get_string(j, "box_inner_region"));
  if (j.contains("output_dir")) {
    std::filesystem::path p = get_string(j, "output_dir");
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    cfg.output_dir = p;
  }
  if (j.contains("seed")) cfg.seed = get_unsigned(j, "seed");
  if (j.contains("threads")) cfg.threads = get_unsigned(j, "threads");

  if (cfg.mode == SetMode::WeightedJoint) {
    if (!cfg.alpha_joint) cfg.alpha_joint = cfg.alpha1 + cfg.alpha2;
    if (cfg.alpha1 + cfg.alpha2 > *cfg.alpha_joint) {
      throw ConfigError("weighted-joint mode requires alpha1 + alpha2 <= alpha_joint");
    }
  }
  if (cfg.weighting && cfg.weighting->first + cfg.weighting->second >= 1.0) {
    throw ConfigError("weighting levels must sum to less than 1");
  }
  if (cfg.synth) cfg.synth->seed = cfg.seed;
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return parse_run_config(j, path.parent_path());
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open manifest " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("invalid JSON in manifest " + path.string() + ": " + e.what());
  }
  if (!j.is_object() || j.value("format", std::string()) != "cseg-manifest" || !j.contains("pairs") ||
      !j.at("pairs").is_array()) {
    throw FormatError("not a cseg manifest: " + path.string());
  }
  const auto base = path.parent_path();
  std::vector<ManifestEntry> out;
  for (const auto& p : j.at("pairs")) {
    if (!p.is_object() || !p.contains("scores") || !p.contains("mask") || !p.at("scores").is_string() ||
        !p.at("mask").is_string()) {
      throw FormatError("manifest pair must have string \"scores\" and \"mask\"");
    }
    out.push_back({base / p.at("scores").get<std::string>(), base / p.at("mask").get<std::string>()});
  }
  return out;
}

std::vector<CalibrationRecord> load_dataset(const std::filesystem::path& manifest) {
  std::vector<CalibrationRecord> out;
  for (const auto& entry : read_manifest(manifest)) {
    auto scores = read_score_image(entry.scores);
    auto mask = read_mask(entry.mask);
    if (scores.dims() != mask.dims()) {
      throw ShapeError("score/mask size mismatch for " + entry.scores.string());
    }
    out.push_back({std::move(scores), std::move(mask), std::nullopt});
  }
  return out;
}

}  // namespace cseg
