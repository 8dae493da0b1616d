#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cseg/harness.hpp"

namespace cseg {

// JSON mappings. Parsers reject unknown keys and wrong types with ConfigError.

[[nodiscard]] nlohmann::json to_json(const TransformSpec& spec);
[[nodiscard]] TransformSpec transform_from_json(const nlohmann::json& j);

/// Infinite thresholds are written as the strings "inf" / "-inf"; an absent
/// joint threshold is null.
[[nodiscard]] nlohmann::json to_json(const ThresholdSet& t);
[[nodiscard]] ThresholdSet thresholds_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::json to_json(const SynthConfig& cfg);
/// The seed is not part of the synth section; callers set it.
[[nodiscard]] SynthConfig synth_from_json(const nlohmann::json& j);

[[nodiscard]] std::string to_string(SetMode mode);
[[nodiscard]] SetMode parse_set_mode(const std::string& name);

/// Top-level run configuration shared by all CLI subcommands.
struct RunConfig {
  std::optional<std::string> preset;
  std::optional<SynthConfig> synth;
  std::optional<std::filesystem::path> dataset;  // manifest.json
  TransformSpec transform_inner{TransformKind::Sigmoid};
  TransformSpec transform_outer{TransformKind::SignedDistance, Metric::Euclidean};
  double alpha1 = 0.1;
  double alpha2 = 0.1;
  std::optional<double> alpha_joint;
  std::vector<double> alphas = {0.1};
  SetMode mode = SetMode::Marginal;
  std::size_t n_cal = 200;
  std::size_t n_test = 200;
  std::size_t n_trials = 300;
  std::optional<std::pair<double, double>> weighting;
  BoxInnerRegion box_inner_region = BoxInnerRegion::Target;
  std::optional<std::filesystem::path> output_dir;
  std::uint64_t seed = 1;
  std::size_t threads = 1;

  [[nodiscard]] ValidationConfig validation() const;
};

/// Names accepted by the "preset" key.
[[nodiscard]] std::vector<std::string> preset_names();

/// Presets are applied first, explicit keys override them. Relative dataset
/// paths resolve against `base_dir`.
[[nodiscard]] RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
/// Reads and parses a config file. Missing file -> MissingInputError, invalid
/// JSON or schema violation -> ConfigError.
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path& path);

// Dataset manifest: {"format": "cseg-manifest", "version": 1,
//   "pairs": [{"scores": "...", "mask": "..."}, ...], "synth": {...}?}
// Pair paths are relative to the manifest's directory.
struct ManifestEntry {
  std::filesystem::path scores;
  std::filesystem::path mask;
};

[[nodiscard]] std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
/// Loads every pair listed in a manifest.
[[nodiscard]] std::vector<CalibrationRecord> load_dataset(const std::filesystem::path& manifest);

}  // namespace cseg
