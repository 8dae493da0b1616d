#include "cseg/combination.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cseg/errors.hpp"

namespace cseg {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double CombinationFunction::at_pixel(const ScoreImage& image, std::size_t index) const {
  std::vector<std::uint8_t> bits(image.size(), 0);
  bits.at(index) = 1;
  return combine(LabelMask(image.dims(), std::move(bits)), image);
}

double MaxCombination::combine(const LabelMask& set, const ScoreImage& image) const {
  require_same_dims(set.dims(), image.dims(), "max combination");
  double best = kNegInf;
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (set[i]) best = std::max(best, image[i]);
  }
  return best;
}

double MaxCombination::at_pixel(const ScoreImage& image, std::size_t index) const {
  return image[index];
}

double LogSumExpCombination::combine(const LabelMask& set, const ScoreImage& image) const {
  const double peak = MaxCombination{}.combine(set, image);
  if (!std::isfinite(peak)) return peak;
  double total = 0.0;
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (set[i]) total += std::exp(image[i] - peak);
  }
  // total >= 1 because the peak contributes exp(0).
  return peak + std::log(total);
}

double LogSumExpCombination::at_pixel(const ScoreImage& image, std::size_t index) const {
  return image[index];
}

double PositivePartSumCombination::combine(const LabelMask& set, const ScoreImage& image) const {
  require_same_dims(set.dims(), image.dims(), "positive-part sum combination");
  double total = 0.0;
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (set[i]) total += std::max(image[i], 0.0);
  }
  return total;
}

double PositivePartSumCombination::at_pixel(const ScoreImage& image, std::size_t index) const {
  return std::max(image[index], 0.0);
}

const std::vector<CombinationPtr>& registered_combinations() {
  static const std::vector<CombinationPtr> all = {
      std::make_shared<MaxCombination>(),
      std::make_shared<LogSumExpCombination>(),
      std::make_shared<PositivePartSumCombination>(),
  };
  return all;
}

CombinationPtr combination_by_name(const std::string& name) {
  for (const auto& c : registered_combinations()) {
    if (c->name() == name) return c;
  }
  throw ConfigError("unknown combination function '" + name + "'");
}

}  // namespace cseg
