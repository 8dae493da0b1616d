#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cseg/grid.hpp"

namespace cseg {

/// Set-to-scalar aggregator C(A, X). Implementations must be increasing:
/// C({v}, X) <= C(A, X) whenever v is in A.
class CombinationFunction {
 public:
  virtual ~CombinationFunction() = default;

  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual double combine(const LabelMask& set, const ScoreImage& image) const = 0;
  /// C({v}, X). The default builds the singleton mask; subclasses override
  /// with a closed form.
  [[nodiscard]] virtual double at_pixel(const ScoreImage& image, std::size_t index) const;
};

/// max over A of X(v); -inf for the empty set.
class MaxCombination final : public CombinationFunction {
 public:
  [[nodiscard]] std::string name() const override { return "max"; }
  [[nodiscard]] double combine(const LabelMask& set, const ScoreImage& image) const override;
  [[nodiscard]] double at_pixel(const ScoreImage& image, std::size_t index) const override;
};

/// log sum over A of exp X(v); -inf for the empty set.
class LogSumExpCombination final : public CombinationFunction {
 public:
  [[nodiscard]] std::string name() const override { return "logsumexp"; }
  [[nodiscard]] double combine(const LabelMask& set, const ScoreImage& image) const override;
  [[nodiscard]] double at_pixel(const ScoreImage& image, std::size_t index) const override;
};

/// sum over A of max(X(v), 0); zero for the empty set.
class PositivePartSumCombination final : public CombinationFunction {
 public:
  [[nodiscard]] std::string name() const override { return "positive_sum"; }
  [[nodiscard]] double combine(const LabelMask& set, const ScoreImage& image) const override;
  [[nodiscard]] double at_pixel(const ScoreImage& image, std::size_t index) const override;
};

using CombinationPtr = std::shared_ptr<const CombinationFunction>;

[[nodiscard]] const std::vector<CombinationPtr>& registered_combinations();
/// Throws ConfigError for unknown names.
[[nodiscard]] CombinationPtr combination_by_name(const std::string& name);

}  // namespace cseg
