#include "ineq/weighted_cdf.hpp"

#include <cmath>

#include "ineq/error.hpp"

namespace ineq {

WeightedCDF::WeightedCDF(std::span<const double> values, std::span<const double> weights) {
  if (values.empty()) throw DomainError("weighted CDF needs at least one level");
  if (values.size() != weights.size()) throw DomainError("values and weights differ in length");

  levels_.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || !std::isfinite(weights[i]))
      throw DomainError("non-finite level or weight");
    if (weights[i] < 0.0) throw DomainError("negative weight");
    if (i > 0 && values[i] < values[i - 1]) throw DomainError("levels must be sorted ascending");
    total_ += weights[i];
    levels_.push_back(Level{values[i], weights[i], 0.0});
  }
  if (!(total_ > 0.0)) throw DomainError("total weight must be positive");

  // Accumulate from the top so the smallest level gets exactly 1.
  double above = 0.0;
  for (std::size_t i = levels_.size(); i-- > 0;) {
    above += levels_[i].weight;
    levels_[i].ccdf = above / total_;
  }
  levels_.front().ccdf = 1.0;
}

double WeightedCDF::mean() const {
  double sum = 0.0;
  for (const auto& level : levels_) sum += level.value * level.weight;
  return sum / total_;
}

}  // namespace ineq
