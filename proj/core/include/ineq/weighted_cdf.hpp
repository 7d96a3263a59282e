#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ineq {

// Complementary cumulative distribution over weighted levels:
//   ccdf(n) = sum_{k >= n} w_k / sum_k w_k
// with levels sorted ascending. Income tables use return counts as weights,
// energy data uses country populations.
class WeightedCDF {
 public:
  struct Level {
    double value;
    double weight;
    double ccdf;
  };

  // values must be non-decreasing, weights non-negative with a positive total.
  // Throws DomainError otherwise (including empty input).
  WeightedCDF(std::span<const double> values, std::span<const double> weights);

  std::span<const Level> levels() const noexcept { return levels_; }
  std::size_t size() const noexcept { return levels_.size(); }
  const Level& operator[](std::size_t i) const { return levels_[i]; }
  double total_weight() const noexcept { return total_; }

  // Weighted first moment sum v_k w_k / sum w_k.
  double mean() const;

 private:
  std::vector<Level> levels_;
  double total_ = 0.0;
};

}  // namespace ineq
