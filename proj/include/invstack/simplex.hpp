#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace invstack {

/// A probability vector: nonnegative entries summing to one (within 1e-9).
class SimplexVector {
 public:
  static constexpr double kSumTolerance = 1e-9;

  SimplexVector() = default;
  // Validates; throws ArgumentError on negative entries or a bad sum.
  explicit SimplexVector(std::vector<double> probs);

  static SimplexVector uniform(std::size_t n);
  static SimplexVector vertex(std::size_t n, std::size_t i);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t j) const { return probs_[j]; }
  std::span<const double> values() const { return probs_; }
  const std::vector<double>& vec() const { return probs_; }

  friend bool operator==(const SimplexVector&, const SimplexVector&) = default;

 private:
  std::vector<double> probs_;
};

}  // namespace invstack
