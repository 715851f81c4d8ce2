#include "invstack/simplex.hpp"

#include <cmath>

#include "invstack/errors.hpp"

namespace invstack {

SimplexVector::SimplexVector(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw ArgumentError("simplex vector must be non-empty");
  double sum = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) throw ArgumentError("simplex vector entries must be finite and nonnegative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) throw ArgumentError("simplex vector entries must sum to 1");
}

SimplexVector SimplexVector::uniform(std::size_t n) {
  return SimplexVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

SimplexVector SimplexVector::vertex(std::size_t n, std::size_t i) {
  if (i >= n) throw ArgumentError("vertex index out of range");
  std::vector<double> p(n, 0.0);
  p[i] = 1.0;
  return SimplexVector(std::move(p));
}

}  // namespace invstack
