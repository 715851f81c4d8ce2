#include "invstack/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "invstack/errors.hpp"

namespace invstack {

double shift_invariant_l1(std::vector<double> d) {
  if (d.empty()) return 0.0;
  const std::size_t n = d.size();
  const std::size_t mid = n / 2;
  std::nth_element(d.begin(), d.begin() + mid, d.end());
  double median = d[mid];
  if (n % 2 == 0) {
    const double lower = *std::max_element(d.begin(), d.begin() + mid);
    median = 0.5 * (lower + median);
  }
  double s = 0.0;
  for (double v : d) s += std::abs(v - median);
  return s;
}

double logit_distance(const Matrix& v, const Matrix& v_hat) {
  if (v.rows() != v_hat.rows() || v.cols() != v_hat.cols() || v.empty()) {
    throw ArgumentError("logit_distance needs two matrices of the same shape");
  }
  double total = 0.0;
  std::vector<double> d(v.cols());
  for (std::size_t i = 0; i < v.rows(); ++i) {
    for (std::size_t j = 0; j < v.cols(); ++j) d[j] = v(i, j) - v_hat(i, j);
    total += shift_invariant_l1(d);
  }
  return total / static_cast<double>(v.rows() * v.cols());
}

double least_nonzero_measure(const GameInstance& game, const std::vector<SimplexVector>& queries) {
  if (queries.empty()) throw ArgumentError("least_nonzero_measure needs at least one query");
  double rho = 1.0;
  for (const SimplexVector& x : queries) {
    const SimplexVector y = quantal_response(game, x);
    for (double p : y.values()) {
      if (p > 0.0) rho = std::min(rho, p);
    }
  }
  return rho;
}

double multiplicative_ratio(const SimplexVector& y, const SimplexVector& y_hat) {
  if (y.size() != y_hat.size()) throw ArgumentError("distributions have different lengths");
  double eps = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (y[j] <= 0.0) {
      if (y_hat[j] > 0.0) throw SupportError("estimate has mass outside the reference support");
      continue;
    }
    const double r = y_hat[j] / y[j];
    eps = std::max(eps, 1.0 - r);
    if (r > 0.0) eps = std::max(eps, 1.0 - 1.0 / r);
  }
  return eps;
}

}  // namespace invstack
