#pragma once

// Independent reference computations used as test oracles. Nothing here calls
// into the library's numerics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "invstack/matrix.hpp"
#include "invstack/simplex.hpp"

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

inline Vec softmax(const Vec& z) {
  const double hi = *std::max_element(z.begin(), z.end());
  Vec out(z.size());
  double total = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) total += out[j] = std::exp(z[j] - hi);
  for (double& v : out) v /= total;
  return out;
}

inline Vec xt_v(const Vec& x, const invstack::Matrix& v) {
  Vec out(v.cols(), 0.0);
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t j = 0; j < v.cols(); ++j) out[j] += x[i] * v(i, j);
  return out;
}

inline Vec quantal(const invstack::Matrix& v, double lambda, const Vec& x) {
  Vec z = xt_v(x, v);
  for (double& s : z) s *= lambda;
  return softmax(z);
}

// Gauss-Jordan with full pivoting; nullopt if singular.
inline std::optional<Vec> solve(Mat a, Vec b) {
  const std::size_t n = b.size();
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pr = k, pc = k;
    for (std::size_t i = k; i < n; ++i)
      for (std::size_t j = k; j < n; ++j)
        if (std::abs(a[i][j]) > std::abs(a[pr][pc])) pr = i, pc = j;
    if (std::abs(a[pr][pc]) < 1e-11) return std::nullopt;
    std::swap(a[k], a[pr]);
    std::swap(b[k], b[pr]);
    for (auto& row : a) std::swap(row[k], row[pc]);
    std::swap(perm[k], perm[pc]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      const double f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  Vec x(n);
  for (std::size_t k = 0; k < n; ++k) x[perm[k]] = b[k] / a[k][k];
  return x;
}

// Row constraint a.x (sense) b with sense -1: <=, 0: =, +1: >=.
struct Row {
  Vec a;
  double b;
  int sense;
};

// Max c.x over {rows, x >= 0} by enumerating every basic solution. Returns
// nullopt when no vertex is feasible. Assumes the region is bounded.
inline std::optional<double> lp_by_vertices(const Vec& c, const std::vector<Row>& rows) {
  const std::size_t d = c.size();
  std::vector<Row> all = rows;
  for (std::size_t k = 0; k < d; ++k) {
    Vec e(d, 0.0);
    e[k] = 1.0;
    all.push_back({e, 0.0, +1});
  }
  const std::size_t total = all.size();
  std::optional<double> best;
  std::vector<bool> pick(total, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(d), true);
  std::sort(pick.begin(), pick.end(), std::greater<>());
  do {
    bool ok = true;
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (rows[r].sense == 0 && !pick[r]) ok = false;
    if (!ok) continue;
    Mat a;
    Vec b;
    for (std::size_t r = 0; r < total; ++r) {
      if (pick[r]) {
        a.push_back(all[r].a);
        b.push_back(all[r].b);
      }
    }
    const auto x = solve(a, b);
    if (!x) continue;
    for (const Row& r : all) {
      double lhs = 0.0;
      for (std::size_t k = 0; k < d; ++k) lhs += r.a[k] * (*x)[k];
      const double slack = 1e-9 * (1.0 + std::abs(r.b));
      if ((r.sense <= 0 && lhs > r.b + slack) || (r.sense >= 0 && lhs < r.b - slack)) ok = false;
    }
    if (!ok) continue;
    double val = 0.0;
    for (std::size_t k = 0; k < d; ++k) val += c[k] * (*x)[k];
    if (!best || val > *best) best = val;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

inline double l1_to(const Vec& d, double z) {
  double s = 0.0;
  for (double v : d) s += std::abs(v - z);
  return s;
}

// min_z sum |d_j - z| by successively refined grid scans (the objective is
// convex, so each refinement brackets the minimizer).
inline double l1_min_grid(const Vec& d) {
  double lo = *std::min_element(d.begin(), d.end());
  double hi = *std::max_element(d.begin(), d.end());
  double best = l1_to(d, lo);
  double arg = lo;
  for (int pass = 0; pass < 12 && hi > lo; ++pass) {
    const int steps = 200;
    const double h = (hi - lo) / steps;
    for (int s = 0; s <= steps; ++s) {
      const double z = lo + s * h;
      const double v = l1_to(d, z);
      if (v < best) best = v, arg = z;
    }
    lo = arg - 2 * h;
    hi = arg + 2 * h;
  }
  return best;
}

inline Vec random_simplex(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> ex(1.0);
  Vec x(n);
  double total = 0.0;
  for (double& v : x) total += v = ex(rng);
  for (double& v : x) v /= total;
  return x;
}

inline invstack::Matrix random_matrix(std::mt19937_64& rng, std::size_t m, std::size_t n, double lo = 0.0,
                                      double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  invstack::Matrix a(m, n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = u(rng);
  return a;
}

// V + c (x) 1_n + Xi with sum |Xi_ij| == eps; half the time Xi sits on one entry.
inline invstack::Matrix perturb(std::mt19937_64& rng, const invstack::Matrix& v, double eps) {
  const std::size_t m = v.rows(), n = v.cols();
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  invstack::Matrix out = v;
  for (std::size_t i = 0; i < m; ++i) {
    const double c = 3.0 * u(rng);
    for (std::size_t j = 0; j < n; ++j) out(i, j) += c;
  }
  Mat xi(m, Vec(n, 0.0));
  if (rng() % 2 == 0) {
    xi[rng() % m][rng() % n] = u(rng) < 0 ? -1.0 : 1.0;
  } else {
    for (auto& row : xi)
      for (double& x : row) x = u(rng);
  }
  double norm = 0.0;
  for (const auto& row : xi)
    for (double x : row) norm += std::abs(x);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) += eps * xi[i][j] / norm;
  return out;
}

inline std::size_t argmax_lowest(const Vec& z) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < z.size(); ++j)
    if (z[j] > z[best]) best = j;
  return best;
}

// Grid over the simplex for m = 2 or 3: the best leader value against a
// follower who breaks exact ties in the leader's favour. Returns a lower
// estimate of the SSE value that approaches it as `steps` grows.
inline double sse_grid(const invstack::Matrix& u, const invstack::Matrix& v, int steps) {
  const std::size_t m = v.rows();
  double best = -std::numeric_limits<double>::infinity();
  auto visit = [&](const Vec& x) {
    const Vec fv = xt_v(x, v);
    const Vec lv = xt_v(x, u);
    const double top = *std::max_element(fv.begin(), fv.end());
    for (std::size_t j = 0; j < fv.size(); ++j)
      if (fv[j] >= top - 1e-12) best = std::max(best, lv[j]);
  };
  if (m == 2) {
    for (int a = 0; a <= steps; ++a) visit({double(a) / steps, 1.0 - double(a) / steps});
  } else {
    for (int a = 0; a <= steps; ++a)
      for (int b = 0; a + b <= steps; ++b)
        visit({double(a) / steps, double(b) / steps, double(steps - a - b) / steps});
  }
  return best;
}

struct Fit {
  double slope, intercept, r2;
};

inline Fit least_squares(const Vec& x, const Vec& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) mx += x[k], my += y[k];
  mx /= n, my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx, syy > 0 ? sxy * sxy / (sxx * syy) : 1.0};
}

}  // namespace oracle
