#include "invstack/equilibria.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <string>

#include "invstack/errors.hpp"
#include "invstack/numerics.hpp"

namespace invstack {

namespace {

// LP solutions may sit a hair outside the simplex; clip and renormalize.
SimplexVector to_simplex(std::span<const double> x) {
  std::vector<double> p(x.begin(), x.end());
  double s = 0.0;
  for (double& v : p) {
    v = std::max(v, 0.0);
    s += v;
  }
  for (double& v : p) v /= s;
  return SimplexVector(std::move(p));
}

// Rows x^T V (e_j - e_k) >= margin for every k != j, plus sum(x) = 1.
// When `with_margin` is set, a trailing free variable sigma enters each row
// with coefficient -1 and is the objective.
LinearProgram induction_lp(const Matrix& v, std::size_t j, bool with_margin) {
  const std::size_t m = v.rows(), n = v.cols();
  const std::size_t nvars = m + (with_margin ? 1 : 0);
  const std::size_t nrows = (n - 1) + 1;
  LinearProgram lp;
  lp.objective.assign(nvars, 0.0);
  lp.constraints = Matrix(nrows, nvars);
  lp.bounds.assign(nrows, 0.0);
  lp.senses.assign(nrows, Sense::kGreaterEqual);
  std::size_t r = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == j) continue;
    for (std::size_t i = 0; i < m; ++i) lp.constraints(r, i) = v(i, j) - v(i, k);
    if (with_margin) lp.constraints(r, m) = -1.0;
    ++r;
  }
  for (std::size_t i = 0; i < m; ++i) lp.constraints(r, i) = 1.0;
  lp.bounds[r] = 1.0;
  lp.senses[r] = Sense::kEqual;
  if (with_margin) {
    lp.objective[m] = 1.0;
    lp.lower.assign(nvars, 0.0);
    lp.lower[m] = -std::numeric_limits<double>::infinity();
  }
  return lp;
}

}  // namespace

SSEResult solve_sse(const Matrix& u, const Matrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols() || v.empty()) {
    throw ArgumentError("U and V must have the same non-empty shape");
  }
  constexpr double kTieTolerance = 1e-12;
  std::optional<SSEResult> best;
  for (std::size_t j = 0; j < v.cols(); ++j) {
    LinearProgram lp = induction_lp(v, j, false);
    for (std::size_t i = 0; i < u.rows(); ++i) lp.objective[i] = u(i, j);
    LpSolution sol;
    try {
      sol = lp_solve(lp);
    } catch (const InfeasibleError&) {
      continue;
    }
    SimplexVector x = to_simplex(std::span<const double>(sol.x).first(u.rows()));
    const double value = leader_payoff(u, x, j);
    if (!best || value > best->value + kTieTolerance) {
      best = SSEResult{std::move(x), j, value};
    }
  }
  if (!best) throw RuntimeError("no follower action is inducible");
  return *best;
}

SSEResult solve_sse(const GameInstance& game) { return solve_sse(game.U, game.V); }

InducibilityCertificate inducibility_gap(const Matrix& v) {
  if (v.empty() || v.cols() < 2) throw ArgumentError("inducibility gap needs at least two follower actions");
  InducibilityCertificate cert;
  cert.sigma = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < v.cols(); ++j) {
    const LpSolution sol = lp_solve(induction_lp(v, j, true));
    const double margin = sol.x[v.rows()];
    cert.margins.push_back(margin);
    cert.anchors.push_back(to_simplex(std::span<const double>(sol.x).first(v.rows())));
    cert.sigma = std::min(cert.sigma, margin);
  }
  return cert;
}

RobustStrategy robust_strategy(const Matrix& u, const Matrix& v_hat, double epsilon) {
  if (!(epsilon >= 0.0)) throw ArgumentError("epsilon must be nonnegative");
  const InducibilityCertificate cert = inducibility_gap(v_hat);
  if (!(cert.sigma > 5.0 * epsilon)) {
    throw InducibilityError("inducibility gap " + std::to_string(cert.sigma) + " does not exceed 5 * epsilon = " +
                            std::to_string(5.0 * epsilon));
  }
  SSEResult sse = solve_sse(u, v_hat);
  const double omega = 3.0 * epsilon / (cert.sigma - 2.0 * epsilon);
  const SimplexVector& anchor = cert.anchors[sse.action];
  std::vector<double> x(u.rows());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = (1.0 - omega) * sse.strategy[i] + omega * anchor[i];
  RobustStrategy out{to_simplex(x), omega, cert.sigma, std::move(sse)};
  return out;
}

}  // namespace invstack
