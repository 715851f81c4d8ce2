#pragma once

#include <cstddef>
#include <vector>

#include "invstack/game.hpp"
#include "invstack/matrix.hpp"
#include "invstack/simplex.hpp"

namespace invstack {

struct SSEResult {
  SimplexVector strategy;
  std::size_t action = 0;
  double value = 0.0;
};

/// sigma(V) with one maximizing leader strategy per follower action.
struct InducibilityCertificate {
  double sigma = 0.0;
  std::vector<double> margins;          // per-action optimum sigma_j
  std::vector<SimplexVector> anchors;   // x^j attaining margins[j]
};

/// Strong Stackelberg equilibrium via one LP per follower action.
///
/// Each LP maximizes x^T U e_j subject to j being a (weak) best response.
/// Ties across actions resolve to the higher leader value, then the lower
/// action index.
SSEResult solve_sse(const Matrix& u, const Matrix& v);
SSEResult solve_sse(const GameInstance& game);

InducibilityCertificate inducibility_gap(const Matrix& v);

struct RobustStrategy {
  SimplexVector strategy;
  double omega = 0.0;   // weight on the inducing anchor
  double sigma = 0.0;   // sigma(V_hat)
  SSEResult estimated_sse;
};

/// Mixes the SSE of (U, V_hat) with the anchor strategy that induces the same
/// action, using weight 3 eps / (sigma(V_hat) - 2 eps).
///
/// Throws InducibilityError unless sigma(V_hat) > 5 eps.
RobustStrategy robust_strategy(const Matrix& u, const Matrix& v_hat, double epsilon);

}  // namespace invstack
