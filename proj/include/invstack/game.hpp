#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "invstack/matrix.hpp"
#include "invstack/simplex.hpp"

namespace invstack {

/// Security-game follower payoffs: attacking target j under coverage x pays
/// w_j * x_j + b_j.
struct SecurityGameParams {
  std::vector<double> w;
  std::vector<double> b;

  std::size_t targets() const { return w.size(); }
  // n x n follower matrix with entry (i, j) = w_j [i == j] + b_j.
  Matrix materialize() const;
};

/// Leader payoffs U, follower payoffs V (both m x n) and the follower's
/// rationality constant lambda.
///
/// Payoffs are nominally in [0, 1]; out-of-range matrices are accepted so that
/// illustrative games can be loaded, but the generators never produce them.
struct GameInstance {
  Matrix U;
  Matrix V;
  double lambda = 0.0;
  std::optional<SecurityGameParams> security;
  std::optional<std::uint64_t> seed;

  GameInstance() = default;
  GameInstance(Matrix u, Matrix v, double lambda);

  std::size_t m() const { return V.rows(); }
  std::size_t n() const { return V.cols(); }
  void validate() const;
};

// Logit choice: y_j proportional to exp(lambda * x^T V_j).
SimplexVector quantal_response(const GameInstance& game, const SimplexVector& x);
SimplexVector quantal_response(const Matrix& v, double lambda, const SimplexVector& x);

// Lowest-index maximizer of x^T V_j.
std::size_t best_response(const GameInstance& game, const SimplexVector& x);
std::size_t best_response(const Matrix& v, const SimplexVector& x);

double leader_payoff(const GameInstance& game, const SimplexVector& x, std::size_t j);
double leader_payoff(const Matrix& u, const SimplexVector& x, std::size_t j);

// Adds c_i to every entry of row i.
Matrix row_shift(const Matrix& v, std::span<const double> c);

/// V = alpha * I + (1 - alpha) * Xi with Xi a min-max normalized Gaussian
/// matrix; U uniform in [0, 1]. Deterministic in `seed`.
GameInstance synth_game(std::size_t m, std::size_t n, double alpha, double lambda, std::uint64_t seed);

/// Square security game with b_j ~ U[0.5, 1], w_j ~ U[-0.5, 0] and U ~ U[0, 1].
std::pair<GameInstance, SecurityGameParams> synth_security_game(std::size_t n, double lambda,
                                                                std::uint64_t seed);

}  // namespace invstack
