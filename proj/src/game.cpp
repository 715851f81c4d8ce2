#include "invstack/game.hpp"

#include <algorithm>
#include <cmath>

#include "invstack/errors.hpp"
#include "invstack/numerics.hpp"
#include "invstack/random.hpp"

namespace invstack {

Matrix SecurityGameParams::materialize() const {
  const std::size_t n = w.size();
  if (n == 0 || b.size() != n) throw ArgumentError("security parameters need equal, non-empty w and b");
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) v(i, j) = (i == j ? w[j] : 0.0) + b[j];
  return v;
}

GameInstance::GameInstance(Matrix u, Matrix v, double lam) : U(std::move(u)), V(std::move(v)), lambda(lam) {
  validate();
}

void GameInstance::validate() const {
  if (U.empty() || V.empty()) throw ArgumentError("game payoff matrices must be non-empty");
  if (U.rows() != V.rows() || U.cols() != V.cols()) throw ArgumentError("U and V must have the same shape");
  if (!U.all_finite() || !V.all_finite()) throw ArgumentError("payoffs must be finite");
  if (!std::isfinite(lambda) || lambda < 0.0) throw ArgumentError("lambda must be finite and nonnegative");
  if (security) {
    if (security->targets() != n() || m() != n()) throw ArgumentError("security parameters do not match the game");
  }
}

SimplexVector quantal_response(const Matrix& v, double lambda, const SimplexVector& x) {
  if (x.size() != v.rows()) throw ArgumentError("leader strategy length does not match m");
  std::vector<double> z = left_multiply(x.values(), v);
  for (double& zj : z) zj *= lambda;
  return softmax(z);
}

SimplexVector quantal_response(const GameInstance& game, const SimplexVector& x) {
  return quantal_response(game.V, game.lambda, x);
}

std::size_t best_response(const Matrix& v, const SimplexVector& x) {
  if (x.size() != v.rows()) throw ArgumentError("leader strategy length does not match m");
  const std::vector<double> z = left_multiply(x.values(), v);
  return static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
}

std::size_t best_response(const GameInstance& game, const SimplexVector& x) { return best_response(game.V, x); }

double leader_payoff(const Matrix& u, const SimplexVector& x, std::size_t j) {
  if (x.size() != u.rows()) throw ArgumentError("leader strategy length does not match m");
  if (j >= u.cols()) throw ArgumentError("follower action out of range");
  double s = 0.0;
  for (std::size_t i = 0; i < u.rows(); ++i) s += x[i] * u(i, j);
  return s;
}

double leader_payoff(const GameInstance& game, const SimplexVector& x, std::size_t j) {
  return leader_payoff(game.U, x, j);
}

Matrix row_shift(const Matrix& v, std::span<const double> c) {
  if (c.size() != v.rows()) throw ArgumentError("shift vector length does not match rows");
  Matrix out = v;
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (double& e : out.row(i)) e += c[i];
  return out;
}

GameInstance synth_game(std::size_t m, std::size_t n, double alpha, double lambda, std::uint64_t seed) {
  if (m < 2 || n < 2) throw ArgumentError("synth_game needs m, n >= 2");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in [0, 1]");
  Rng rng(seed, Rng::kGame);

  Matrix noise(m, n);
  for (double& e : noise.data()) e = rng.normal();
  const auto [lo, hi] = std::minmax_element(noise.data().begin(), noise.data().end());
  const double min = *lo, span = *hi - *lo;
  for (double& e : noise.data()) e = span > 0.0 ? (e - min) / span : 0.0;

  Matrix v(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) v(i, j) = alpha * (i == j ? 1.0 : 0.0) + (1.0 - alpha) * noise(i, j);

  Matrix u(m, n);
  for (double& e : u.data()) e = rng.uniform();

  GameInstance game(std::move(u), std::move(v), lambda);
  game.seed = seed;
  return game;
}

std::pair<GameInstance, SecurityGameParams> synth_security_game(std::size_t n, double lambda, std::uint64_t seed) {
  if (n < 2) throw ArgumentError("synth_security_game needs n >= 2");
  Rng rng(seed, Rng::kGame);
  SecurityGameParams params;
  params.b.resize(n);
  params.w.resize(n);
  for (double& b : params.b) b = rng.uniform(0.5, 1.0);
  for (double& w : params.w) w = rng.uniform(-0.5, 0.0);
  Matrix u(n, n);
  for (double& e : u.data()) e = rng.uniform();

  GameInstance game(std::move(u), params.materialize(), lambda);
  game.security = params;
  game.seed = seed;
  return {std::move(game), std::move(params)};
}

}  // namespace invstack
