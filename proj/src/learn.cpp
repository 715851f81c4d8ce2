#include "invstack/learn.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "invstack/errors.hpp"
#include "invstack/random.hpp"

namespace invstack {

void LearnerConfig::validate(std::size_t m) const {
  if (total_queries < m) {
    throw ArgumentError("total queries T = " + std::to_string(total_queries) + " is below m = " + std::to_string(m));
  }
  if (!(concentration_threshold > 0.5 && concentration_threshold < 1.0)) {
    throw ArgumentError("concentration threshold must lie in (1/2, 1)");
  }
  if (!(pseudo_count >= 0.0) || !std::isfinite(pseudo_count)) throw ArgumentError("pseudo-count must be >= 0");
}

Matrix QueryLog::strategy_matrix() const {
  std::vector<std::vector<double>> rows;
  rows.reserve(strategies.size());
  for (const SimplexVector& x : strategies) rows.push_back(x.vec());
  return Matrix::from_rows(rows);
}

std::vector<SimplexVector> QueryLog::smoothed_estimates(double pseudo_count) const {
  std::vector<SimplexVector> out;
  out.reserve(estimators.size());
  for (const EmpiricalDistribution& e : estimators) out.push_back(smoothed_estimate(e, pseudo_count));
  return out;
}

RecoveredUtility recover_from_exact(double lambda, const std::vector<SimplexVector>& strategies,
                                    const std::vector<SimplexVector>& responses) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ArgumentError("recovery needs a finite lambda > 0");
  const std::size_t m = strategies.size();
  if (m == 0 || responses.size() != m) throw ArgumentError("need one response per query strategy");
  const std::size_t n = responses.front().size();
  Matrix x(m, m);
  Matrix log_y(m, n);
  for (std::size_t t = 0; t < m; ++t) {
    if (strategies[t].size() != m) throw ArgumentError("query strategies must have length m = number of queries");
    if (responses[t].size() != n) throw ArgumentError("responses have inconsistent lengths");
    for (std::size_t i = 0; i < m; ++i) x(t, i) = strategies[t][i];
    for (std::size_t j = 0; j < n; ++j) {
      if (!(responses[t][j] > 0.0)) {
        throw SupportError("response " + std::to_string(t) + " has zero probability on action " + std::to_string(j));
      }
      log_y(t, j) = std::log(responses[t][j]) / lambda;
    }
  }
  return RecoveredUtility{lu_solve(x, log_y)};
}

RecoveredUtility recover_from_log(const QueryLog& log, double lambda, double pseudo_count) {
  return recover_from_exact(lambda, log.strategies, log.smoothed_estimates(pseudo_count));
}

bool should_replace(const EmpiricalDistribution& dist, const LearnerConfig& config) {
  return dist.total >= config.min_samples && dist.max_probability() >= config.concentration_threshold;
}

SimplexVector exploration_strategy(std::span<const double> x_tilde, std::size_t i) {
  if (i >= x_tilde.size()) throw ArgumentError("exploration index out of range");
  std::vector<double> out(x_tilde.begin(), x_tilde.end());
  for (double& v : out) v *= 0.5;
  out[i] += 0.5;
  return SimplexVector(std::move(out));
}

namespace {

void validate_checkpoints(const std::vector<std::uint64_t>& checkpoints, std::uint64_t total) {
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    if (checkpoints[k] == 0 || checkpoints[k] > total) throw ArgumentError("checkpoints must lie in [1, T]");
    if (k > 0 && checkpoints[k] <= checkpoints[k - 1]) throw ArgumentError("checkpoints must be strictly increasing");
  }
}

LearnResult round_robin(ResponseOracle& oracle, const LearnerConfig& config, bool explore,
                        const std::vector<std::uint64_t>& checkpoints, const CheckpointFn& on_checkpoint) {
  const std::size_t m = oracle.game().m();
  const std::size_t n = oracle.game().n();
  config.validate(m);
  const double lambda = config.recovery_lambda.value_or(oracle.game().lambda);
  if (!(lambda > 0.0)) throw ArgumentError("recovery needs lambda > 0; set recovery_lambda for a lambda = 0 game");
  validate_checkpoints(checkpoints, config.total_queries);

  QueryLog log;
  for (std::size_t i = 0; i < m; ++i) {
    log.strategies.push_back(SimplexVector::vertex(m, i));
    log.estimators.emplace_back(n);
  }
  Rng perturb(config.seed, Rng::kLearner);
  auto next_checkpoint = checkpoints.begin();

  for (std::uint64_t t = 0; t < config.total_queries; ++t) {
    const std::size_t i = static_cast<std::size_t>(t % m);
    const std::size_t action = oracle.sample_response(log.strategies[i]);
    log.estimators[i].add(action);
    if (config.record_queries) log.queries.push_back({t, log.strategies[i], action});

    if (explore && should_replace(log.estimators[i], config)) {
      Matrix x = log.strategy_matrix();
      std::optional<SimplexVector> candidate;
      for (int attempt = 0; attempt < 100 && !candidate; ++attempt) {
        SimplexVector c = exploration_strategy(perturb.dirichlet_flat(m), i);
        std::copy(c.values().begin(), c.values().end(), x.row(i).begin());
        if (is_nonsingular(x)) candidate = std::move(c);
      }
      if (!candidate) throw RankRepairError("could not find a full-rank replacement strategy in 100 draws");
      SimplexVector replacement = std::move(*candidate);
      log.replacements.push_back({t + 1, i, log.strategies[i], replacement, log.estimators[i]});
      log.strategies[i] = std::move(replacement);
      log.estimators[i].reset();
    }
    log.rounds = t + 1;

    if (next_checkpoint != checkpoints.end() && *next_checkpoint == t + 1) {
      if (on_checkpoint) on_checkpoint(t + 1, log);
      ++next_checkpoint;
    }
  }

  RecoveredUtility utility = recover_from_log(log, lambda, config.pseudo_count);
  return {std::move(utility), std::move(log)};
}

}  // namespace

LearnResult pure_learn(ResponseOracle& oracle, const LearnerConfig& config,
                       const std::vector<std::uint64_t>& checkpoints, const CheckpointFn& on_checkpoint) {
  return round_robin(oracle, config, false, checkpoints, on_checkpoint);
}

LearnResult pure_exp_learn(ResponseOracle& oracle, const LearnerConfig& config,
                           const std::vector<std::uint64_t>& checkpoints, const CheckpointFn& on_checkpoint) {
  return round_robin(oracle, config, true, checkpoints, on_checkpoint);
}

// ---------------------------------------------------------------------------

namespace {

void check_data(const std::vector<SimplexVector>& strategies, const std::vector<SimplexVector>& responses) {
  if (strategies.empty() || strategies.size() != responses.size()) {
    throw ArgumentError("need one response per query strategy");
  }
}

}  // namespace

ValueAndGradient security_objective(std::span<const double> params, const std::vector<SimplexVector>& strategies,
                                    const std::vector<SimplexVector>& responses, double lambda) {
  check_data(strategies, responses);
  const std::size_t n = params.size() / 2;
  if (params.size() != 2 * n || n == 0) throw ArgumentError("security parameters must be (w, b) of equal length");
  const auto w = params.first(n);
  const auto b = params.subspan(n);

  ValueAndGradient out;
  out.gradient.assign(2 * n, 0.0);
  std::vector<double> z(n);
  for (std::size_t t = 0; t < strategies.size(); ++t) {
    const SimplexVector& x = strategies[t];
    const SimplexVector& y = responses[t];
    if (x.size() != n || y.size() != n) throw ArgumentError("security data must be n-dimensional");
    for (std::size_t j = 0; j < n; ++j) z[j] = lambda * (w[j] * x[j] + b[j]);
    const double lse = log_sum_exp(z);
    out.value += lse;
    for (std::size_t j = 0; j < n; ++j) {
      out.value -= y[j] * z[j];
      const double r = std::exp(z[j] - lse) - y[j];
      out.gradient[j] += lambda * x[j] * r;
      out.gradient[n + j] += lambda * r;
    }
  }
  return out;
}

SecurityFit security_fit(const std::vector<SimplexVector>& strategies, const std::vector<SimplexVector>& responses,
                         double lambda, double tol) {
  check_data(strategies, responses);
  if (!(lambda > 0.0)) throw ArgumentError("security fit needs lambda > 0");
  const std::size_t n = responses.front().size();
  for (const SimplexVector& y : responses) {
    for (double p : y.values()) {
      if (!(p > 0.0)) throw SupportError("security fit needs responses with full support");
    }
  }
  ConvexProblem problem{2 * n, [&](std::span<const double> p) {
                          return security_objective(p, strategies, responses, lambda);
                        }};
  const std::vector<double> init(2 * n, 0.0);
  const MinimizeResult res = minimize_convex(problem, init, tol);

  SecurityFit fit;
  fit.params.w.assign(res.params.begin(), res.params.begin() + static_cast<std::ptrdiff_t>(n));
  fit.params.b.assign(res.params.begin() + static_cast<std::ptrdiff_t>(n), res.params.end());
  double mean_b = 0.0;
  for (double b : fit.params.b) mean_b += b;
  mean_b /= static_cast<double>(n);
  for (double& b : fit.params.b) b -= mean_b;
  fit.gradient_norm = res.gradient_norm;
  fit.iterations = res.iterations;
  fit.converged = res.converged;
  return fit;
}

// ---------------------------------------------------------------------------

ValueAndGradient cross_entropy_objective(std::span<const double> v_flat, const std::vector<SimplexVector>& strategies,
                                         const std::vector<SimplexVector>& responses, double lambda) {
  check_data(strategies, responses);
  const std::size_t m = strategies.front().size();
  const std::size_t n = responses.front().size();
  if (v_flat.size() != m * n) throw ArgumentError("parameter vector must hold an m x n matrix");

  ValueAndGradient out;
  out.gradient.assign(m * n, 0.0);
  std::vector<double> z(n), r(n);
  for (std::size_t t = 0; t < strategies.size(); ++t) {
    const SimplexVector& x = strategies[t];
    const SimplexVector& y = responses[t];
    std::fill(z.begin(), z.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double xi = x[i];
      if (xi == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) z[j] += xi * v_flat[i * n + j];
    }
    for (double& zj : z) zj *= lambda;
    const double lse = log_sum_exp(z);
    out.value += lse;
    for (std::size_t j = 0; j < n; ++j) {
      out.value -= y[j] * z[j];
      r[j] = lambda * (std::exp(z[j] - lse) - y[j]);
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double xi = x[i];
      if (xi == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out.gradient[i * n + j] += xi * r[j];
    }
  }
  const double scale = 1.0 / static_cast<double>(strategies.size());
  out.value *= scale;
  for (double& g : out.gradient) g *= scale;
  return out;
}

OfflineFit fit_cross_entropy(const std::vector<SimplexVector>& strategies, const std::vector<SimplexVector>& responses,
                             double lambda, std::size_t n, const OfflineOptions& options) {
  check_data(strategies, responses);
  if (!(lambda > 0.0)) throw ArgumentError("offline fit needs lambda > 0");
  const std::size_t m = strategies.front().size();
  ConvexProblem problem{m * n, [&](std::span<const double> v) {
                          return cross_entropy_objective(v, strategies, responses, lambda);
                        }};
  MinimizeOptions opt;
  opt.method = options.method;
  opt.max_iterations = options.max_iterations;
  const std::vector<double> init(m * n, 0.0);
  MinimizeResult res = minimize_convex(problem, init, options.tol, opt);
  OfflineFit fit;
  fit.utility.V_hat = Matrix(m, n, std::move(res.params));
  fit.converged = res.converged;
  fit.iterations = res.iterations;
  fit.gradient_norm = res.gradient_norm;
  return fit;
}

OfflineFit offline_fit(std::size_t k, std::uint64_t total_queries, const GameInstance& game, std::uint64_t seed,
                       const OfflineOptions& options) {
  const std::size_t m = game.m(), n = game.n();
  if (k < m) throw ArgumentError("offline fit needs K >= m strategies");
  if (total_queries < k) throw ArgumentError("offline fit needs at least one sample per strategy (T >= K)");
  Rng rng(seed, Rng::kLearner);
  ResponseOracle oracle(game, seed);
  const std::uint64_t per = total_queries / k;

  std::vector<SimplexVector> strategies;
  std::vector<SimplexVector> responses;
  strategies.reserve(k);
  responses.reserve(k);
  for (std::size_t s = 0; s < k; ++s) {
    SimplexVector x(rng.dirichlet_flat(m));
    EmpiricalDistribution counts(n);
    for (std::uint64_t q = 0; q < per; ++q) counts.add(oracle.sample_response(x));
    responses.push_back(smoothed_estimate(counts, options.pseudo_count));
    strategies.push_back(std::move(x));
  }
  return fit_cross_entropy(strategies, responses, game.lambda, n, options);
}

std::uint64_t sample_plan(std::size_t m, std::size_t n, double delta, double epsilon, double rho, double c) {
  if (m == 0 || n == 0) throw ArgumentError("m and n must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("delta must lie in (0, 1)");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ArgumentError("epsilon must lie in (0, 1]");
  if (!(rho > 0.0) || !(c > 0.0)) throw ArgumentError("rho and C must be positive");
  const double md = static_cast<double>(m);
  const double plan = c * md * std::log(md * static_cast<double>(n) / delta) / (rho * epsilon * epsilon);
  return static_cast<std::uint64_t>(std::ceil(plan));
}

}  // namespace invstack
