#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "invstack/game.hpp"
#include "invstack/metrics.hpp"
#include "invstack/numerics.hpp"
#include "invstack/oracle.hpp"

namespace invstack {

struct LearnerConfig {
  std::uint64_t total_queries = 0;
  double concentration_threshold = 0.95;
  std::uint64_t min_samples = 100;
  double pseudo_count = 1.0;
  std::uint64_t seed = 0;
  // Keep every (round, strategy, action) triple for CSV export.
  bool record_queries = false;
  // Scale used to invert the responses; defaults to the game's lambda. Needed
  // when the game has lambda = 0, whose responses carry no payoff scale.
  std::optional<double> recovery_lambda;

  void validate(std::size_t m) const;
};

struct Replacement {
  std::uint64_t round = 0;
  std::size_t index = 0;
  SimplexVector old_strategy;
  SimplexVector new_strategy;
  // Samples gathered under the old strategy; kept for audit only.
  EmpiricalDistribution discarded;
};

struct QueryLog {
  std::vector<SimplexVector> strategies;
  std::vector<EmpiricalDistribution> estimators;
  std::vector<Replacement> replacements;
  std::vector<QueryRecord> queries;
  std::uint64_t rounds = 0;

  // One row per strategy.
  Matrix strategy_matrix() const;
  std::vector<SimplexVector> smoothed_estimates(double pseudo_count) const;
};

struct LearnResult {
  RecoveredUtility utility;
  QueryLog log;
};

// Called after `t` total queries whenever t is a requested checkpoint.
using CheckpointFn = std::function<void(std::uint64_t t, const QueryLog& log)>;

/// Closed-form recovery from m response distributions:
/// V_hat = lambda^-1 X^-1 ln Y, with X holding one query strategy per row.
///
/// Throws SingularMatrixError for rank-deficient X and SupportError for a
/// zero probability in Y.
RecoveredUtility recover_from_exact(double lambda, const std::vector<SimplexVector>& strategies,
                                    const std::vector<SimplexVector>& responses);

// Closed-form recovery from a log's final strategies and smoothed estimates.
RecoveredUtility recover_from_log(const QueryLog& log, double lambda, double pseudo_count);

/// Round-robin over the m pure strategies for T queries, then closed-form
/// recovery on add-s smoothed frequencies.
LearnResult pure_learn(ResponseOracle& oracle, const LearnerConfig& config,
                       const std::vector<std::uint64_t>& checkpoints = {}, const CheckpointFn& on_checkpoint = {});

// True once an estimator holds at least min_samples draws and its largest
// empirical probability reaches the concentration threshold.
bool should_replace(const EmpiricalDistribution& dist, const LearnerConfig& config);

// (x_tilde + e_i) / 2.
SimplexVector exploration_strategy(std::span<const double> x_tilde, std::size_t i);

/// PURE with exploration: a slot whose estimate concentrates on one action
/// is replaced by (x_tilde + e_i) / 2 with x_tilde flat-Dirichlet, keeping the
/// strategy matrix nonsingular.
LearnResult pure_exp_learn(ResponseOracle& oracle, const LearnerConfig& config,
                           const std::vector<std::uint64_t>& checkpoints = {},
                           const CheckpointFn& on_checkpoint = {});

// ---------------------------------------------------------------------------
// Structured security-game fit

// Parameter layout: (w_1..w_n, b_1..b_n).
ValueAndGradient security_objective(std::span<const double> params, const std::vector<SimplexVector>& strategies,
                                    const std::vector<SimplexVector>& responses, double lambda);

struct SecurityFit {
  SecurityGameParams params;  // gauge: sum(b) == 0
  double gradient_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

SecurityFit security_fit(const std::vector<SimplexVector>& strategies, const std::vector<SimplexVector>& responses,
                         double lambda, double tol = 1e-8);

// ---------------------------------------------------------------------------
// Offline baseline

// Mean over strategies of the cross-entropy between observed and predicted
// responses, as a function of the flattened m x n payoff matrix.
ValueAndGradient cross_entropy_objective(std::span<const double> v_flat, const std::vector<SimplexVector>& strategies,
                                         const std::vector<SimplexVector>& responses, double lambda);

struct OfflineOptions {
  DescentMethod method = DescentMethod::kGradientArmijo;
  std::size_t max_iterations = 100000;
  double tol = 1e-9;
  // Raw frequencies by default: the cross-entropy fit tolerates zeros.
  double pseudo_count = 0.0;
};

struct OfflineFit {
  RecoveredUtility utility;
  bool converged = false;
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
};

OfflineFit fit_cross_entropy(const std::vector<SimplexVector>& strategies, const std::vector<SimplexVector>& responses,
                             double lambda, std::size_t n, const OfflineOptions& options = {});

/// K flat-Dirichlet strategies, floor(T / K) sampled responses each, then a
/// first-order cross-entropy fit. Requires K >= m and T >= K.
OfflineFit offline_fit(std::size_t k, std::uint64_t total_queries, const GameInstance& game, std::uint64_t seed,
                       const OfflineOptions& options = {});

// ceil(C m ln(m n / delta) / (rho eps^2)).
std::uint64_t sample_plan(std::size_t m, std::size_t n, double delta, double epsilon, double rho, double c = 1.0);

}  // namespace invstack
