#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "invstack/game.hpp"
#include "invstack/random.hpp"

namespace invstack {

/// Counts of observed follower actions for one leader strategy.
struct EmpiricalDistribution {
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  EmpiricalDistribution() = default;
  explicit EmpiricalDistribution(std::size_t n) : counts(n, 0) {}
  EmpiricalDistribution(std::vector<std::uint64_t> c);

  void add(std::size_t action);
  void reset();
  std::size_t size() const { return counts.size(); }
  // Largest empirical probability; 0 when empty.
  double max_probability() const;
};

// counts / total, or nullopt for an empty estimator.
std::optional<SimplexVector> estimate(const EmpiricalDistribution& dist);

// (counts + s) / (total + n s).
SimplexVector smoothed_estimate(const EmpiricalDistribution& dist, double pseudo_count);

/// Simulated quantal-response follower.
///
/// Owns one seeded generator consumed strictly in query order, so a replayed
/// query sequence reproduces every sample. Not thread-safe; use one oracle
/// per thread.
class ResponseOracle {
 public:
  ResponseOracle(GameInstance game, std::uint64_t seed);

  const GameInstance& game() const { return game_; }
  std::uint64_t queries() const { return queries_; }

  // Exact mixed response; consumes no randomness.
  SimplexVector exact_response(const SimplexVector& x) const;
  // One action drawn by inverse-CDF from the exact response.
  std::size_t sample_response(const SimplexVector& x);
  // argmax_j (lambda x^T V_j + g_j) with i.i.d. standard Gumbel g.
  std::size_t gumbel_sample_response(const SimplexVector& x);

 private:
  const std::vector<double>& cdf_for(const SimplexVector& x);

  GameInstance game_;
  Rng rng_;
  std::uint64_t queries_ = 0;
  SimplexVector cached_x_;
  std::vector<double> cached_cdf_;
};

struct QueryRecord {
  std::uint64_t round = 0;
  SimplexVector strategy;
  std::size_t action = 0;
};

// CSV with header `round,leader_strategy,sampled_action`; strategy entries
// are joined by ';'.
void write_query_log_csv(const std::vector<QueryRecord>& records, const std::string& path);

}  // namespace invstack
