#include "invstack/oracle.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "invstack/errors.hpp"

namespace invstack {

EmpiricalDistribution::EmpiricalDistribution(std::vector<std::uint64_t> c)
    : counts(std::move(c)), total(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0})) {}

void EmpiricalDistribution::add(std::size_t action) {
  if (action >= counts.size()) throw ArgumentError("action index out of range");
  ++counts[action];
  ++total;
}

void EmpiricalDistribution::reset() {
  std::fill(counts.begin(), counts.end(), 0);
  total = 0;
}

double EmpiricalDistribution::max_probability() const {
  if (total == 0) return 0.0;
  return static_cast<double>(*std::max_element(counts.begin(), counts.end())) / static_cast<double>(total);
}

std::optional<SimplexVector> estimate(const EmpiricalDistribution& dist) {
  if (dist.total == 0 || dist.counts.empty()) return std::nullopt;
  std::vector<double> p(dist.counts.size());
  const double t = static_cast<double>(dist.total);
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = static_cast<double>(dist.counts[j]) / t;
  return SimplexVector(std::move(p));
}

SimplexVector smoothed_estimate(const EmpiricalDistribution& dist, double pseudo_count) {
  if (pseudo_count < 0.0) throw ArgumentError("pseudo-count must be nonnegative");
  const std::size_t n = dist.counts.size();
  const double denom = static_cast<double>(dist.total) + static_cast<double>(n) * pseudo_count;
  if (denom <= 0.0) throw SupportError("cannot estimate a distribution from zero samples without smoothing");
  std::vector<double> p(n);
  for (std::size_t j = 0; j < n; ++j) p[j] = (static_cast<double>(dist.counts[j]) + pseudo_count) / denom;
  return SimplexVector(std::move(p));
}

ResponseOracle::ResponseOracle(GameInstance game, std::uint64_t seed)
    : game_(std::move(game)), rng_(seed, Rng::kOracle) {
  game_.validate();
}

SimplexVector ResponseOracle::exact_response(const SimplexVector& x) const { return quantal_response(game_, x); }

const std::vector<double>& ResponseOracle::cdf_for(const SimplexVector& x) {
  if (cached_cdf_.empty() || !(x == cached_x_)) {
    const SimplexVector y = quantal_response(game_, x);
    cached_cdf_.resize(y.size());
    std::partial_sum(y.vec().begin(), y.vec().end(), cached_cdf_.begin());
    cached_x_ = x;
  }
  return cached_cdf_;
}

std::size_t ResponseOracle::sample_response(const SimplexVector& x) {
  const std::vector<double>& cdf = cdf_for(x);
  const double u = rng_.uniform() * cdf.back();
  ++queries_;
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

std::size_t ResponseOracle::gumbel_sample_response(const SimplexVector& x) {
  if (x.size() != game_.m()) throw ArgumentError("leader strategy length does not match m");
  const std::vector<double> payoff = left_multiply(x.values(), game_.V);
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < payoff.size(); ++j) {
    const double score = game_.lambda * payoff[j] + rng_.gumbel();
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  ++queries_;
  return best;
}

void write_query_log_csv(const std::vector<QueryRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "round,leader_strategy,sampled_action\n";
  char buf[64];
  for (const QueryRecord& r : records) {
    out << r.round << ',';
    for (std::size_t i = 0; i < r.strategy.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", r.strategy[i]);
      if (i) out << ';';
      out << buf;
    }
    out << ',' << r.action << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace invstack
