#include <doctest.h>

#include <cmath>
#include <random>

#include "invstack/errors.hpp"
#include "invstack/learn.hpp"
#include "support.hpp"

using namespace invstack;

namespace {

std::vector<SimplexVector> vertices(std::size_t m) {
  std::vector<SimplexVector> xs;
  for (std::size_t i = 0; i < m; ++i) xs.push_back(SimplexVector::vertex(m, i));
  return xs;
}

std::vector<SimplexVector> exact(const GameInstance& g, const std::vector<SimplexVector>& xs) {
  std::vector<SimplexVector> ys;
  for (const auto& x : xs) ys.emplace_back(oracle::quantal(g.V, g.lambda, x.vec()));
  return ys;
}

LearnerConfig config(std::uint64_t t, std::uint64_t seed) {
  LearnerConfig c;
  c.total_queries = t;
  c.seed = seed;
  return c;
}

double relative_fd_error(const std::function<ValueAndGradient(std::span<const double>)>& f,
                         const std::vector<double>& p) {
  const ValueAndGradient vg = f(p);
  double num = 0, den = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    auto pp = p, pm = p;
    pp[k] += 1e-5, pm[k] -= 1e-5;
    const double fd = (f(pp).value - f(pm).value) / 2e-5;
    num += (fd - vg.gradient[k]) * (fd - vg.gradient[k]);
    den += vg.gradient[k] * vg.gradient[k];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("closed-form recovery from exact responses") {
  const GameInstance g = synth_game(10, 10, 0.2, 8.0, 1);
  CHECK(logit_distance(g.V, recover_from_exact(8.0, vertices(10), exact(g, vertices(10))).V_hat) <= 1e-8);

  // Any nonsingular basis works, not only the vertices.
  std::mt19937_64 rng(1);
  const GameInstance h = synth_game(6, 4, 0.2, 3.0, 2);
  std::vector<SimplexVector> xs;
  for (int i = 0; i < 6; ++i) xs.emplace_back(oracle::random_simplex(rng, 6));
  CHECK(logit_distance(h.V, recover_from_exact(3.0, xs, exact(h, xs)).V_hat) <= 1e-8);

  const std::vector<SimplexVector> half(2, SimplexVector::uniform(2));
  const Matrix flat = recover_from_exact(8.0, vertices(2), half).V_hat;
  CHECK(logit_distance(flat, Matrix(2, 2, 0.0)) <= 1e-15);

  const Matrix one = recover_from_exact(8.0, vertices(1), {SimplexVector({0.310026, 0.689974})}).V_hat;
  CHECK(std::abs(one(0, 1) - one(0, 0) - 0.1) < 1e-5);
}

TEST_CASE("closed-form recovery errors") {
  CHECK_THROWS_AS(recover_from_exact(8.0, vertices(2), {SimplexVector({1.0, 0.0}), SimplexVector::uniform(2)}),
                  SupportError);
  const std::vector<SimplexVector> same(2, SimplexVector::uniform(2));
  CHECK_THROWS_AS(recover_from_exact(8.0, same, same), SingularMatrixError);
  CHECK_THROWS_AS(recover_from_exact(0.0, vertices(2), same), ArgumentError);
  CHECK_THROWS_AS(recover_from_exact(8.0, vertices(3), same), ArgumentError);
}

TEST_CASE("learner configuration") {
  const GameInstance g = synth_game(10, 10, 0.2, 8.0, 1);
  ResponseOracle o(g, 1);
  CHECK_THROWS_AS(pure_learn(o, config(5, 1)), ArgumentError);
  LearnerConfig c = config(100, 1);
  c.concentration_threshold = 0.5;
  CHECK_THROWS_AS(pure_exp_learn(o, c), ArgumentError);
  CHECK_THROWS_AS(pure_learn(o, config(100, 1), {50, 20}), ArgumentError);
  CHECK_THROWS_AS(pure_learn(o, config(100, 1), {200}), ArgumentError);
}

TEST_CASE("PURE with uniform responses recovers flat rows") {
  const GameInstance g = synth_game(3, 4, 0.2, 0.0, 1);
  ResponseOracle o(g, 2);
  CHECK_THROWS_AS(pure_learn(o, config(1000, 2)), ArgumentError);
  // lambda = 0 carries no payoff scale; invert with lambda = 1.
  LearnerConfig c = config(1000000, 2);
  c.recovery_lambda = 1.0;
  const Matrix v = pure_learn(o, c).utility.V_hat;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto row = v.row(i);
    const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
    CHECK(*hi - *lo <= 0.05);
  }
}

TEST_CASE("PURE error falls with T and replays exactly") {
  double early = 0, late = 0;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const GameInstance g = synth_game(10, 10, 0.2, 8.0, s);
    ResponseOracle o(g, s);
    std::vector<double> phi;
    const LearnResult r = pure_learn(o, config(1000000, s), {10000, 1000000}, [&](std::uint64_t, const QueryLog& log) {
      phi.push_back(logit_distance(g.V, recover_from_log(log, 8.0, 1.0).V_hat));
    });
    REQUIRE(phi.size() == 2);
    CHECK(phi[1] == logit_distance(g.V, r.utility.V_hat));
    early += phi[0], late += phi[1];
  }
  CHECK(late * 5 <= early);

  const GameInstance g = synth_game(5, 5, 0.2, 8.0, 9);
  ResponseOracle a(g, 3), b(g, 3);
  const LearnResult ra = pure_learn(a, config(20000, 3)), rb = pure_learn(b, config(20000, 3));
  CHECK(ra.utility.V_hat == rb.utility.V_hat);

  // A checkpoint equals a fresh run truncated there.
  ResponseOracle c(g, 3);
  const LearnResult rc = pure_learn(c, config(7000, 3));
  Matrix mid;
  ResponseOracle d(g, 3);
  pure_learn(d, config(20000, 3), {7000},
             [&](std::uint64_t, const QueryLog& log) { mid = recover_from_log(log, 8.0, 1.0).V_hat; });
  CHECK(mid == rc.utility.V_hat);
}

TEST_CASE("PURE records queries when asked") {
  const GameInstance g = synth_game(3, 3, 0.2, 8.0, 1);
  ResponseOracle o(g, 1);
  LearnerConfig c = config(30, 1);
  c.record_queries = true;
  const LearnResult r = pure_learn(o, c);
  REQUIRE(r.log.queries.size() == 30);
  for (std::uint64_t t = 0; t < 30; ++t) {
    CHECK(r.log.queries[t].round == t);
    CHECK(r.log.queries[t].strategy == SimplexVector::vertex(3, t % 3));
  }
  CHECK(r.log.rounds == 30);
  CHECK(r.log.estimators[0].total == 10);
}

TEST_CASE("exploration trigger and replacement arithmetic") {
  const LearnerConfig c;
  CHECK(should_replace(EmpiricalDistribution(std::vector<std::uint64_t>{97, 1, 1, 1}), c));
  CHECK_FALSE(should_replace(EmpiricalDistribution(std::vector<std::uint64_t>{90, 4, 3, 3}), c));
  CHECK_FALSE(should_replace(EmpiricalDistribution(std::vector<std::uint64_t>{99, 0, 0, 0}), c));

  const std::vector<double> flat(4, 0.25);
  const SimplexVector x = exploration_strategy(flat, 1);
  CHECK(x[0] == 0.125);
  CHECK(x[1] == 0.625);
  CHECK(x[2] == 0.125);
  CHECK(x[3] == 0.125);
}

TEST_CASE("PURE-Exp") {
  // lambda = 1 never concentrates: identical to PURE.
  const GameInstance g = synth_game(6, 6, 0.2, 1.0, 4);
  ResponseOracle a(g, 5), b(g, 5);
  const LearnResult pe = pure_exp_learn(a, config(60000, 5)), p = pure_learn(b, config(60000, 5));
  CHECK(pe.log.replacements.empty());
  CHECK(pe.utility.V_hat == p.utility.V_hat);

  const GameInstance sharp = synth_game(10, 10, 0.2, 50.0, 1);
  ResponseOracle o(sharp, 1);
  const LearnResult r = pure_exp_learn(o, config(200000, 1));
  REQUIRE_FALSE(r.log.replacements.empty());
  for (const Replacement& rep : r.log.replacements) {
    CHECK(rep.new_strategy[rep.index] >= 0.5);
    CHECK(rep.discarded.total >= 100);
    CHECK(rep.discarded.max_probability() >= 0.95);
  }
  CHECK(is_nonsingular(r.log.strategy_matrix()));
  // Final estimators only hold samples gathered under the current strategies.
  std::uint64_t kept = 0, dropped = 0;
  for (const auto& e : r.log.estimators) kept += e.total;
  for (const auto& rep : r.log.replacements) dropped += rep.discarded.total;
  CHECK(kept + dropped == 200000);
}

TEST_CASE("security fit") {
  const auto [g, truth] = synth_security_game(8, 8.0, 3);
  const auto xs = vertices(8);
  const SecurityFit fit = security_fit(xs, exact(g, xs), 8.0);
  CHECK(fit.converged);
  double b_sum = 0, t_sum = 0;
  for (std::size_t j = 0; j < 8; ++j) {
    CHECK(std::abs(fit.params.w[j] - truth.w[j]) <= 1e-6);
    b_sum += fit.params.b[j], t_sum += truth.b[j];
  }
  CHECK(std::abs(b_sum) <= 1e-9);
  for (std::size_t j = 0; j < 8; ++j) CHECK(std::abs(fit.params.b[j] - (truth.b[j] - t_sum / 8)) <= 1e-6);

  SecurityGameParams zero{std::vector<double>(5, 0.0), {0.6, 0.7, 0.8, 0.9, 1.0}};
  const GameInstance z(Matrix(5, 5, 0.5), zero.materialize(), 4.0);
  const SecurityFit zf = security_fit(vertices(5), exact(z, vertices(5)), 4.0);
  for (double w : zf.params.w) CHECK(std::abs(w) <= 1e-6);

  std::mt19937_64 rng(4);
  std::vector<SimplexVector> rx, ry;
  for (int i = 0; i < 5; ++i) {
    rx.emplace_back(oracle::random_simplex(rng, 5));
    ry.emplace_back(oracle::random_simplex(rng, 5));
  }
  std::vector<double> p(10);
  for (double& v : p) v = std::uniform_real_distribution<double>(-1, 1)(rng);
  CHECK(relative_fd_error([&](std::span<const double> q) { return security_objective(q, rx, ry, 6.0); }, p) <= 1e-6);
}

TEST_CASE("cross-entropy fit") {
  std::mt19937_64 rng(5);
  std::vector<SimplexVector> xs, ys;
  for (int i = 0; i < 7; ++i) {
    xs.emplace_back(oracle::random_simplex(rng, 3));
    ys.emplace_back(oracle::random_simplex(rng, 4));
  }
  std::vector<double> p(12);
  for (double& v : p) v = std::uniform_real_distribution<double>(-1, 1)(rng);
  CHECK(relative_fd_error([&](std::span<const double> q) { return cross_entropy_objective(q, xs, ys, 2.0); }, p) <=
        1e-6);

  // With the identity basis and PURE's smoothed frequencies, the fit reduces to PURE.
  const GameInstance g = synth_game(4, 4, 0.2, 8.0, 6);
  ResponseOracle o(g, 6);
  const LearnResult r = pure_learn(o, config(40000, 6));
  OfflineOptions opts;
  opts.tol = 1e-13;
  const OfflineFit fit = fit_cross_entropy(r.log.strategies, r.log.smoothed_estimates(1.0), 8.0, 4, opts);
  CHECK(logit_distance(fit.utility.V_hat, r.utility.V_hat) <= 1e-8);

  CHECK_THROWS_AS(offline_fit(10, 5, g, 1), ArgumentError);
  CHECK_THROWS_AS(offline_fit(3, 100, g, 1), ArgumentError);
}

TEST_CASE("sample plan") {
  CHECK(sample_plan(10, 10, 0.05, 0.1, 0.1) == 76010);
  // ceil(20 ln(4000) / 0.001) = ceil(165880.99).
  CHECK(sample_plan(20, 10, 0.05, 0.1, 0.1) == 165881);
  const auto coarse = sample_plan(10, 10, 0.05, 1.0, 0.1);
  CHECK(std::abs(double(coarse) * 100 - 76010.0) <= 100);
  CHECK_THROWS_AS(sample_plan(10, 10, 0.05, 1.5, 0.1), ArgumentError);
  CHECK_THROWS_AS(sample_plan(10, 10, 1.0, 0.1, 0.1), ArgumentError);
}
