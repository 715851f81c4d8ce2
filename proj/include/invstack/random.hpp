#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace invstack {

/// Seeded generator with platform-independent output.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Every derived quantity (uniforms, normals, Dirichlet draws) is
/// computed here by hand rather than through <random> distributions, whose
/// algorithms are implementation-defined. Bump kRngVersion whenever any
/// derivation below changes, since it changes every replayed log.
class Rng {
 public:
  static constexpr int kRngVersion = 1;

  // Independent streams for one experiment seed.
  enum Stream : std::uint64_t { kGame = 0, kOracle = 1, kLearner = 2 };

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Standard normal via Box-Muller (both halves are used).
  double normal();
  // Standard Gumbel: -ln(-ln U), U in (0, 1).
  double gumbel();
  // Flat Dirichlet over n coordinates: normalized Exp(1) draws.
  std::vector<double> dirichlet_flat(std::size_t n);

 private:
  double open_uniform();

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace invstack
