#pragma once

#include <vector>

#include "invstack/game.hpp"
#include "invstack/matrix.hpp"
#include "invstack/simplex.hpp"

namespace invstack {

/// An estimated follower payoff matrix. Only meaningful up to adding a
/// constant to each row; compare with logit_distance, not entrywise.
struct RecoveredUtility {
  Matrix V_hat;
};

/// (1/mn) sum_i min_z || V_i - V_hat_i - z ||_1.
///
/// The inner minimum is attained at a median of the row difference.
double logit_distance(const Matrix& v, const Matrix& v_hat);

// min_z sum_j |d_j - z| for a single row difference d.
double shift_invariant_l1(std::vector<double> d);

// Smallest quantal-response probability over all queried strategies.
double least_nonzero_measure(const GameInstance& game, const std::vector<SimplexVector>& queries);

// Smallest eps >= 0 with y_hat_j / y_j in [1 - eps, 1 / (1 - eps)] for every
// j with y_j > 0. Throws SupportError if y_hat has mass where y has none.
double multiplicative_ratio(const SimplexVector& y, const SimplexVector& y_hat);

}  // namespace invstack
