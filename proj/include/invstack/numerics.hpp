#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "invstack/matrix.hpp"
#include "invstack/simplex.hpp"

namespace invstack {

// ln sum_j exp(z_j), evaluated with max-subtraction.
double log_sum_exp(std::span<const double> z);

SimplexVector softmax(std::span<const double> z);

/// Solves A Z = B by LU decomposition with partial pivoting.
///
/// Throws SingularMatrixError when a pivot falls below `kPivotTolerance`
/// in magnitude.
Matrix lu_solve(const Matrix& a, const Matrix& b);

inline constexpr double kPivotTolerance = 1e-12;

// True when LU with partial pivoting finds no pivot below kPivotTolerance.
bool is_nonsingular(const Matrix& a);

// ---------------------------------------------------------------------------
// Linear programming

enum class Sense { kLessEqual, kEqual, kGreaterEqual };

/// maximize c.x  s.t.  A x (sense) b,  x >= lower.
///
/// A lower bound of -infinity marks a free variable.
struct LinearProgram {
  std::vector<double> objective;
  Matrix constraints;
  std::vector<double> bounds;
  std::vector<Sense> senses;
  std::vector<double> lower;  // empty means all zeros

  void validate() const;
};

struct LpSolution {
  std::vector<double> x;
  double value = 0.0;
};

inline constexpr double kLpTolerance = 1e-9;

// Dense two-phase tableau simplex with Bland's anti-cycling rule.
// Throws InfeasibleError / UnboundedError.
LpSolution lp_solve(const LinearProgram& lp);

// ---------------------------------------------------------------------------
// Smooth convex minimization

struct ValueAndGradient {
  double value = 0.0;
  std::vector<double> gradient;
};

struct ConvexProblem {
  std::size_t dimension = 0;
  std::function<ValueAndGradient(std::span<const double>)> evaluate;
};

enum class DescentMethod {
  kGradientArmijo,  // gradient descent + Armijo backtracking
  kAdam,            // fixed-rate Adam, for the offline baseline
};

struct MinimizeOptions {
  DescentMethod method = DescentMethod::kGradientArmijo;
  std::size_t max_iterations = 200000;
  double armijo_c = 1e-4;
  double shrink = 0.5;
  double adam_learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
};

struct MinimizeResult {
  std::vector<double> params;
  double value = std::numeric_limits<double>::infinity();
  double gradient_norm = std::numeric_limits<double>::infinity();  // max-norm
  std::size_t iterations = 0;
  bool converged = false;
};

/// Minimizes a smooth convex objective until the gradient max-norm is at most
/// `tol`. On hitting the iteration cap, returns the best iterate seen with
/// `converged == false`. Throws NumericalError on a non-finite objective.
MinimizeResult minimize_convex(const ConvexProblem& problem, std::span<const double> init,
                               double tol, const MinimizeOptions& options = {});

}  // namespace invstack
