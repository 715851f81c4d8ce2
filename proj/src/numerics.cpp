#include "invstack/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "invstack/errors.hpp"

namespace invstack {

double log_sum_exp(std::span<const double> z) {
  if (z.empty()) throw ArgumentError("log_sum_exp of an empty vector");
  const double hi = *std::max_element(z.begin(), z.end());
  if (!std::isfinite(hi)) throw ArgumentError("log_sum_exp requires finite inputs");
  double s = 0.0;
  for (double v : z) s += std::exp(v - hi);
  return hi + std::log(s);
}

SimplexVector softmax(std::span<const double> z) {
  const double lse = log_sum_exp(z);
  std::vector<double> p(z.size());
  double s = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    p[j] = std::exp(z[j] - lse);
    s += p[j];
  }
  for (double& v : p) v /= s;
  return SimplexVector(std::move(p));
}

Matrix lu_solve(const Matrix& a, const Matrix& b) {
  const std::size_t k = a.rows();
  if (a.cols() != k) throw ArgumentError("lu_solve needs a square matrix");
  if (b.rows() != k) throw ArgumentError("lu_solve right-hand side has the wrong row count");
  Matrix lu = a;
  Matrix z = b;
  const std::size_t p = b.cols();

  // Forward elimination applied to the right-hand side in place.
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < k; ++r) {
      if (std::abs(lu(r, c)) > std::abs(lu(piv, c))) piv = r;
    }
    if (std::abs(lu(piv, c)) < kPivotTolerance) {
      throw SingularMatrixError("matrix is singular to working precision (column " +
                                std::to_string(c) + ")");
    }
    if (piv != c) {
      std::swap_ranges(lu.row(c).begin(), lu.row(c).end(), lu.row(piv).begin());
      std::swap_ranges(z.row(c).begin(), z.row(c).end(), z.row(piv).begin());
    }
    const double d = lu(c, c);
    for (std::size_t r = c + 1; r < k; ++r) {
      const double f = lu(r, c) / d;
      if (f == 0.0) continue;
      lu(r, c) = f;
      for (std::size_t j = c + 1; j < k; ++j) lu(r, j) -= f * lu(c, j);
      for (std::size_t j = 0; j < p; ++j) z(r, j) -= f * z(c, j);
    }
  }
  for (std::size_t c = k; c-- > 0;) {
    for (std::size_t j = 0; j < p; ++j) {
      double s = z(c, j);
      for (std::size_t q = c + 1; q < k; ++q) s -= lu(c, q) * z(q, j);
      z(c, j) = s / lu(c, c);
    }
  }
  return z;
}

bool is_nonsingular(const Matrix& a) {
  if (a.rows() != a.cols() || a.empty()) return false;
  try {
    lu_solve(a, Matrix(a.rows(), 1, 1.0));
  } catch (const SingularMatrixError&) {
    return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

void LinearProgram::validate() const {
  if (objective.empty()) throw ArgumentError("linear program has no variables");
  if (constraints.empty()) throw ArgumentError("linear program has no constraints");
  if (constraints.cols() != objective.size()) throw ArgumentError("constraint columns do not match objective length");
  if (constraints.rows() != bounds.size()) throw ArgumentError("constraint rows do not match bounds length");
  if (senses.size() != bounds.size()) throw ArgumentError("one sense per constraint row is required");
  if (!lower.empty() && lower.size() != objective.size()) throw ArgumentError("lower bound length mismatch");
}

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), t_((rows + 1) * (cols + 1), 0.0) {}

  double& at(std::size_t r, std::size_t c) { return t_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  // Row index rows_ holds reduced costs; its rhs holds the objective value.
  double& cost(std::size_t c) { return at(rows_, c); }

  void pivot(std::size_t pr, std::size_t pc) {
    const double d = at(pr, pc);
    for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) /= d;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    at(pr, pc) = 1.0;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> t_;
};

// Loads `costs` (maximize) into the reduced-cost row relative to `basis`.
void load_objective(Tableau& tab, const std::vector<double>& costs, const std::vector<std::size_t>& basis) {
  for (std::size_t c = 0; c < tab.cols(); ++c) tab.cost(c) = costs[c];
  tab.rhs(tab.rows()) = 0.0;
  for (std::size_t r = 0; r < tab.rows(); ++r) {
    const double cb = costs[basis[r]];
    if (cb == 0.0) continue;
    for (std::size_t c = 0; c <= tab.cols(); ++c) tab.at(tab.rows(), c) -= cb * tab.at(r, c);
  }
}

// Runs primal simplex iterations with Bland's rule. Returns false if unbounded.
bool run_simplex(Tableau& tab, std::vector<std::size_t>& basis, const std::vector<bool>& allowed) {
  for (;;) {
    std::size_t enter = tab.cols();
    for (std::size_t c = 0; c < tab.cols(); ++c) {
      if (allowed[c] && tab.cost(c) > kLpTolerance) {
        enter = c;
        break;
      }
    }
    if (enter == tab.cols()) return true;

    std::size_t leave = tab.rows();
    double best_ratio = 0.0;
    for (std::size_t r = 0; r < tab.rows(); ++r) {
      const double a = tab.at(r, enter);
      if (a <= kLpTolerance) continue;
      const double ratio = tab.rhs(r) / a;
      if (leave == tab.rows() || ratio < best_ratio - kLpTolerance) {
        leave = r;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + kLpTolerance && basis[r] < basis[leave]) {
        leave = r;
        best_ratio = std::min(best_ratio, ratio);
      }
    }
    if (leave == tab.rows()) return false;
    tab.pivot(leave, enter);
    basis[leave] = enter;
  }
}

}  // namespace

LpSolution lp_solve(const LinearProgram& lp) {
  lp.validate();
  const std::size_t nv = lp.objective.size();
  const std::size_t nr = lp.bounds.size();

  // Map every original variable onto nonnegative columns: shifted (x = l + x')
  // or split (x = x+ - x-) when free.
  std::vector<std::size_t> pos_col(nv), neg_col(nv, SIZE_MAX);
  std::vector<double> shift(nv, 0.0);
  std::size_t ncols = 0;
  for (std::size_t j = 0; j < nv; ++j) {
    const double l = lp.lower.empty() ? 0.0 : lp.lower[j];
    pos_col[j] = ncols++;
    if (std::isinf(l) && l < 0) {
      neg_col[j] = ncols++;
    } else if (!std::isfinite(l)) {
      throw ArgumentError("lower bounds must be finite or -infinity");
    } else {
      shift[j] = l;
    }
  }
  const std::size_t nstruct = ncols;

  std::vector<double> b(nr);
  std::vector<Sense> sense = lp.senses;
  Matrix a(nr, nstruct);
  std::vector<double> sign(nr, 1.0);
  for (std::size_t r = 0; r < nr; ++r) {
    double br = lp.bounds[r];
    for (std::size_t j = 0; j < nv; ++j) {
      const double v = lp.constraints(r, j);
      br -= v * shift[j];
      a(r, pos_col[j]) = v;
      if (neg_col[j] != SIZE_MAX) a(r, neg_col[j]) = -v;
    }
    if (br < 0) {
      sign[r] = -1.0;
      br = -br;
      if (sense[r] == Sense::kLessEqual) sense[r] = Sense::kGreaterEqual;
      else if (sense[r] == Sense::kGreaterEqual) sense[r] = Sense::kLessEqual;
    }
    b[r] = br;
  }

  std::size_t nslack = 0, nart = 0;
  for (Sense s : sense) {
    if (s != Sense::kEqual) ++nslack;
    if (s != Sense::kLessEqual) ++nart;
  }
  const std::size_t total = nstruct + nslack + nart;
  Tableau tab(nr, total);
  std::vector<std::size_t> basis(nr);
  std::vector<bool> is_art(total, false);
  std::size_t slack_at = nstruct, art_at = nstruct + nslack;
  for (std::size_t r = 0; r < nr; ++r) {
    for (std::size_t c = 0; c < nstruct; ++c) tab.at(r, c) = sign[r] * a(r, c);
    tab.rhs(r) = b[r];
    switch (sense[r]) {
      case Sense::kLessEqual:
        tab.at(r, slack_at) = 1.0;
        basis[r] = slack_at++;
        break;
      case Sense::kGreaterEqual:
        tab.at(r, slack_at++) = -1.0;
        tab.at(r, art_at) = 1.0;
        is_art[art_at] = true;
        basis[r] = art_at++;
        break;
      case Sense::kEqual:
        tab.at(r, art_at) = 1.0;
        is_art[art_at] = true;
        basis[r] = art_at++;
        break;
    }
  }

  double bscale = 1.0;
  for (double v : b) bscale = std::max(bscale, std::abs(v));

  std::vector<bool> allowed(total, true);
  if (nart > 0) {
    std::vector<double> phase1(total, 0.0);
    for (std::size_t c = 0; c < total; ++c) {
      if (is_art[c]) phase1[c] = -1.0;
    }
    load_objective(tab, phase1, basis);
    run_simplex(tab, basis, allowed);
    // rhs of the cost row is -(objective value); phase-1 optimum is -sum(art).
    if (tab.rhs(nr) > kLpTolerance * bscale) {
      throw InfeasibleError("linear program is infeasible");
    }
    for (std::size_t r = 0; r < nr; ++r) {
      if (!is_art[basis[r]]) continue;
      for (std::size_t c = 0; c < total; ++c) {
        if (!is_art[c] && std::abs(tab.at(r, c)) > kLpTolerance) {
          tab.pivot(r, c);
          basis[r] = c;
          break;
        }
      }
    }
    for (std::size_t c = 0; c < total; ++c) {
      if (is_art[c]) allowed[c] = false;
    }
  }

  std::vector<double> phase2(total, 0.0);
  for (std::size_t j = 0; j < nv; ++j) {
    phase2[pos_col[j]] = lp.objective[j];
    if (neg_col[j] != SIZE_MAX) phase2[neg_col[j]] = -lp.objective[j];
  }
  load_objective(tab, phase2, basis);
  if (!run_simplex(tab, basis, allowed)) throw UnboundedError("linear program is unbounded");

  std::vector<double> col_value(total, 0.0);
  for (std::size_t r = 0; r < nr; ++r) col_value[basis[r]] = std::max(0.0, tab.rhs(r));

  LpSolution out;
  out.x.resize(nv);
  for (std::size_t j = 0; j < nv; ++j) {
    double v = shift[j] + col_value[pos_col[j]];
    if (neg_col[j] != SIZE_MAX) v -= col_value[neg_col[j]];
    out.x[j] = v;
  }
  out.value = dot(lp.objective, out.x);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double max_norm(std::span<const double> g) {
  double m = 0.0;
  for (double v : g) m = std::max(m, std::abs(v));
  return m;
}

ValueAndGradient checked_eval(const ConvexProblem& problem, std::span<const double> x) {
  ValueAndGradient vg = problem.evaluate(x);
  if (!std::isfinite(vg.value)) throw NumericalError("objective returned a non-finite value");
  if (vg.gradient.size() != problem.dimension) throw NumericalError("gradient has the wrong dimension");
  for (double g : vg.gradient) {
    if (!std::isfinite(g)) throw NumericalError("objective returned a non-finite gradient");
  }
  return vg;
}

MinimizeResult minimize_armijo(const ConvexProblem& problem, std::vector<double> x, double tol,
                               const MinimizeOptions& opt) {
  const std::size_t d = problem.dimension;
  ValueAndGradient cur = checked_eval(problem, x);
  MinimizeResult best{x, cur.value, max_norm(cur.gradient), 0, false};

  std::vector<double> prev_x, prev_g;
  double step = 1.0;
  std::vector<double> trial(d);
  for (std::size_t it = 0; it < opt.max_iterations; ++it) {
    const double gnorm = max_norm(cur.gradient);
    if (gnorm <= tol) {
      return {x, cur.value, gnorm, it, true};
    }
    // Barzilai-Borwein guess for the initial trial step, then backtrack.
    if (!prev_x.empty()) {
      double ss = 0.0, sy = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double s = x[k] - prev_x[k];
        const double y = cur.gradient[k] - prev_g[k];
        ss += s * s;
        sy += s * y;
      }
      step = (sy > 0.0 && ss > 0.0) ? ss / sy : step * 2.0;
    }
    double g2 = 0.0;
    for (double g : cur.gradient) g2 += g * g;
    const double slack = 1e-13 * (1.0 + std::abs(cur.value));

    bool accepted = false;
    ValueAndGradient next;
    for (int ls = 0; ls < 200; ++ls) {
      for (std::size_t k = 0; k < d; ++k) trial[k] = x[k] - step * cur.gradient[k];
      next = checked_eval(problem, trial);
      if (next.value <= cur.value - opt.armijo_c * step * g2) {
        accepted = true;
        break;
      }
      // Below roundoff the sufficient-decrease test is meaningless; accept any
      // step that does not raise the objective measurably and shrinks the gradient.
      if (next.value <= cur.value + slack && max_norm(next.gradient) < gnorm) {
        accepted = true;
        break;
      }
      step *= opt.shrink;
    }
    if (!accepted) {
      best.iterations = it;
      return best;
    }
    prev_x = x;
    prev_g = cur.gradient;
    x = trial;
    cur = std::move(next);
    if (cur.value < best.value) {
      best.params = x;
      best.value = cur.value;
      best.gradient_norm = max_norm(cur.gradient);
    }
  }
  const double gnorm = max_norm(cur.gradient);
  if (gnorm <= tol) return {x, cur.value, gnorm, opt.max_iterations, true};
  best.iterations = opt.max_iterations;
  return best;
}

MinimizeResult minimize_adam(const ConvexProblem& problem, std::vector<double> x, double tol,
                             const MinimizeOptions& opt) {
  const std::size_t d = problem.dimension;
  std::vector<double> m1(d, 0.0), m2(d, 0.0);
  ValueAndGradient cur = checked_eval(problem, x);
  MinimizeResult best{x, cur.value, max_norm(cur.gradient), 0, false};
  double b1t = 1.0, b2t = 1.0;
  for (std::size_t it = 0; it < opt.max_iterations; ++it) {
    const double gnorm = max_norm(cur.gradient);
    if (gnorm <= tol) return {x, cur.value, gnorm, it, true};
    b1t *= opt.adam_beta1;
    b2t *= opt.adam_beta2;
    for (std::size_t k = 0; k < d; ++k) {
      const double g = cur.gradient[k];
      m1[k] = opt.adam_beta1 * m1[k] + (1.0 - opt.adam_beta1) * g;
      m2[k] = opt.adam_beta2 * m2[k] + (1.0 - opt.adam_beta2) * g * g;
      const double mh = m1[k] / (1.0 - b1t);
      const double vh = m2[k] / (1.0 - b2t);
      x[k] -= opt.adam_learning_rate * mh / (std::sqrt(vh) + opt.adam_epsilon);
    }
    cur = checked_eval(problem, x);
    if (cur.value < best.value) {
      best.params = x;
      best.value = cur.value;
      best.gradient_norm = max_norm(cur.gradient);
    }
  }
  const double gnorm = max_norm(cur.gradient);
  if (gnorm <= tol) return {x, cur.value, gnorm, opt.max_iterations, true};
  best.iterations = opt.max_iterations;
  return best;
}

}  // namespace

MinimizeResult minimize_convex(const ConvexProblem& problem, std::span<const double> init, double tol,
                               const MinimizeOptions& options) {
  if (!(tol > 0.0)) throw ArgumentError("tolerance must be positive");
  if (init.size() != problem.dimension) throw ArgumentError("initial point has the wrong dimension");
  for (double v : init) {
    if (!std::isfinite(v)) throw ArgumentError("initial point must be finite");
  }
  if (!problem.evaluate) throw ArgumentError("convex problem has no evaluator");
  std::vector<double> x(init.begin(), init.end());
  switch (options.method) {
    case DescentMethod::kAdam:
      return minimize_adam(problem, std::move(x), tol, options);
    case DescentMethod::kGradientArmijo:
    default:
      return minimize_armijo(problem, std::move(x), tol, options);
  }
}

}  // namespace invstack
