#pragma once

// Exact two-phase primal simplex over the rationals with Bland's rule.
// Feasibility verdicts double as proofs here, so there is no floating point
// and no tolerance anywhere: a phase-1 optimum of exactly zero is feasible,
// anything else is a certified infeasibility gap.

#include <optional>
#include <vector>

#include "jointchoice/rational.hpp"

namespace jointchoice {

// minimize objective . x  subject to  rows x = rhs, x >= 0
struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<std::vector<Rational>> rows;
  std::vector<Rational> rhs;
};

enum class LpStatus { kOptimal, kInfeasible };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<Rational> point;  // when optimal
  Rational objective;           // phase-2 optimum, or the phase-1 gap (> 0) when infeasible
};

class SimplexSolver {
 public:
  explicit SimplexSolver(const LinearProgram& lp) : n_(lp.num_vars), m_(lp.rows.size()) {
    a_.assign(m_, std::vector<Rational>(n_ + m_, Rational(0)));
    b_.assign(m_, Rational(0));
    basis_.assign(m_, 0);
    enterable_.assign(n_ + m_, true);
    for (std::size_t i = 0; i < m_; ++i) {
      if (lp.rows[i].size() != n_) throw InternalError("LP row width mismatch");
      bool negate = lp.rhs[i] < 0;
      for (std::size_t j = 0; j < n_; ++j) a_[i][j] = negate ? -lp.rows[i][j] : lp.rows[i][j];
      b_[i] = negate ? -lp.rhs[i] : lp.rhs[i];
      a_[i][n_ + i] = 1;       // artificial
      basis_[i] = n_ + i;
    }
  }

  // Phase 1 only: is {x >= 0 : Ax = b} non-empty?
  LpSolution solve_feasibility() {
    Rational gap = run_phase1();
    LpSolution out;
    if (gap != 0) {
      out.status = LpStatus::kInfeasible;
      out.objective = gap;
      return out;
    }
    out.status = LpStatus::kOptimal;
    out.objective = 0;
    out.point = extract_point();
    return out;
  }

  // Full two-phase minimization of objective . x.
  LpSolution minimize(const std::vector<Rational>& objective) {
    if (objective.size() != n_) throw InternalError("LP objective width mismatch");
    Rational gap = run_phase1();
    LpSolution out;
    if (gap != 0) {
      out.status = LpStatus::kInfeasible;
      out.objective = gap;
      return out;
    }
    // Phase 2: block artificial columns for good and install the real costs.
    for (std::size_t j = n_; j < n_ + m_; ++j) enterable_[j] = false;
    cost_.assign(n_ + m_, Rational(0));
    value_ = 0;
    for (std::size_t j = 0; j < n_; ++j) cost_[j] = objective[j];
    for (std::size_t i = 0; i < m_; ++i) {
      std::size_t bj = basis_[i];
      Rational cb = bj < n_ ? objective[bj] : Rational(0);
      if (cb == 0) continue;
      for (std::size_t j = 0; j < n_ + m_; ++j) cost_[j] -= cb * a_[i][j];
      value_ += cb * b_[i];
    }
    run_bland();
    out.status = LpStatus::kOptimal;
    out.objective = value_;
    out.point = extract_point();
    return out;
  }

 private:
  Rational run_phase1() {
    // Artificial basis; phase-1 cost is the sum of artificials.
    cost_.assign(n_ + m_, Rational(0));
    value_ = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_ + m_; ++j) cost_[j] -= a_[i][j];
      cost_[n_ + i] += 1;  // the artificial's own unit cost cancels its basis column
      value_ += b_[i];
    }
    run_bland();
    if (value_ != 0) return value_;
    drive_out_artificials();
    return 0;
  }

  void run_bland() {
    while (true) {
      std::optional<std::size_t> entering;
      for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (enterable_[j] && cost_[j] < 0) {
          entering = j;
          break;
        }
      }
      if (!entering) return;
      std::size_t col = *entering;
      std::optional<std::size_t> leaving;
      Rational best_ratio;
      for (std::size_t i = 0; i < m_; ++i) {
        if (a_[i][col] <= 0) continue;
        Rational ratio = b_[i] / a_[i][col];
        if (!leaving || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[*leaving])) {
          leaving = i;
          best_ratio = ratio;
        }
      }
      if (!leaving) throw InternalError("simplex detected an unbounded direction");
      pivot(*leaving, col);
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    Rational piv = a_[row][col];
    if (piv == 0) throw InternalError("pivot on a zero entry");
    for (auto& v : a_[row]) v /= piv;
    b_[row] /= piv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row || a_[i][col] == 0) continue;
      Rational factor = a_[i][col];
      for (std::size_t j = 0; j < n_ + m_; ++j)
        if (a_[row][j] != 0) a_[i][j] -= factor * a_[row][j];
      b_[i] -= factor * b_[row];
    }
    if (cost_[col] != 0) {
      // Entering col at ratio b_[row] moves the objective by cost_[col] * ratio.
      Rational factor = cost_[col];
      for (std::size_t j = 0; j < n_ + m_; ++j)
        if (a_[row][j] != 0) cost_[j] -= factor * a_[row][j];
      value_ += factor * b_[row];
    }
    std::size_t old = basis_[row];
    if (old >= n_) enterable_[old] = false;  // artificials never re-enter
    basis_[row] = col;
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      // The artificial sits at value zero; swap in any real column with a
      // nonzero entry. If the row has none it is a redundant constraint and
      // stays parked on its zero artificial, which is blocked from entering.
      std::optional<std::size_t> col;
      for (std::size_t j = 0; j < n_ && !col; ++j)
        if (a_[i][j] != 0) col = j;
      if (col) pivot(i, *col);
    }
  }

  std::vector<Rational> extract_point() const {
    std::vector<Rational> x(n_, Rational(0));
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) x[basis_[i]] = b_[i];
    return x;
  }

  std::size_t n_, m_;
  std::vector<std::vector<Rational>> a_;
  std::vector<Rational> b_;
  std::vector<std::size_t> basis_;
  std::vector<Rational> cost_;
  std::vector<bool> enterable_;
  Rational value_;
};

inline LpSolution solve_feasibility(const LinearProgram& lp) {
  return SimplexSolver(lp).solve_feasibility();
}

inline LpSolution minimize(const LinearProgram& lp, const std::vector<Rational>& objective) {
  return SimplexSolver(lp).minimize(objective);
}

inline LpSolution maximize(const LinearProgram& lp, const std::vector<Rational>& objective) {
  std::vector<Rational> negated(objective.size());
  for (std::size_t i = 0; i < objective.size(); ++i) negated[i] = -objective[i];
  LpSolution solution = SimplexSolver(lp).minimize(negated);
  solution.objective = -solution.objective;
  return solution;
}

}  // namespace jointchoice
