#include "stochq/simplex.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace stochq::lp {

namespace {

class Tableau {
public:
  Tableau(const FeasibilityProblem& p) {
    const Eigen::Index n = p.variables;
    const Eigen::Index m_le = p.less_equal.A.rows();
    const Eigen::Index m_eq = p.equal.A.rows();
    if ((m_le && p.less_equal.A.cols() != n) || (m_eq && p.equal.A.cols() != n) ||
        p.less_equal.b.size() != m_le || p.equal.b.size() != m_eq) {
      throw ValidationError("constraint dimensions do not match the variable count");
    }
    rows_ = m_le + m_eq;
    structural_ = n;

    // Count artificials: every equality row, and every <= row with negative rhs.
    Eigen::Index artificials = m_eq;
    for (Eigen::Index r = 0; r < m_le; ++r) {
      if (p.less_equal.b(r) < 0.0) ++artificials;
    }
    slack_begin_ = n;
    art_begin_ = n + m_le;
    cols_ = art_begin_ + artificials;
    t_ = RealMatrix::Zero(rows_ + 1, cols_ + 1);  // last row: objective, last col: rhs
    basis_.assign(static_cast<std::size_t>(rows_), -1);

    Eigen::Index art = art_begin_;
    for (Eigen::Index r = 0; r < m_le; ++r) {
      const double sign = p.less_equal.b(r) < 0.0 ? -1.0 : 1.0;
      t_.row(r).head(n) = sign * p.less_equal.A.row(r);
      t_(r, slack_begin_ + r) = sign;
      t_(r, cols_) = sign * p.less_equal.b(r);
      if (sign > 0.0) {
        basis_[r] = slack_begin_ + r;
      } else {
        t_(r, art) = 1.0;
        basis_[r] = art++;
      }
    }
    for (Eigen::Index e = 0; e < m_eq; ++e) {
      const Eigen::Index r = m_le + e;
      const double sign = p.equal.b(e) < 0.0 ? -1.0 : 1.0;
      t_.row(r).head(n) = sign * p.equal.A.row(e);
      t_(r, cols_) = sign * p.equal.b(e);
      t_(r, art) = 1.0;
      basis_[r] = art++;
    }
    // Phase-1 cost: sum of artificials, priced out against the initial basis.
    for (Eigen::Index c = art_begin_; c < cols_; ++c) t_(rows_, c) = 1.0;
    cost_ = RealVector::Zero(cols_ + 1);
    cost_.segment(art_begin_, cols_ - art_begin_).setOnes();
    original_ = t_.topRows(rows_);
    for (Eigen::Index r = 0; r < rows_; ++r) {
      if (basis_[r] >= art_begin_) t_.row(rows_) -= t_.row(r);
    }
  }

  LpResult run(const SimplexOptions& opt) {
    LpResult result;
    while (true) {
      if (result.pivots % kRefactorInterval == 0 && result.pivots > 0) refactor();
      // Bland: lowest-index column with negative reduced cost that admits a
      // well-conditioned pivot.
      Eigen::Index enter = -1;
      Eigen::Index leave = -1;
      for (Eigen::Index c = 0; c < cols_ && enter < 0; ++c) {
        if (t_(rows_, c) >= -opt.cost_tolerance) continue;
        leave = ratio_test(c, opt);
        if (leave >= 0) enter = c;
      }
      if (enter < 0) {
        if (fresh_) break;
        refactor();
        continue;
      }
      if (result.pivots >= opt.max_pivots) {
        result.status = LpStatus::iteration_limit;
        result.phase1_objective = objective();
        return result;
      }
      t_(leave, cols_) = std::max(t_(leave, cols_), 0.0);
      pivot(leave, enter);
      fresh_ = false;
      ++result.pivots;
    }
    result.phase1_objective = objective();
    if (result.phase1_objective > opt.feasibility_tolerance) {
      result.status = LpStatus::infeasible;
      return result;
    }
    result.status = LpStatus::feasible;
    result.x = RealVector::Zero(structural_);
    for (Eigen::Index r = 0; r < rows_; ++r) {
      if (basis_[r] < structural_) result.x(basis_[r]) = std::max(0.0, t_(r, cols_));
    }
    return result;
  }

private:
  static constexpr long kRefactorInterval = 50;

  // Rebuild the tableau from the original rows and the current basis, which
  // discards the roundoff accumulated by successive pivots.
  void refactor() {
    RealMatrix B(rows_, rows_);
    RealVector cb(rows_);
    for (Eigen::Index r = 0; r < rows_; ++r) {
      B.col(r) = original_.col(basis_[r]);
      cb(r) = cost_(basis_[r]);
    }
    t_.topRows(rows_) = B.partialPivLu().solve(original_);
    for (Eigen::Index r = 0; r < rows_; ++r) {
      t_.col(basis_[r]).head(rows_) = RealVector::Unit(rows_, r);
      t_(r, cols_) = std::max(t_(r, cols_), 0.0);
    }
    t_.row(rows_) = cost_.transpose() - cb.transpose() * t_.topRows(rows_);
    for (Eigen::Index r = 0; r < rows_; ++r) t_(rows_, basis_[r]) = 0.0;
    fresh_ = true;
  }

  double objective() const { return -t_(rows_, cols_); }

  // Min ratio over rows with a usable pivot; roundoff-negative right-hand
  // sides count as zero. Ties go to the lowest-index basic variable.
  Eigen::Index ratio_test(Eigen::Index c, const SimplexOptions& opt) const {
    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < rows_; ++r) {
      const double a = t_(r, c);
      if (a <= opt.pivot_tolerance) continue;
      const double ratio = std::max(t_(r, cols_), 0.0) / a;
      if (ratio < best - 1e-15 || (ratio <= best + 1e-15 && leave >= 0 && basis_[r] < basis_[leave])) {
        best = std::min(best, ratio);
        leave = r;
      }
    }
    return leave;
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[r] = c;
  }

  RealMatrix t_;
  RealMatrix original_;
  RealVector cost_;
  bool fresh_ = true;
  std::vector<Eigen::Index> basis_;
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  Eigen::Index structural_ = 0;
  Eigen::Index slack_begin_ = 0;
  Eigen::Index art_begin_ = 0;
};

}  // namespace

LpResult solve_feasibility(const FeasibilityProblem& problem, const SimplexOptions& options) {
  Tableau tableau(problem);
  return tableau.run(options);
}

}  // namespace stochq::lp
