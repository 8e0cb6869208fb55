#include "boxcast/simplex.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "boxcast/errors.hpp"

namespace boxcast {

namespace {

class RevisedSimplex {
 public:
  RevisedSimplex(const LpProblem& lp, const LpOptions& opt) : lp_(lp), opt_(opt), m_(lp.num_rows) {
    n_ = static_cast<int>(lp.columns.size());
    sign_.assign(m_, 1.0);
    b_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      if (lp.rhs[i] < 0) sign_[i] = -1.0;
      b_(i) = sign_[i] * lp.rhs[i];
    }
    basis_.resize(m_);
    in_basis_.assign(n_ + m_, -1);
    for (int i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      in_basis_[n_ + i] = i;
    }
    binv_ = Eigen::MatrixXd::Identity(m_, m_);
    xb_ = b_;
  }

  LpSolution run() {
    LpSolution sol;
    if (try_warm_start()) {
      cost_.assign(n_ + m_, 0.0);
      for (int j = 0; j < n_; ++j) cost_[j] = lp_.cost[j];
      return finish(sol, iterate(false));
    }
    // Phase 1: artificials carry cost 1.
    cost_.assign(n_ + m_, 0.0);
    for (int i = 0; i < m_; ++i) cost_[n_ + i] = 1.0;
    LpStatus st = iterate(true);
    double infeas = 0.0;
    for (int i = 0; i < m_; ++i)
      if (basis_[i] >= n_) infeas += xb_(i);
    if (st == LpStatus::iteration_limit) return finish(sol, st);
    double scale = 1.0 + b_.cwiseAbs().maxCoeff();
    if (infeas > opt_.feasibility_tol * scale) return finish(sol, LpStatus::infeasible);
    for (int i = 0; i < m_; ++i) cost_[n_ + i] = 0.0;
    for (int j = 0; j < n_; ++j) cost_[j] = lp_.cost[j];
    st = iterate(false);
    return finish(sol, st);
  }

 private:
  bool try_warm_start() {
    if (static_cast<int>(lp_.start_basis.size()) != m_) return false;
    std::vector<int> saved = basis_;
    std::fill(in_basis_.begin(), in_basis_.end(), -1);
    for (int i = 0; i < m_; ++i) {
      int j = lp_.start_basis[i];
      if (j < 0 || j >= n_ || in_basis_[j] >= 0) return reset(saved);
      basis_[i] = j;
      in_basis_[j] = i;
    }
    refactor();
    if (!binv_.allFinite()) return reset(saved);
    for (int i = 0; i < m_; ++i)
      if (xb_(i) < -opt_.feasibility_tol) return reset(saved);
    return true;
  }

  bool reset(const std::vector<int>& saved) {
    basis_ = saved;
    std::fill(in_basis_.begin(), in_basis_.end(), -1);
    for (int i = 0; i < m_; ++i) in_basis_[basis_[i]] = i;
    binv_ = Eigen::MatrixXd::Identity(m_, m_);
    xb_ = b_;
    return false;
  }

  double column_dot(int j, const Eigen::VectorXd& y) const {
    if (j >= n_) return y(j - n_);
    const SparseColumn& c = lp_.columns[j];
    double s = 0.0;
    for (std::size_t k = 0; k < c.rows.size(); ++k) s += sign_[c.rows[k]] * c.values[k] * y(c.rows[k]);
    return s;
  }

  Eigen::VectorXd ftran(int j) const {
    if (j >= n_) return binv_.col(j - n_);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(m_);
    const SparseColumn& c = lp_.columns[j];
    for (std::size_t k = 0; k < c.rows.size(); ++k) u += (sign_[c.rows[k]] * c.values[k]) * binv_.col(c.rows[k]);
    return u;
  }

  void refactor() {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m_, m_);
    for (int i = 0; i < m_; ++i) {
      int j = basis_[i];
      if (j >= n_) {
        B(j - n_, i) = 1.0;
      } else {
        const SparseColumn& c = lp_.columns[j];
        for (std::size_t k = 0; k < c.rows.size(); ++k) B(c.rows[k], i) = sign_[c.rows[k]] * c.values[k];
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    binv_ = lu.inverse();
    xb_ = binv_ * b_;
    for (int i = 0; i < m_; ++i)
      if (xb_(i) < 0 && xb_(i) > -opt_.feasibility_tol) xb_(i) = 0.0;
    since_refactor_ = 0;
  }

  LpStatus iterate(bool phase1) {
    int degenerate = 0;
    Eigen::VectorXd cb(m_);
    while (iterations_ < opt_.max_iterations) {
      for (int i = 0; i < m_; ++i) cb(i) = cost_[basis_[i]];
      Eigen::VectorXd y = binv_.transpose() * cb;
      const bool bland = degenerate >= opt_.degenerate_streak;
      const int limit = phase1 ? n_ + m_ : n_;  // artificials never re-enter in phase 2
      int enter = -1;
      double best = -opt_.optimality_tol;
      auto price = [&](int j) {
        if (in_basis_[j] >= 0) return false;
        double d = cost_[j] - column_dot(j, y);
        if (d < best) {
          enter = j;
          best = d;
          return true;
        }
        return false;
      };
      if (bland || opt_.pricing_chunk <= 0 || opt_.pricing_chunk >= limit) {
        for (int j = 0; j < limit; ++j)
          if (price(j) && bland) break;
      } else {
        // Rotating chunks; stop at the first chunk holding an improving column.
        for (int scanned = 0; scanned < limit && enter < 0; scanned += opt_.pricing_chunk) {
          for (int k = 0; k < opt_.pricing_chunk && scanned + k < limit; ++k) price((cursor_ + k) % limit);
          cursor_ = (cursor_ + opt_.pricing_chunk) % limit;
        }
      }
      if (enter < 0) return LpStatus::optimal;

      Eigen::VectorXd u = ftran(enter);
      int leave = -1;
      double theta = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        double ui = u(i);
        double ratio;
        if (ui > opt_.pivot_tol) {
          ratio = std::max(xb_(i), 0.0) / ui;
        } else if (!phase1 && basis_[i] >= n_ && std::abs(ui) > opt_.pivot_tol) {
          ratio = 0.0;  // basic artificial pinned at zero
        } else {
          continue;
        }
        if (ratio < theta - 1e-14 ||
            (ratio <= theta + 1e-14 && leave >= 0 && basis_[i] < basis_[leave])) {
          theta = ratio;
          leave = i;
        }
      }
      if (leave < 0) return LpStatus::unbounded;

      degenerate = theta <= 1e-12 ? degenerate + 1 : 0;
      xb_ -= theta * u;
      xb_(leave) = theta;
      const double piv = u(leave);
      binv_.row(leave) /= piv;
      for (int i = 0; i < m_; ++i)
        if (i != leave && u(i) != 0.0) binv_.row(i) -= u(i) * binv_.row(leave);
      in_basis_[basis_[leave]] = -1;
      basis_[leave] = enter;
      in_basis_[enter] = leave;
      ++iterations_;
      if (++since_refactor_ >= opt_.refactor_every) refactor();
    }
    return LpStatus::iteration_limit;
  }

  LpSolution& finish(LpSolution& sol, LpStatus st) {
    refactor();
    sol.status = st;
    sol.iterations = iterations_;
    sol.x.assign(n_, 0.0);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) sol.x[basis_[i]] = std::max(xb_(i), 0.0);
    Eigen::VectorXd cb(m_);
    for (int i = 0; i < m_; ++i) cb(i) = cost_[basis_[i]];
    Eigen::VectorXd y = binv_.transpose() * cb;
    sol.duals.resize(m_);
    for (int i = 0; i < m_; ++i) sol.duals[i] = sign_[i] * y(i);
    sol.objective = 0.0;
    for (int j = 0; j < n_; ++j) sol.objective += lp_.cost[j] * sol.x[j];
    std::vector<double> r(lp_.rhs);
    for (int j = 0; j < n_; ++j) {
      if (sol.x[j] == 0.0) continue;
      const SparseColumn& c = lp_.columns[j];
      for (std::size_t k = 0; k < c.rows.size(); ++k) r[c.rows[k]] -= c.values[k] * sol.x[j];
    }
    sol.primal_residual = 0.0;
    for (double v : r) sol.primal_residual = std::max(sol.primal_residual, std::abs(v));
    return sol;
  }

  const LpProblem& lp_;
  LpOptions opt_;
  int m_, n_ = 0;
  std::vector<double> sign_;
  Eigen::VectorXd b_, xb_;
  std::vector<int> basis_, in_basis_;
  std::vector<double> cost_;
  Eigen::MatrixXd binv_;
  int iterations_ = 0;
  int since_refactor_ = 0;
  int cursor_ = 0;
};

}  // namespace

LpSolution solve_lp(const LpProblem& lp, const LpOptions& opt) {
  if (static_cast<int>(lp.rhs.size()) != lp.num_rows || lp.cost.size() != lp.columns.size())
    throw DimensionError("LP: inconsistent problem dimensions");
  for (const SparseColumn& c : lp.columns)
    for (int r : c.rows)
      if (r < 0 || r >= lp.num_rows) throw DimensionError("LP: column row index out of range");
  RevisedSimplex s(lp, opt);
  return s.run();
}

}  // namespace boxcast
