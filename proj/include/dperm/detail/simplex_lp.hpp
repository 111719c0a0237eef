// Copyright 2026 The dperm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense two-phase primal simplex for small standard-form programs
//
//   minimize c'x  subject to  A x = b,  x >= 0.
//
// Sized for the polytope membership and gauge problems (a few hundred rows,
// up to ~2e4 columns). Pricing is Dantzig's rule with a switch to Bland's
// rule after a run of degenerate pivots, which rules out cycling.

#ifndef DPERM_DETAIL_SIMPLEX_LP_HPP_
#define DPERM_DETAIL_SIMPLEX_LP_HPP_

#include <cmath>
#include <vector>

#include "dperm/core.hpp"

namespace dperm::detail {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

template <typename Scalar>
struct LpResult {
  LpStatus status = LpStatus::kIterationLimit;
  Vector<Scalar> x;
  Scalar objective = Scalar(0);
};

template <typename Scalar>
class SimplexTableau {
 public:
  SimplexTableau(const Matrix<Scalar>& A, const Vector<Scalar>& b,
                 const Vector<Scalar>& c, Scalar tol, Scalar feas_tol)
      : m_(A.rows()), n_(A.cols()), tol_(tol), feas_tol_(feas_tol) {
    // Columns: [x (n) | artificials (m) | rhs]. Row m is the objective.
    T_.setZero(m_ + 1, n_ + m_ + 1);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Scalar sgn = b(i) < 0 ? Scalar(-1) : Scalar(1);
      T_.row(i).head(n_) = sgn * A.row(i);
      T_(i, n_ + i) = Scalar(1);
      T_(i, n_ + m_) = sgn * b(i);
    }
    basis_.resize(m_);
    for (Eigen::Index i = 0; i < m_; ++i) basis_[i] = n_ + i;
    c_ = c;
  }

  LpResult<Scalar> solve(long max_iter) {
    LpResult<Scalar> out;
    // Phase I: minimize the sum of artificials.
    Vector<Scalar> cost1 = Vector<Scalar>::Zero(n_ + m_);
    cost1.tail(m_).setOnes();
    price(cost1);
    active_cols_ = n_ + m_;
    LpStatus st = iterate(max_iter);
    if (st == LpStatus::kIterationLimit) {
      out.status = st;
      return out;
    }
    // Residual of the phase-I point: sum of the artificials still basic.
    Scalar infeas = 0;
    for (Eigen::Index i = 0; i < m_; ++i)
      if (basis_[i] >= n_) infeas += std::abs(T_(i, n_ + m_));
    if (infeas > feas_tol_) {
      out.status = LpStatus::kInfeasible;
      return out;
    }
    drive_out_artificials();
    // Phase II on the original costs; artificial columns are frozen.
    Vector<Scalar> cost2 = Vector<Scalar>::Zero(n_ + m_);
    cost2.head(n_) = c_;
    price(cost2);
    active_cols_ = n_;
    st = iterate(max_iter);
    out.status = st;
    if (st != LpStatus::kOptimal) return out;
    out.x.setZero(n_);
    for (Eigen::Index i = 0; i < m_; ++i)
      if (basis_[i] < n_) out.x(basis_[i]) = T_(i, n_ + m_);
    out.objective = c_.dot(out.x);
    return out;
  }

 private:
  void price(const Vector<Scalar>& cost) {
    T_.row(m_).setZero();
    T_.row(m_).head(n_ + m_) = cost.transpose();
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Scalar cb = cost(basis_[i]);
      if (cb != Scalar(0)) T_.row(m_) -= cb * T_.row(i);
    }
  }

  void pivot(Eigen::Index r, Eigen::Index col) {
    T_.row(r) /= T_(r, col);
    for (Eigen::Index i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const Scalar f = T_(i, col);
      if (f != Scalar(0)) T_.row(i) -= f * T_.row(r);
    }
    basis_[r] = col;
  }

  LpStatus iterate(long max_iter) {
    long degenerate_run = 0;
    for (long it = 0; it < max_iter; ++it) {
      const bool bland = degenerate_run > 50;
      Eigen::Index enter = -1;
      Scalar best = -tol_;
      for (Eigen::Index j = 0; j < active_cols_; ++j) {
        const Scalar rc = T_(m_, j);
        if (rc < best) {
          enter = j;
          if (bland) break;
          best = rc;
        }
      }
      if (enter < 0) return LpStatus::kOptimal;
      Eigen::Index leave = -1;
      Scalar ratio = std::numeric_limits<Scalar>::infinity();
      for (Eigen::Index i = 0; i < m_; ++i) {
        const Scalar a = T_(i, enter);
        if (a > tol_) {
          const Scalar r = T_(i, n_ + m_) / a;
          if (r < ratio - tol_ ||
              (r <= ratio + tol_ && leave >= 0 && basis_[i] < basis_[leave])) {
            ratio = std::min(ratio, r);
            leave = i;
          }
        }
      }
      if (leave < 0) return LpStatus::kUnbounded;
      degenerate_run = ratio <= tol_ ? degenerate_run + 1 : 0;
      pivot(leave, enter);
    }
    return LpStatus::kIterationLimit;
  }

  void drive_out_artificials() {
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      Eigen::Index col = -1;
      Scalar big = tol_;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (std::abs(T_(i, j)) > big) {
          big = std::abs(T_(i, j));
          col = j;
        }
      }
      // A row with no admissible pivot is redundant; its artificial stays
      // basic at zero and its column is never priced again.
      if (col >= 0) pivot(i, col);
    }
  }

  Eigen::Index m_, n_;
  Eigen::Index active_cols_ = 0;
  Scalar tol_, feas_tol_;
  Matrix<Scalar> T_;
  Vector<Scalar> c_;
  std::vector<Eigen::Index> basis_;
};

template <typename Scalar>
LpResult<Scalar> solve_standard_lp(const Matrix<Scalar>& A,
                                   const Vector<Scalar>& b,
                                   const Vector<Scalar>& c,
                                   Scalar tol = Scalar(1e-11),
                                   Scalar feas_tol = Scalar(1e-9),
                                   long max_iter = 200000) {
  SimplexTableau<Scalar> tab(A, b, c, tol, feas_tol);
  return tab.solve(max_iter);
}

}  // namespace dperm::detail

#endif  // DPERM_DETAIL_SIMPLEX_LP_HPP_
