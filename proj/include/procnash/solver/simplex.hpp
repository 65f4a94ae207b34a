#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "procnash/core/payoff_matrix.hpp"

namespace procnash {

enum class LpStatus { optimal, unbounded, iteration_limit };

template <class Scalar>
struct CanonicalLpSolution {
  LpStatus status = LpStatus::iteration_limit;
  DenseVector<Scalar> x;      // primal, length = number of structural variables
  DenseVector<Scalar> duals;  // one per constraint row
  Scalar objective = 0;
  std::vector<Index> basis;   // basic variable per row; slack of row i is cols + i
  int iterations = 0;
  bool degenerate = false;    // zero reduced cost off-basis or zero-valued basic variable
};

struct SimplexOptions {
  double pivot_tolerance = 1e-11;
  int max_iterations = 20000;
  bool refine = true;  // re-solve the final basis with a pivoted LU
};

// Dense tableau simplex for
//     maximize c^T x  subject to  A x <= b,  x >= 0,  with b >= 0,
// so the all-slack basis is feasible and no phase one is needed.
//
// Pivoting follows Bland's rule: the entering variable is the lowest-index
// column with positive reduced cost and the leaving row is the minimum ratio
// row with ties broken by lowest basic-variable index. This terminates on
// degenerate problems and makes the returned vertex a fixed function of the
// input.
template <class Scalar>
CanonicalLpSolution<Scalar> solve_canonical_lp(const DenseMatrix<Scalar>& a, const DenseVector<Scalar>& b,
                                               const DenseVector<Scalar>& c, const SimplexOptions& opt = {}) {
  const Index m = a.rows();
  const Index nv = a.cols();
  const Index width = nv + m;
  const Scalar eps = Scalar(opt.pivot_tolerance);

  // Rows 0..m-1: [A | I | b]. Row m: reduced costs d_j = c_j - c_B^T B^-1 a_j
  // stored in the first `width` columns and -objective in the last.
  DenseMatrix<Scalar> t = DenseMatrix<Scalar>::Zero(m + 1, width + 1);
  t.topLeftCorner(m, nv) = a;
  t.block(0, nv, m, m).setIdentity();
  t.col(width).head(m) = b;
  t.row(m).head(nv) = c.transpose();

  CanonicalLpSolution<Scalar> sol;
  sol.basis.resize(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) sol.basis[static_cast<std::size_t>(i)] = nv + i;

  for (;;) {
    Index enter = -1;
    for (Index j = 0; j < width; ++j) {
      if (t(m, j) > eps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) {
      sol.status = LpStatus::optimal;
      break;
    }
    if (sol.iterations >= opt.max_iterations) {
      sol.status = LpStatus::iteration_limit;
      return sol;
    }

    Index leave = -1;
    Scalar best_ratio = std::numeric_limits<Scalar>::infinity();
    for (Index i = 0; i < m; ++i) {
      const Scalar aij = t(i, enter);
      if (!(aij > eps)) continue;
      const Scalar ratio = t(i, width) / aij;
      const Scalar slack = eps * std::max(Scalar(1), std::abs(best_ratio));
      if (leave < 0 || ratio < best_ratio - slack) {
        leave = i;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + slack &&
                 sol.basis[static_cast<std::size_t>(i)] < sol.basis[static_cast<std::size_t>(leave)]) {
        leave = i;
        best_ratio = std::min(best_ratio, ratio);
      }
    }
    if (leave < 0) {
      sol.status = LpStatus::unbounded;
      return sol;
    }

    t.row(leave) /= t(leave, enter);
    t(leave, enter) = Scalar(1);
    for (Index i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const Scalar f = t(i, enter);
      if (f != Scalar(0)) {
        t.row(i) -= f * t.row(leave);
        t(i, enter) = Scalar(0);
      }
    }
    sol.basis[static_cast<std::size_t>(leave)] = enter;
    ++sol.iterations;
  }

  std::vector<bool> is_basic(static_cast<std::size_t>(width), false);
  for (const Index v : sol.basis) is_basic[static_cast<std::size_t>(v)] = true;
  for (Index j = 0; j < width && !sol.degenerate; ++j) {
    if (!is_basic[static_cast<std::size_t>(j)] && std::abs(t(m, j)) <= eps) sol.degenerate = true;
  }
  for (Index i = 0; i < m && !sol.degenerate; ++i) {
    if (std::abs(t(i, width)) <= eps) sol.degenerate = true;
  }

  DenseVector<Scalar> basic_values = t.col(width).head(m);
  sol.duals = -t.row(m).segment(nv, m).transpose();

  if (opt.refine) {
    // Basis matrix from the original columns of [A | I].
    DenseMatrix<Scalar> basis_matrix = DenseMatrix<Scalar>::Zero(m, m);
    DenseVector<Scalar> cost_b(m);
    for (Index i = 0; i < m; ++i) {
      const Index v = sol.basis[static_cast<std::size_t>(i)];
      if (v < nv) {
        basis_matrix.col(i) = a.col(v);
        cost_b[i] = c[v];
      } else {
        basis_matrix(v - nv, i) = Scalar(1);
        cost_b[i] = Scalar(0);
      }
    }
    Eigen::FullPivLU<DenseMatrix<Scalar>> lu(basis_matrix);
    if (lu.isInvertible()) {
      basic_values = lu.solve(b);
      Eigen::FullPivLU<DenseMatrix<Scalar>> lu_t(basis_matrix.transpose());
      sol.duals = lu_t.solve(cost_b);  // B^T y = c_B
    }
  }

  sol.x = DenseVector<Scalar>::Zero(nv);
  for (Index i = 0; i < m; ++i) {
    const Index v = sol.basis[static_cast<std::size_t>(i)];
    if (v < nv) sol.x[v] = std::max(Scalar(0), basic_values[i]);
  }
  for (Index i = 0; i < m; ++i) sol.duals[i] = std::max(Scalar(0), sol.duals[i]);
  sol.objective = c.dot(sol.x);
  return sol;
}

}  // namespace procnash
