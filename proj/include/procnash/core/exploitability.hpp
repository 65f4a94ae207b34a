#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "procnash/core/payoff_matrix.hpp"
#include "procnash/core/strategy.hpp"

namespace procnash {

// Order-independent compensated sum: terms are sorted before a Neumaier pass,
// so any permutation of the same multiset yields the same bits.
template <class Scalar>
Scalar ordered_sum(std::vector<Scalar>& terms) {
  std::sort(terms.begin(), terms.end());
  Scalar sum = 0;
  Scalar carry = 0;
  for (const Scalar x : terms) {
    const Scalar t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

// Best-response payoffs against a fixed pair.
template <class Scalar>
struct ResponsePayoffs {
  Scalar best_row;   // max_i (A q)_i
  Scalar worst_col;  // min_j (p^T A)_j
  Scalar value;      // p^T A q
};

template <class Derived, class DerivedP, class DerivedQ>
ResponsePayoffs<typename Derived::Scalar> response_payoffs(const Eigen::MatrixBase<Derived>& a,
                                                           const Eigen::MatrixBase<DerivedP>& p,
                                                           const Eigen::MatrixBase<DerivedQ>& q) {
  using Scalar = typename Derived::Scalar;
  const Index rows = a.rows();
  const Index cols = a.cols();
  if (p.size() != rows || q.size() != cols) throw ContractError("strategy length does not match matrix");

  std::vector<Scalar> terms;
  terms.reserve(static_cast<std::size_t>(std::max(rows, cols)));
  DenseVector<Scalar> aq(rows);
  for (Index i = 0; i < rows; ++i) {
    terms.clear();
    for (Index j = 0; j < cols; ++j) terms.push_back(a(i, j) * q[j]);
    aq[i] = ordered_sum(terms);
  }
  DenseVector<Scalar> pa(cols);
  for (Index j = 0; j < cols; ++j) {
    terms.clear();
    for (Index i = 0; i < rows; ++i) terms.push_back(p[i] * a(i, j));
    pa[j] = ordered_sum(terms);
  }
  terms.clear();
  for (Index i = 0; i < rows; ++i) terms.push_back(p[i] * aq[i]);
  return {aq.maxCoeff(), pa.minCoeff(), ordered_sum(terms)};
}

template <class Scalar>
struct BasicExploitReport {
  Scalar row_regret;  // max_i (Aq)_i - p^T A q
  Scalar col_regret;  // p^T A q - min_j (p^T A)_j
  Scalar exploit;     // row_regret + col_regret
  Scalar normalized;  // exploit / (2 (max A - min A))
  Scalar reward;      // 1 - normalized
  Scalar value;       // p^T A q
};

using ExploitReport = BasicExploitReport<double>;

// NashConv of a strategy pair. Zero exactly at a Nash equilibrium.
//
// Throws ContractError on a dimension mismatch or a constant matrix (the
// constant-matrix bump belongs to generation, not scoring).
template <class Scalar>
BasicExploitReport<Scalar> exploitability(const BasicPayoffMatrix<Scalar>& game,
                                          const BasicStrategyPair<Scalar>& pair) {
  if (pair.row.size() != game.n() || pair.col.size() != game.n()) {
    throw ContractError("strategy pair dimensions do not match the game");
  }
  const Scalar range = game.range();
  if (!(range > Scalar(0))) {
    throw ContractError("constant payoff matrix: normalize the game before scoring");
  }
  const auto r = response_payoffs(game.entries(), pair.row.probs(), pair.col.probs());
  // Regrets inside the arithmetic slack (relative to the range) are rounding
  // noise from the solver, so certified equilibria score exactly 1.
  const Scalar floor = Scalar(tol::kArithmetic) * range;
  const auto clean = [floor](Scalar regret) { return regret > floor ? regret : Scalar(0); };
  const Scalar row_regret = clean(r.best_row - r.value);
  const Scalar col_regret = clean(r.value - r.worst_col);
  const Scalar exploit = row_regret + col_regret;
  const Scalar normalized = std::min(Scalar(1), exploit / (Scalar(2) * range));
  return {row_regret, col_regret, exploit, normalized, Scalar(1) - normalized, r.value};
}

}  // namespace procnash
