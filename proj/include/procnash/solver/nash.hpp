#pragma once

#include <string>

#include "procnash/core.hpp"

namespace procnash {

enum class SolveMethod { lp_simplex, support_enum };

std::string to_string(SolveMethod m);

struct Equilibrium {
  double value = 0.0;  // row player's guaranteed payoff
  StrategyPair pair;
  SolveMethod method = SolveMethod::lp_simplex;
  int iterations = 0;
  bool degenerate = false;
};

// Upper bound on n accepted by the LP path.
inline constexpr Index kMaxLpActions = 64;
// Upper bound on n accepted by support enumeration.
inline constexpr Index kMaxEnumerationActions = 5;

// Exact zero-sum equilibrium (the LP oracle and the selector T(A)).
//
// The game is shifted to strictly positive entries and the column player's
// reciprocal-value LP  max 1^T y  s.t. (A + s) y <= 1, y >= 0  is solved by
// Bland-rule simplex. The row strategy is read from the optimal duals, so one
// solve yields both sides. At degeneracy the result is a vertex.
Equilibrium solve_zero_sum_lp(const PayoffMatrix& game);

// Independent oracle for n <= 5. Supports (S, T) with |S| = |T| = k are visited
// for k = 1, 2, ..., rows S in lexicographic order, then columns T in
// lexicographic order. Each visit solves the square equalization systems
//     sum_{i in S} p_i A_ij = v  (j in T),  sum p = 1,
//     sum_{j in T} A_ij q_j = w  (i in S),  sum q = 1,
// keeps the best nonnegative p (largest guaranteed payoff) and the best
// nonnegative q (smallest conceded payoff) seen so far, and returns as soon as
// that pair certifies. Optimal vertices of both players' LPs are reached by
// some square system, so the walk always terminates with a certificate.
Equilibrium support_enumeration(const PayoffMatrix& game);

// Row maximizing its worst case and column minimizing its best case, lowest
// index on ties, both one-hot.
StrategyPair maximin_pure(const PayoffMatrix& game);

StrategyPair uniform_pair(Index n);

bool verify_equilibrium(const PayoffMatrix& game, const StrategyPair& pair, double tol);

}  // namespace procnash
