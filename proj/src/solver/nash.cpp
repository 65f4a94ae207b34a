#include "procnash/solver/nash.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <limits>
#include <optional>
#include <vector>

#include "procnash/core/json_io.hpp"
#include "procnash/solver/simplex.hpp"

namespace procnash {

std::string to_string(SolveMethod m) { return m == SolveMethod::lp_simplex ? "lp_simplex" : "support_enum"; }

namespace {

[[noreturn]] void fail(const std::string& what, const PayoffMatrix& game) {
  throw SolverError(what + "; instance: " + matrix_to_json(game).dump());
}

MixedStrategy normalized_strategy(DenseVector<double> w) {
  const double mass = w.sum();
  return MixedStrategy(w / mass);
}

double residual_exploit(const PayoffMatrix& game, const StrategyPair& pair) {
  const auto r = response_payoffs(game.entries(), pair.row.probs(), pair.col.probs());
  return r.best_row - r.worst_col;
}

}  // namespace

Equilibrium solve_zero_sum_lp(const PayoffMatrix& game) {
  const Index n = game.n();
  if (n > kMaxLpActions) throw ContractError("solve_zero_sum_lp supports n <= 64");

  const double shift = 1.0 - game.min();
  const DenseMatrix<double> shifted = (game.entries().array() + shift).matrix();
  const DenseVector<double> ones = DenseVector<double>::Ones(n);

  const auto lp = solve_canonical_lp<double>(shifted, ones, ones);
  if (lp.status != LpStatus::optimal) fail("simplex did not reach an optimal basis", game);
  const double mass = lp.x.sum();
  if (!(mass > 0.0) || !(lp.duals.sum() > 0.0)) fail("simplex returned an empty strategy", game);

  Equilibrium eq{1.0 / mass - shift,
                 StrategyPair{normalized_strategy(lp.duals), normalized_strategy(lp.x)},
                 SolveMethod::lp_simplex,
                 lp.iterations,
                 lp.degenerate};

  if (residual_exploit(game, eq.pair) > tol::kCertificate) fail("LP solution failed its certificate", game);
  return eq;
}

Equilibrium support_enumeration(const PayoffMatrix& game) {
  const Index n = game.n();
  if (n > kMaxEnumerationActions) throw ContractError("support_enumeration supports n <= 5");
  const auto& a = game.entries();
  const double accept = 1e-10 * std::max(1.0, game.range());

  std::optional<MixedStrategy> best_p;
  std::optional<MixedStrategy> best_q;
  double best_guarantee = -std::numeric_limits<double>::infinity();
  double best_concession = std::numeric_limits<double>::infinity();
  int visited = 0;

  // Solves the (k+1) x (k+1) equalization system for the strategy on `support`
  // that equalizes payoffs against `against`; `transpose` selects the column
  // player's system.
  auto solve_side = [&](const std::vector<Index>& support, const std::vector<Index>& against,
                        bool transpose) -> std::optional<MixedStrategy> {
    const Index k = static_cast<Index>(support.size());
    DenseMatrix<double> sys = DenseMatrix<double>::Zero(k + 1, k + 1);
    DenseVector<double> rhs = DenseVector<double>::Zero(k + 1);
    for (Index e = 0; e < k; ++e) {
      for (Index s = 0; s < k; ++s) {
        const Index i = support[static_cast<std::size_t>(s)];
        const Index j = against[static_cast<std::size_t>(e)];
        sys(e, s) = transpose ? a(j, i) : a(i, j);
      }
      sys(e, k) = -1.0;
    }
    sys.row(k).head(k).setOnes();
    rhs[k] = 1.0;
    Eigen::FullPivLU<DenseMatrix<double>> lu(sys);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) return std::nullopt;
    const DenseVector<double> sol = lu.solve(rhs);
    DenseVector<double> full = DenseVector<double>::Zero(n);
    for (Index s = 0; s < k; ++s) {
      if (sol[s] < -1e-12) return std::nullopt;
      full[support[static_cast<std::size_t>(s)]] = std::max(0.0, sol[s]);
    }
    return project_to_simplex(full);
  };

  std::vector<std::vector<Index>> subsets_by_size[kMaxEnumerationActions + 1];
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<Index> s;
    for (Index i = 0; i < n; ++i) {
      if (mask & (1u << i)) s.push_back(i);
    }
    subsets_by_size[s.size()].push_back(std::move(s));
  }
  for (auto& group : subsets_by_size) std::sort(group.begin(), group.end());

  for (Index k = 1; k <= n; ++k) {
    for (const auto& rows : subsets_by_size[k]) {
      for (const auto& cols : subsets_by_size[k]) {
        ++visited;
        if (auto p = solve_side(rows, cols, false)) {
          const DenseVector<double> pa = p->probs().transpose() * a;
          const double g = pa.minCoeff();
          if (g > best_guarantee) {
            best_guarantee = g;
            best_p = std::move(p);
          }
        }
        if (auto q = solve_side(cols, rows, true)) {
          const DenseVector<double> aq = a * q->probs();
          const double h = aq.maxCoeff();
          if (h < best_concession) {
            best_concession = h;
            best_q = std::move(q);
          }
        }
        if (best_p && best_q && best_concession - best_guarantee <= accept) {
          StrategyPair pair{*best_p, *best_q};
          if (residual_exploit(game, pair) > tol::kCertificate) continue;
          const auto support_size = [](const MixedStrategy& s) { return (s.probs().array() > 0.0).count(); };
          const double value = response_payoffs(a, pair.row.probs(), pair.col.probs()).value;
          const bool degenerate = support_size(pair.row) != support_size(pair.col);
          return Equilibrium{value, std::move(pair), SolveMethod::support_enum, visited, degenerate};
        }
      }
    }
  }
  fail("support enumeration found no certified pair", game);
}

StrategyPair maximin_pure(const PayoffMatrix& game) {
  const auto& a = game.entries();
  const Index n = game.n();
  Index best_row = 0;
  double best_row_floor = a.row(0).minCoeff();
  for (Index i = 1; i < n; ++i) {
    const double floor = a.row(i).minCoeff();
    if (floor > best_row_floor) {
      best_row_floor = floor;
      best_row = i;
    }
  }
  Index best_col = 0;
  double best_col_ceiling = a.col(0).maxCoeff();
  for (Index j = 1; j < n; ++j) {
    const double ceiling = a.col(j).maxCoeff();
    if (ceiling < best_col_ceiling) {
      best_col_ceiling = ceiling;
      best_col = j;
    }
  }
  return {MixedStrategy::pure(n, best_row), MixedStrategy::pure(n, best_col)};
}

StrategyPair uniform_pair(Index n) { return StrategyPair::uniform(n); }

bool verify_equilibrium(const PayoffMatrix& game, const StrategyPair& pair, double tol) {
  // Every pair is an equilibrium of a constant game.
  if (game.is_constant()) return residual_exploit(game, pair) <= tol;
  return exploitability(game, pair).exploit <= tol;
}

}  // namespace procnash
