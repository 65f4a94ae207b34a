#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "procnash/core.hpp"

namespace procnash {

// Residual Exploit(A, p, q) = max_i (Aq)_i - min_j (p^T A)_j without the range
// normalization, so constant matrices are allowed.
double residual(const PayoffMatrix& a, const StrategyPair& pair);

struct LipschitzCounterexample {
  PayoffMatrix a;
  PayoffMatrix b;
  StrategyPair pair;
  double exploit_a = 0.0;
  double exploit_b = 0.0;
  double distance = 0.0;
};

struct LipschitzTrialLog {
  int trials = 0;
  int compared = 0;       // trials with A != B
  int single_entry = 0;   // trials where B bumps one entry of A
  double max_ratio = 0.0; // max |dExploit| / ||A - B||_inf
  int violations = 0;     // |dExploit| > 2 ||A - B||_inf + slack
  double slack = 1e-9;
  std::optional<LipschitzCounterexample> counterexample;  // first violation

  bool passed() const { return violations == 0; }
};

// Random (n, A, B, p, q) with n in 2..10. B is A itself, A plus a single
// entry bump, or A plus a dense perturbation; strategies mix vertices, faces
// and interior points.
LipschitzTrialLog check_residual_lipschitz(int trials, std::uint64_t seed);

struct DiscontinuityRow {
  double eps = 0.0;
  double matrix_distance = 0.0;  // ||A_eps - A_0||_inf
  double l1_jump = 0.0;          // ||T(A_eps) - T(A_0)||_1 over the concatenated pair
  StrategyPair selected;
};

struct DiscontinuityReport {
  StrategyPair at_zero;  // T(0)
  std::vector<DiscontinuityRow> rows;

  bool passed() const;  // every jump >= 1 and every distance equals its eps
};

// T(eps * M) for matching pennies M against T(0), using the LP selector.
DiscontinuityReport selector_discontinuity_demo(const std::vector<double>& eps_values);

enum class GrpoMode { cooperative, role_merged };

std::string to_string(GrpoMode m);
GrpoMode grpo_mode_from_string(const std::string& s);

struct GrpoGroup {
  std::vector<double> rewards;
  GrpoMode mode = GrpoMode::cooperative;
  // cooperative: one per reward. role_merged: the 2G group
  // (r_1, ..., r_G, -r_1, ..., -r_G) divided by sigma.
  std::vector<double> advantages;
  // Weight on grad log pi(y_i) for output i: the advantage itself when
  // cooperative, A_row + A_col when role-merged.
  std::vector<double> per_output_coefficient;
  double mean = 0.0;
  double sigma = 0.0;  // population standard deviation over the group
};

GrpoGroup grpo_advantages(const std::vector<double>& rewards, GrpoMode mode);

// Mean and sigma accumulated over every reward of every group in the batch.
std::vector<GrpoGroup> grpo_advantages_batch(const std::vector<std::vector<double>>& groups, GrpoMode mode);

struct CancellationReport {
  int trials = 0;
  double max_abs_coefficient = 0.0;  // role-merged
  int violations = 0;
  double tolerance = 1e-12;
  int nonconstant_draws = 0;
  int cooperative_nonzero = 0;  // nonconstant draws with a nonzero cooperative coefficient
  std::vector<double> counterexample;

  bool passed() const { return violations == 0; }
};

// Reward draws over G in 2..16, including all-zero groups.
CancellationReport grpo_cancellation_check(int trials, std::uint64_t seed);

nlohmann::json lipschitz_to_json(const LipschitzTrialLog& log);
nlohmann::json discontinuity_to_json(const DiscontinuityReport& report);
nlohmann::json cancellation_to_json(const CancellationReport& report);

}  // namespace procnash
