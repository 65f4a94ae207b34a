#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "procnash/gen/gamegen.hpp"
#include "procnash/theory/checks.hpp"

namespace procnash {

enum class GroupNormalization { group, batch };

struct ToyPolicyConfig {
  int grid = 11;  // m points per edge of the simplex grid; odd keeps 1/2 on the grid
  double learning_rate = 1.0;
  int group_size = 8;
  int groups_per_step = 1;
  GroupNormalization normalization = GroupNormalization::group;
  double kl_coef = 0.0;  // pull toward the initial (uniform) policy
};

struct ToyStep {
  int step = 0;
  double mean_reward = 0.0;            // over the sampled group(s)
  double sampled_exploit = 0.0;        // mean normalized exploitability of the samples
  double expected_exploit = 0.0;       // exact expectation under the current policy
  double grad_norm = 0.0;              // advantage-weighted part only
};

struct ToyTrace {
  GrpoMode mode = GrpoMode::cooperative;
  ToyPolicyConfig config;
  std::vector<ToyStep> steps;
  std::vector<double> row_logits;  // final
  std::vector<double> col_logits;
  bool diverged = false;

  double initial_expected_exploit = 0.0;
};

// Points (c_1, ..., c_n) / (m - 1) with nonnegative integer c summing to m - 1,
// in lexicographic order of c.
std::vector<std::vector<double>> simplex_grid(int n, int m);

// Tabular softmax policy over the grid for each side; each step samples G
// strategy pairs, scores them, and ascends the advantage-weighted score
// function. cooperative: reward 1 - normalized exploitability, shared by both
// sides. role_merged: each pair is scored as row (p^T A q) and as column
// (-p^T A q) within one normalization group.
ToyTrace toy_grpo_train(const GameRecord& game, const ToyPolicyConfig& config, GrpoMode mode, int steps,
                        std::uint64_t seed);

// Means of expected_exploit over consecutive windows of `width` steps.
std::vector<double> window_means(const ToyTrace& trace, int width);

nlohmann::json toy_step_to_json(const ToyStep& s);

}  // namespace procnash
